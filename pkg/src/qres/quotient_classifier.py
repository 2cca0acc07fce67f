"""Dictionary between simplicial cones and diagonal cyclic quotient data.

A diagonal action of a cyclic group of order ``l`` on affine n-space is
recorded as the tuple of its characters modulo ``l``.  Tuples are stored in
a canonical form (lexicographically smallest among all unit rescalings and
coordinate permutations), which makes equality of quotient types decidable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .cones_fans import Cone, multiplicity
from .errors import (
    DimensionError,
    NotRepresentableError,
    QresError,
    UnsupportedInputError,
)
from .exact_lattice import IntegerMatrix, IntegerVector, primitive, smith_normal_form


def _canonical_characters(order: int, chars: Sequence[int]) -> tuple[int, ...]:
    reduced = tuple(c % order for c in chars)
    best: Optional[tuple[int, ...]] = None
    for u in range(1, order + 1):
        if math.gcd(u, order) != 1:
            continue
        cand = tuple(sorted((u * c) % order for c in reduced))
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


@dataclass(frozen=True)
class CyclicQuotientType:
    """Cyclic quotient ``1/l(c_1, ..., c_n)`` in canonical form.

    Invariants: ``0 <= c_i < l``, ``gcd(c_1, ..., c_n, l) = 1`` (the group
    acts with exact order ``l``), and the stored tuple is the canonical
    representative of its equivalence class.
    """

    order: int
    characters: tuple[int, ...]

    def __init__(self, order: int, characters: Iterable[int]):
        order = int(order)
        chars = tuple(int(c) for c in characters)
        if order < 1:
            raise QresError(f"order must be positive, got {order}")
        if not chars:
            raise DimensionError("a quotient type needs at least one coordinate")
        if math.gcd(order, *chars) != 1:
            raise QresError(
                f"characters {chars} mod {order} do not generate a faithful action"
            )
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "characters", _canonical_characters(order, chars))

    @property
    def rank(self) -> int:
        return len(self.characters)

    def is_trivial(self) -> bool:
        return self.order == 1

    def __str__(self) -> str:
        return f"1/{self.order}({','.join(str(c) for c in self.characters)})"

    @classmethod
    def parse(cls, text: str) -> "CyclicQuotientType":
        """Parse strings like ``1/5(2,1)`` (canonicalizing the tuple)."""
        order, chars = parse_quotient_literal(text)
        return cls(order, chars)


def parse_quotient_literal(text: str) -> tuple[int, tuple[int, ...]]:
    """Order and character tuple of a ``1/l(c_1,...,c_n)`` literal, as typed.

    No canonicalization: callers that care about coordinate positions (the
    command line does) get the tuple in the order the user wrote it.
    """
    s = text.strip().replace(" ", "")
    if not s.startswith("1/") or "(" not in s or not s.endswith(")"):
        raise QresError(f"cannot parse quotient type {text!r}")
    head, inner = s[2:-1].split("(", 1)
    try:
        order = int(head)
        chars = tuple(int(p) for p in inner.split(",")) if inner else ()
    except ValueError as exc:
        raise QresError(f"cannot parse quotient type {text!r}") from exc
    if not chars:
        raise QresError("a quotient type needs at least one coordinate")
    if order < 1:
        raise QresError(f"order must be positive, got {order}")
    chars = tuple(c % order for c in chars)
    if math.gcd(order, *chars) != 1:
        raise QresError(
            f"characters {chars} mod {order} do not generate a faithful action"
        )
    return order, chars


@dataclass(frozen=True)
class QuotientDescriptor:
    """Quotient group of a cone: divisor chain plus the cyclic type if any."""

    invariants: tuple[int, ...]
    cyclic: bool
    cqs: Optional[CyclicQuotientType]

    @property
    def order(self) -> int:
        prod = 1
        for d in self.invariants:
            prod *= d
        return prod

    @property
    def nontrivial(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariants if d > 1)


@lru_cache(maxsize=None)
def cone_characters(c: Cone) -> tuple[int, tuple[int, ...]]:
    """Order and characters of a cone's cyclic quotient, generator-aligned.

    The characters are read off the distinguished quotient generator that
    the Smith transform provides, so the result is deterministic; it is well
    defined up to a unit rescaling.  Raises
    :class:`UnsupportedInputError` when the quotient group is not cyclic.
    """
    if not c.generators:
        return 1, ()
    snf = smith_normal_form(IntegerMatrix(c.generators))
    heavy = [i for i, d in enumerate(snf.diagonal) if d > 1]
    if len(heavy) > 1:
        raise UnsupportedInputError(
            f"cone quotient has invariants {snf.nontrivial}, not cyclic"
        )
    if not heavy:
        return 1, tuple(0 for _ in c.generators)
    k = heavy[0]
    order = snf.diagonal[k]
    row = snf.left.rows[k]
    return order, tuple(e % order for e in row.entries)


def cone_descriptor(c: Cone) -> QuotientDescriptor:
    """Divisor-chain descriptor of any simplicial cone (saturation-relative)."""
    if not c.generators:
        return QuotientDescriptor((), True, None)
    snf = smith_normal_form(IntegerMatrix(c.generators))
    chain = snf.diagonal
    cyclic = sum(1 for d in chain if d > 1) <= 1
    cqs = None
    if cyclic:
        order, chars = cone_characters(c)
        cqs = CyclicQuotientType(order, chars) if chars else CyclicQuotientType(1, (0,))
    return QuotientDescriptor(chain, cyclic, cqs)


def cone_to_quotient(c: Cone) -> QuotientDescriptor:
    """Classify a full-dimensional simplicial cone.

    The divisor chain comes from the Smith normal form of the generator
    matrix; when the quotient is cyclic the character tuple of the
    distinguished generator is attached in canonical form.
    """
    if not c.is_full_dimensional():
        raise DimensionError("classification requires a full-dimensional cone")
    return cone_descriptor(c)


def standard_cone_with_divisor(q: CyclicQuotientType) -> tuple[Cone, IntegerVector]:
    """Standard cone of ``q`` together with its distinguished divisor ray.

    The divisor ray is the generator built from the unit-normalized last
    coordinate; it is the natural marking for the resolution loop.
    """
    n = q.rank
    lorder = q.order
    units = [i for i, c in enumerate(q.characters) if math.gcd(c, lorder) == 1]
    if not units:
        raise NotRepresentableError(
            f"{q} has no coordinate with unit character; no standard cone exists"
        )
    d = units[0]
    s = pow(q.characters[d], -1, lorder)
    scaled = [(s * c) % lorder for c in q.characters]
    rest = [scaled[i] for i in range(n) if i != d]
    gens: list[IntegerVector] = []
    for i in range(n - 1):
        gens.append(IntegerVector([1 if j == i else 0 for j in range(n)]))
    last = [0] * n
    last[n - 1] = lorder
    for i, a in enumerate(rest):
        last[i] -= a
    divisor = primitive(IntegerVector(last))
    gens.append(divisor)
    return Cone(n, gens), divisor


def quotient_to_cone(q: CyclicQuotientType) -> Cone:
    """Standard cone of a cyclic quotient type with a unit character.

    With characters normalized so the last one equals 1, the cone is
    spanned by ``e_1, ..., e_{n-1}`` and ``l*e_n - sum_i c_i e_i``.  The
    last generator is stored primitively, so quotients with generating
    pseudoreflections land on the cone of their reduced type.
    """
    return standard_cone_with_divisor(q)[0]


def is_tame(q: CyclicQuotientType, characteristic: int) -> bool:
    """Whether the group order is invertible in the base field."""
    _validate_characteristic(characteristic)
    return characteristic == 0 or q.order % characteristic != 0


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _validate_characteristic(p: int) -> None:
    if p != 0 and not _is_prime(p):
        raise QresError(f"characteristic must be 0 or prime, got {p}")


def pseudoreflections(q: CyclicQuotientType) -> tuple[int, ...]:
    """Group elements fixing a coordinate divisor pointwise.

    ``k`` qualifies exactly when ``k*c_i = 0 (mod l)`` for all but one i.
    """
    l = q.order
    return tuple(
        k
        for k in range(1, l)
        if sum(1 for c in q.characters if (k * c) % l != 0) == 1
    )


def pseudoreflection_reduce(q: CyclicQuotientType) -> CyclicQuotientType:
    """Quotient by the subgroup generated by all pseudoreflections.

    The subgroup's invariant ring is polynomial in powers of the original
    coordinates; the residual action on those invariant coordinates is
    returned.  The output has no pseudoreflections and the operation is
    idempotent.
    """
    l = q.order
    refl = pseudoreflections(q)
    if not refl:
        return q
    d = math.gcd(l, *refl)
    sub_order = l // d
    exps = [l // math.gcd(l, d * c) for c in q.characters]
    prod = 1
    for e in exps:
        prod *= e
    # the pseudoreflection subgroup splits as a direct sum of one-coordinate
    # kernels, so its invariant ring is generated by pure powers
    assert prod == sub_order
    step = sub_order
    new_chars = []
    for c, e in zip(q.characters, exps):
        ce = (c * e) % l
        assert ce % step == 0
        new_chars.append(ce // step)
    return CyclicQuotientType(d, new_chars)


def faithful_rays(q: CyclicQuotientType) -> frozenset[int]:
    """Indices (0-based) of coordinates whose character is a unit mod l."""
    return frozenset(
        i for i, c in enumerate(q.characters) if math.gcd(c, q.order) == 1
    )
