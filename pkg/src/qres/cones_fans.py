"""Simplicial rational cones and fans.

Cones are stored by their primitive, linearly independent generators in a
canonical (lexicographic) order, so equal cones compare equal and fans can
be compared as sets.  Star subdivision and the shared-face fan check are
exact; no floating point is used anywhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import DegenerateInputError, DimensionError, SupportError
from .exact_lattice import (
    IntegerMatrix,
    IntegerVector,
    is_primitive,
    matrix_rank,
    smith_normal_form,
    span_coordinates,
)


@dataclass(frozen=True)
class Cone:
    """Simplicial cone spanned by primitive, independent lattice vectors.

    The zero cone of a given ambient rank has an empty generator tuple.
    """

    rank: int
    generators: tuple[IntegerVector, ...]

    def __init__(self, rank: int, generators: Iterable[Iterable[int] | IntegerVector]):
        gens = tuple(
            g if isinstance(g, IntegerVector) else IntegerVector(g) for g in generators
        )
        for g in gens:
            if g.rank != rank:
                raise DimensionError(f"generator {g} does not live in rank {rank}")
            if g.is_zero():
                raise DegenerateInputError("the zero vector cannot generate a ray")
            if not is_primitive(g):
                raise DegenerateInputError(f"ray generator {g} is not primitive")
        gens = tuple(sorted(set(gens), key=lambda g: g.entries))
        if gens and matrix_rank(IntegerMatrix(gens)) != len(gens):
            raise DegenerateInputError("generators are linearly dependent")
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        return len(self.generators)

    def is_full_dimensional(self) -> bool:
        return self.dim == self.rank

    def coordinates(self, v: IntegerVector) -> Optional[tuple[Fraction, ...]]:
        """Barycentric coordinates of ``v`` in the generators, or ``None``."""
        if v.rank != self.rank:
            raise DimensionError("vector rank does not match the cone")
        return span_coordinates(self.generators, v)

    def contains(self, v: IntegerVector) -> bool:
        coords = self.coordinates(v)
        return coords is not None and all(c >= 0 for c in coords)

    def sort_key(self) -> tuple:
        return tuple(g.entries for g in self.generators)

    def __repr__(self) -> str:
        return "Cone<" + ", ".join(repr(g) for g in self.generators) + ">"


@dataclass(frozen=True)
class Fan:
    """Finite set of maximal simplicial cones of a common ambient rank.

    Construction absorbs any cone whose generators are a subset of another
    cone's, so only maximal cones are stored; their faces are implied.
    """

    rank: int
    cones: frozenset[Cone]

    def __init__(self, rank: int, cones: Iterable[Cone]):
        cs = set(cones)
        for c in cs:
            if c.rank != rank:
                raise DimensionError("cone rank does not match fan rank")
        maximal = {
            c
            for c in cs
            if not any(
                c is not d and set(c.generators) <= set(d.generators) for d in cs
            )
        }
        object.__setattr__(self, "rank", int(rank))
        object.__setattr__(self, "cones", frozenset(maximal))

    def sorted_cones(self) -> tuple[Cone, ...]:
        return tuple(sorted(self.cones, key=Cone.sort_key))

    def rays(self) -> tuple[IntegerVector, ...]:
        seen = sorted({g for c in self.cones for g in c.generators}, key=lambda g: g.entries)
        return tuple(seen)

    def supports(self, v: IntegerVector) -> bool:
        return any(c.contains(v) for c in self.cones)

    def __repr__(self) -> str:
        return "Fan{" + ", ".join(repr(c) for c in self.sorted_cones()) + "}"


@lru_cache(maxsize=None)
def multiplicity(c: Cone) -> int:
    """Index of the generator sublattice inside its saturation.

    For a full-dimensional cone this is ``|det|`` of the generator matrix and
    equals 1 exactly when the affine chart is smooth.  Lower-dimensional
    cones are measured inside the saturated sublattice they span.
    """
    if not c.generators:
        return 1
    diag = smith_normal_form(IntegerMatrix(c.generators)).diagonal
    prod = 1
    for d in diag:
        prod *= d
    return prod


def is_smooth(c: Cone) -> bool:
    return multiplicity(c) == 1


def faces(c: Cone) -> frozenset[Cone]:
    """All faces of a simplicial cone: the sub-cones of generator subsets."""
    out = set()
    for r in range(len(c.generators) + 1):
        for subset in itertools.combinations(c.generators, r):
            out.add(Cone(c.rank, subset))
    return frozenset(out)


def _subdivide_cone(c: Cone, u: IntegerVector) -> tuple[Cone, ...]:
    """Star subdivision of a single cone containing ``u``.

    Every generator of the minimal face containing ``u`` is replaced in turn
    by ``u``; if ``u`` already is a generator the cone is returned unchanged.
    """
    coords = c.coordinates(u)
    assert coords is not None and all(x >= 0 for x in coords)
    slots = [i for i, x in enumerate(coords) if x > 0]
    if len(slots) == 1 and coords[slots[0]] == 1:
        return (c,)
    pieces = []
    for i in slots:
        gens = list(c.generators)
        gens[i] = u
        pieces.append(Cone(c.rank, gens))
    return tuple(pieces)


def star_subdivide(f: Fan, u: IntegerVector) -> Fan:
    """Star subdivision of ``f`` at the primitive lattice point ``u``.

    Cones not containing ``u`` are untouched; every cone containing ``u``
    (necessarily in the relative interior of one of its faces) is replaced
    by its star subdivision.  Raises :class:`SupportError` when ``u`` lies
    outside the support of ``f``.
    """
    if not is_primitive(u):
        raise DegenerateInputError(f"subdivision ray {u} must be primitive")
    new_cones: list[Cone] = []
    touched = False
    for c in f.sorted_cones():
        if c.contains(u):
            touched = True
            new_cones.extend(_subdivide_cone(c, u))
        else:
            new_cones.append(c)
    if not touched:
        raise SupportError(f"{u} lies outside the support of the fan")
    return Fan(f.rank, new_cones)


def _normalized_inequality(
    coeffs: Sequence[Fraction], rhs: Fraction
) -> tuple[tuple[int, ...], int]:
    # Scale by the positive lcm of denominators, then divide by the gcd.
    denoms = [c.denominator for c in coeffs] + [rhs.denominator]
    scale = 1
    for d in denoms:
        scale = scale * d // math.gcd(scale, d)
    ints = [int(c * scale) for c in coeffs] + [int(rhs * scale)]
    g = math.gcd(*[abs(x) for x in ints]) or 1
    ints = [x // g for x in ints]
    return tuple(ints[:-1]), ints[-1]


def _fm_feasible(num_vars: int, constraints: list[tuple[tuple[int, ...], int]]) -> bool:
    """Feasibility of ``coeffs . w >= rhs`` systems by Fourier-Motzkin."""
    system = {c for c in constraints}
    for k in range(num_vars):
        pos, neg, rest = [], [], set()
        for coeffs, rhs in system:
            if coeffs[k] > 0:
                pos.append((coeffs, rhs))
            elif coeffs[k] < 0:
                neg.append((coeffs, rhs))
            else:
                rest.add((coeffs, rhs))
        for (cp, rp) in pos:
            for (cn, rn) in neg:
                # cp[k] * cn - cn[k] * cp eliminates w_k with a positive combination
                a, b = cp[k], -cn[k]
                coeffs = tuple(
                    Fraction(b * x + a * y) for x, y in zip(cp, cn)
                )
                rhs = Fraction(b * rp + a * rn)
                rest.add(_normalized_inequality(coeffs, rhs))
        system = rest
    return all(rhs <= 0 for _, rhs in system)


def _meet_in_common_face(sigma: Cone, tau: Cone) -> bool:
    """Whether two cones intersect exactly in the face they share.

    A certificate is a linear functional vanishing on the common rays,
    strictly positive on the remaining rays of one cone and strictly
    negative on those of the other; such a functional exists precisely when
    the intersection is a common face.
    """
    common = set(sigma.generators) & set(tau.generators)
    s_only = [g for g in sigma.generators if g not in common]
    t_only = [g for g in tau.generators if g not in common]
    if not s_only and not t_only:
        return True
    n = sigma.rank
    constraints: list[tuple[tuple[int, ...], int]] = []
    for g in common:
        constraints.append((g.entries, 0))
        constraints.append((tuple(-e for e in g.entries), 0))
    for g in s_only:
        constraints.append((g.entries, 1))
    for g in t_only:
        constraints.append((tuple(-e for e in g.entries), 1))
    return _fm_feasible(n, constraints)


def validate_fan(f: Fan) -> bool:
    """True iff every pairwise intersection of cones is a common face."""
    cones = f.sorted_cones()
    for a, b in itertools.combinations(cones, 2):
        if not _meet_in_common_face(a, b):
            return False
    return True
