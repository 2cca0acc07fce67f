"""Iterated weighted blow-up of marked fans until every chart is smooth.

The state is a fan with an ordered list of marked divisor rays and a base
characteristic.  Each step star-subdivides every cone of the targeted
multiplicity at the lattice point determined by its unit-normalized
characters, appends the new exceptional rays to the marking, and records
enough data to replay the computation exactly.

Two kinds of step alternate: ordinary steps target the cones of maximal
multiplicity; whenever charts of order divisible by the characteristic
appear, dedicated steps target the maximal such order first, using the
freshest marked ray with unit character (largest creation index) as the
divisor.  Both measures decrease strictly, which is asserted at runtime.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .cones_fans import Cone, Fan, _subdivide_cone, multiplicity, star_subdivide
from .errors import (
    DegenerateInputError,
    MeasureError,
    NoFaithfulDivisorError,
    PreconditionError,
    ReplayError,
    SupportError,
)
from .exact_lattice import IntegerVector, is_primitive, primitive
from .quotient_classifier import (
    CyclicQuotientType,
    _validate_characteristic,
    cone_characters,
    standard_cone_with_divisor,
)

PHASE_MAX_ORDER = "max-order"
PHASE_NON_TAME = "non-tame"

_STEP_BUDGET = 100_000


@dataclass(frozen=True)
class MarkedFan:
    """Fan with ordered marked divisor rays and a base characteristic."""

    fan: Fan
    marked_rays: tuple[IntegerVector, ...]
    characteristic: int

    def __init__(
        self,
        fan: Fan,
        marked_rays: Iterable[IntegerVector],
        characteristic: int = 0,
    ):
        marked = tuple(marked_rays)
        _validate_characteristic(characteristic)
        rays = set(fan.rays())
        for ray in marked:
            if ray not in rays:
                raise PreconditionError(f"marked ray {ray} is not a ray of the fan")
        object.__setattr__(self, "fan", fan)
        object.__setattr__(self, "marked_rays", marked)
        object.__setattr__(self, "characteristic", int(characteristic))


@dataclass(frozen=True)
class Center:
    """One targeted cone with its subdivision data.

    ``weights`` are the cone's characters rescaled so the chosen divisor
    ray has character 1; ``ray`` is the lattice point with barycentric
    coordinates ``weights / order`` in the cone generators.
    """

    cone: Cone
    ray: IntegerVector
    divisor_ray: IntegerVector
    divisor_index: int
    order: int
    weights: tuple[int, ...]


@dataclass(frozen=True)
class ChartRecord:
    """Quotient data of one cone created by a subdivision."""

    cone: Cone
    order: int
    chart_type: CyclicQuotientType
    tame: bool
    exceptional_character: int


@dataclass(frozen=True)
class StepRecord:
    """Everything one step did, sufficient for replay and certification."""

    phase: str
    centers: tuple[Center, ...]
    added_rays: tuple[IntegerVector, ...]
    charts: tuple[tuple[ChartRecord, ...], ...]
    invariant_before: tuple[int, int]
    invariant_after: tuple[int, int]
    nontame_before: Optional[tuple[int, int]]
    nontame_after: Optional[tuple[int, int]]


@dataclass(frozen=True)
class ResolutionTrace:
    """Ordered step records plus the final state."""

    input_digest: str
    steps: tuple[StepRecord, ...]
    final: MarkedFan

    @property
    def ray_groups(self) -> tuple[tuple[IntegerVector, ...], ...]:
        return tuple(step.added_rays for step in self.steps)

    @property
    def all_smooth(self) -> bool:
        return all(multiplicity(c) == 1 for c in self.final.fan.cones)

    @property
    def exceptional_rays(self) -> tuple[IntegerVector, ...]:
        return tuple(u for group in self.ray_groups for u in group)


def fan_digest(m: MarkedFan) -> str:
    payload = {
        "rank": m.fan.rank,
        "characteristic": m.characteristic,
        "cones": [[list(g.entries) for g in c.generators] for c in m.fan.sorted_cones()],
        "marked": [list(r.entries) for r in m.marked_rays],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def invariant(m: MarkedFan) -> tuple[int, int]:
    """Maximal cone multiplicity and how many maximal cones attain it."""
    mults = []
    for cone in m.fan.sorted_cones():
        cone_characters(cone)  # raises UnsupportedInputError when not cyclic
        mults.append(multiplicity(cone))
    top = max(mults)
    return top, sum(1 for x in mults if x == top)


def _nontame_invariant(m: MarkedFan) -> Optional[tuple[int, int]]:
    p = m.characteristic
    if p == 0:
        return None
    bad = [
        multiplicity(c)
        for c in m.fan.cones
        if multiplicity(c) > 1 and multiplicity(c) % p == 0
    ]
    if not bad:
        return None
    top = max(bad)
    return top, sum(1 for x in bad if x == top)


def _center_for(m: MarkedFan, cone: Cone) -> Center:
    order, chars = cone_characters(cone)
    if order == 1:
        raise PreconditionError(f"{cone} is already smooth")
    gens = cone.generators
    unit_marked = []
    for idx, ray in enumerate(m.marked_rays):
        if ray in gens and math.gcd(chars[gens.index(ray)], order) == 1:
            unit_marked.append((idx, ray))
    if not unit_marked:
        raise NoFaithfulDivisorError(
            f"no marked ray of {cone} (order {order}) carries a unit character"
        )
    divisor_index, divisor_ray = max(unit_marked, key=lambda t: t[0])
    pos = gens.index(divisor_ray)
    s = pow(chars[pos], -1, order)
    weights = tuple((s * c) % order for c in chars)
    num = [0] * cone.rank
    for w, g in zip(weights, gens):
        for j in range(cone.rank):
            num[j] += w * g.entries[j]
    assert all(x % order == 0 for x in num), "center is not a lattice point"
    ray = IntegerVector([x // order for x in num])
    assert is_primitive(ray), "center ray must be primitive"
    return Center(cone, ray, divisor_ray, divisor_index, order, weights)


def select_center(m: MarkedFan) -> tuple[Center, ...]:
    """Centers for every cone of maximal multiplicity.

    Per cone, the divisor is the unit-character marked ray with the largest
    creation index; the subdivision ray follows from the divisor-normalized
    characters.
    """
    top, _ = invariant(m)
    if top == 1:
        raise PreconditionError("fan is already smooth; nothing to select")
    targets = [c for c in m.fan.sorted_cones() if multiplicity(c) == top]
    return tuple(_center_for(m, c) for c in targets)


def _local_charts(center: Center, characteristic: int) -> tuple[ChartRecord, ...]:
    pieces = _subdivide_cone(center.cone, center.ray)
    expected = sorted(w for w in center.weights if w > 0)
    got = sorted(multiplicity(piece) for piece in pieces)
    assert got == expected, f"chart orders {got} differ from weights {expected}"
    records = []
    for piece in sorted(pieces, key=Cone.sort_key):
        order, chars = cone_characters(piece)
        pos = piece.generators.index(center.ray)
        exc = chars[pos]
        # the exceptional character is the center order mod the chart order,
        # hence a unit exactly when those two orders are coprime; singular
        # charts always keep the old divisor ray, whose character is -1
        if math.gcd(center.order, order) == 1:
            assert math.gcd(exc, order) == 1, "exceptional character must be a unit"
        if order > 1:
            assert center.divisor_ray in piece.generators
            dpos = piece.generators.index(center.divisor_ray)
            assert math.gcd(chars[dpos], order) == 1, "divisor ray lost faithfulness"
        tame = characteristic == 0 or order % characteristic != 0
        records.append(
            ChartRecord(piece, order, CyclicQuotientType(order, chars), tame, exc)
        )
    return tuple(records)


def _apply_step(m: MarkedFan, targets: list[Cone], phase: str) -> tuple[MarkedFan, StepRecord]:
    inv_before = invariant(m)
    nt_before = _nontame_invariant(m)
    centers = tuple(_center_for(m, c) for c in sorted(targets, key=Cone.sort_key))
    added = tuple(sorted({c.ray for c in centers}, key=lambda v: v.entries))
    fan = m.fan
    for u in added:
        fan = star_subdivide(fan, u)
    new_m = MarkedFan(fan, m.marked_rays + added, m.characteristic)
    charts = tuple(_local_charts(center, m.characteristic) for center in centers)
    record = StepRecord(
        phase=phase,
        centers=centers,
        added_rays=added,
        charts=charts,
        invariant_before=inv_before,
        invariant_after=invariant(new_m),
        nontame_before=nt_before,
        nontame_after=_nontame_invariant(new_m),
    )
    return new_m, record


def blowup_step(m: MarkedFan) -> tuple[MarkedFan, StepRecord]:
    """One simultaneous blow-up of all cones of maximal multiplicity."""
    top, _ = invariant(m)
    if top == 1:
        raise PreconditionError("fan is already smooth")
    targets = [c for c in m.fan.sorted_cones() if multiplicity(c) == top]
    return _apply_step(m, targets, PHASE_MAX_ORDER)


def _check_step_measure(record: StepRecord) -> None:
    if record.phase == PHASE_NON_TAME:
        before, after = record.nontame_before, record.nontame_after
        if before is None or (after is not None and after >= before):
            raise MeasureError(
                f"non-tame measure did not decrease: {before} -> {after}"
            )
        if record.invariant_after > record.invariant_before:
            raise MeasureError("global measure increased during a non-tame step")
    else:
        if record.invariant_after >= record.invariant_before:
            raise MeasureError(
                f"measure did not decrease: {record.invariant_before} -> "
                f"{record.invariant_after}"
            )


def resolve(m: MarkedFan) -> ResolutionTrace:
    """Blow up until every cone is smooth, recording a replayable trace.

    Requires every cone's quotient to be cyclic and every singular cone to
    have a marked ray with unit character; both are rechecked as new charts
    appear.  Charts of order divisible by the characteristic are eliminated
    before the next ordinary step, always using the freshest faithful
    marking, and the recorded measures are asserted to decrease.
    """
    for cone in m.fan.sorted_cones():
        if multiplicity(cone) > 1:
            _center_for(m, cone)
    steps: list[StepRecord] = []
    current = m
    while len(steps) <= _STEP_BUDGET:
        nt = _nontame_invariant(current)
        if nt is not None:
            targets = [
                c for c in current.fan.sorted_cones() if multiplicity(c) == nt[0]
            ]
            current, record = _apply_step(current, targets, PHASE_NON_TAME)
        elif invariant(current)[0] > 1:
            current, record = blowup_step(current)
        else:
            break
        _check_step_measure(record)
        steps.append(record)
    else:
        raise MeasureError("step budget exceeded; measure failed to make progress")
    assert all(multiplicity(c) == 1 for c in current.fan.cones)
    return ResolutionTrace(fan_digest(m), tuple(steps), current)


def replay(m: MarkedFan, trace) -> Fan:
    """Re-apply the recorded subdivisions; exact agreement is enforced.

    Accepts anything exposing ``input_digest``, ``ray_groups`` and
    ``final`` the way :class:`ResolutionTrace` does.
    """
    if fan_digest(m) != trace.input_digest:
        raise ReplayError("trace was produced from a different input")
    fan = m.fan
    try:
        for group in trace.ray_groups:
            for u in group:
                fan = star_subdivide(fan, u)
    except (SupportError, DegenerateInputError) as exc:
        raise ReplayError(f"recorded ray cannot be applied: {exc}") from exc
    if fan != trace.final.fan:
        raise ReplayError("replayed fan differs from the recorded final fan")
    return fan


def standard_marked_fan(q: CyclicQuotientType, characteristic: int = 0) -> MarkedFan:
    """Fan of the standard cone of ``q`` with its divisor ray marked."""
    cone, divisor = standard_cone_with_divisor(q)
    return MarkedFan(Fan(cone.rank, [cone]), (divisor,), characteristic)


def marked_fan_from_characters(
    order: int, chars: Iterable[int], characteristic: int = 0
) -> MarkedFan:
    """Marked fan of the literal tuple, preserving coordinate positions.

    Characters are rescaled so the last one equals 1 (it must be a unit);
    the cone is ``<e_1, ..., e_{n-1}, order*e_n - sum c_i e_i>`` with the
    last generator marked.  Unlike :func:`standard_marked_fan` this keeps
    the tuple as given instead of canonicalizing, so the fan lives in the
    coordinates the caller wrote down.
    """
    chars = tuple(int(c) % order for c in chars)
    n = len(chars)
    if n < 1:
        raise PreconditionError("need at least one character")
    if math.gcd(chars[-1], order) != 1:
        raise NoFaithfulDivisorError(
            f"last character of 1/{order}{chars} is not a unit"
        )
    s = pow(chars[-1], -1, order)
    scaled = [(s * c) % order for c in chars]
    gens = [
        IntegerVector([1 if j == i else 0 for j in range(n)]) for i in range(n - 1)
    ]
    last = [-a for a in scaled[:-1]] + [order]
    divisor = primitive(IntegerVector(last))
    gens.append(divisor)
    cone = Cone(n, gens)
    return MarkedFan(Fan(n, [cone]), (divisor,), characteristic)
