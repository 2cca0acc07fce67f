"""Command-line surface.

Subcommands: classify, resolve, blowup, hilbert, hj, cartify, glue-check.
Exit codes: 0 success, 2 precondition violation, 3 parse error, 4 internal
assertion (a decreasing measure failed, which certifies a bug).  The env
var ``QRES_MAX_DEGREE`` overrides the default truncation bound of 12.
All reports are byte-deterministic for fixed inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from random import Random
from typing import Optional

from . import fanfile
from .cones_fans import Cone, multiplicity
from .errors import (
    FanParseError,
    MeasureError,
    PreconditionError,
    QresError,
)
from .exact_lattice import IntegerVector
from .hj_oracle import hj_expansion, hj_rays
from .quotient_classifier import (
    CyclicQuotientType,
    cone_characters,
    cone_descriptor,
    parse_quotient_literal,
)
from .resolution_engine import MarkedFan, blowup_step, replay, resolve
from .weighted_filtration import (
    WeightedFiltration,
    _cartify_raw,
    glue_check,
    invariant_generators_raw,
    sample_divisor_fixing_automorphism,
)


def _max_degree() -> int:
    raw = os.environ.get("QRES_MAX_DEGREE", "")
    try:
        return int(raw) if raw else 12
    except ValueError:
        raise QresError(f"QRES_MAX_DEGREE must be an integer, got {raw!r}")


def _print_json(payload) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def _fmt_vec(v: IntegerVector) -> str:
    return "(" + ",".join(str(e) for e in v.entries) + ")"


def _fmt_cone(c: Cone) -> str:
    return "<" + ", ".join(_fmt_vec(g) for g in c.generators) + ">"


def _load_fan(path: str) -> MarkedFan:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FanParseError(f"cannot read {path}: {exc.strerror}")
    return fanfile.parse_fan(text)


# ---------------------------------------------------------------------------
# classify


def _cmd_classify(args) -> int:
    m = _load_fan(args.file)
    p = m.characteristic
    report = []
    for i, cone in enumerate(m.fan.sorted_cones(), start=1):
        desc = cone_descriptor(cone)
        entry = {
            "cone": [_fmt_vec(g) for g in cone.generators],
            "multiplicity": str(multiplicity(cone)),
            "invariants": [str(d) for d in desc.nontrivial],
            "cyclic": desc.cyclic,
        }
        if desc.cyclic and desc.cqs is not None:
            order, chars = cone_characters(cone)
            entry["type"] = str(desc.cqs)
            entry["tame"] = p == 0 or order % p != 0
            entry["faithful_rays"] = [
                _fmt_vec(g)
                for g, c in zip(cone.generators, chars)
                if math.gcd(c, order) == 1
            ]
        report.append(entry)
    if args.json:
        _print_json(
            {
                "rank": str(m.fan.rank),
                "characteristic": str(p),
                "cones": report,
            }
        )
        return 0
    print(f"fan: rank {m.fan.rank}, characteristic {p}, {len(report)} cone(s)")
    for i, entry in enumerate(report, start=1):
        print(f"cone {i}: <{', '.join(entry['cone'])}>")
        print(f"  multiplicity: {entry['multiplicity']}")
        if entry["cyclic"]:
            print(f"  type: {entry.get('type')}")
            print(f"  tame: {'yes' if entry.get('tame') else 'no'}")
            rays = entry.get("faithful_rays", [])
            print(f"  faithful rays: {', '.join(rays) if rays else 'none'}")
        else:
            chain = " | ".join(entry["invariants"])
            print(f"  not cyclic: invariant factors {chain}")
    return 0


# ---------------------------------------------------------------------------
# resolve / blowup


def _oracle_rays_for(cone: Cone) -> list[IntegerVector]:
    """Minimal-resolution rays of a singular 2D cone, in ambient coordinates."""
    order, chars = cone_characters(cone)
    g1, g2 = cone.generators
    c1, c2 = chars
    if math.gcd(c2, order) == 1:
        first, div, a = g1, g2, (c1 * pow(c2, -1, order)) % order
    else:
        first, div, a = g2, g1, (c2 * pow(c1, -1, order)) % order
    # image of e2 under the unimodular map sending the standard cone here
    mid = IntegerVector(
        [(d + a * f) // order for d, f in zip(div.entries, first.entries)]
    )
    out = []
    for ray in hj_rays(order, a):
        x, y = ray.entries
        out.append(
            IntegerVector(
                [x * f + y * mdd for f, mdd in zip(first.entries, mid.entries)]
            )
        )
    return out


def _trace_summary(trace, as_json: bool) -> None:
    if as_json:
        payload = {
            "steps": str(len(trace.steps)),
            "exceptional_rays": [[str(e) for e in u.entries] for u in trace.exceptional_rays],
            "final_cones": str(len(trace.final.fan.cones)),
            "smooth": trace.all_smooth,
            "phases": [s.phase for s in trace.steps],
        }
        _print_json(payload)
        return
    print(f"steps: {len(trace.steps)}")
    for i, step in enumerate(trace.steps, start=1):
        added = ", ".join(_fmt_vec(u) for u in step.added_rays)
        inv = step.invariant_before
        nontame = sum(1 for charts in step.charts for ch in charts if not ch.tame)
        extra = f", non-tame charts: {nontame}" if nontame else ""
        print(
            f"  step {i} [{step.phase}] at order {inv[0]} x{inv[1]}: "
            f"added {added}{extra}"
        )
    print(f"final fan: {len(trace.final.fan.cones)} cone(s), smooth: "
          f"{'yes' if trace.all_smooth else 'no'}")


def _cmd_resolve(args) -> int:
    m = _load_fan(args.file)
    if args.char is not None:
        m = MarkedFan(m.fan, m.marked_rays, args.char)
    trace = resolve(m)
    assert replay(m, trace) == trace.final.fan
    if args.emit_trace:
        Path(args.emit_trace).write_text(fanfile.emit_trace(trace), encoding="utf-8")
    if args.oracle_check:
        if m.fan.rank != 2:
            raise PreconditionError("--oracle-check requires a rank-2 fan")
        final_rays = set(trace.final.fan.rays())
        checked = 0
        for cone in m.fan.sorted_cones():
            if multiplicity(cone) == 1:
                continue
            for ray in _oracle_rays_for(cone):
                if ray not in final_rays:
                    raise MeasureError(
                        f"oracle ray {ray} missing from the resolved fan"
                    )
                checked += 1
        if not args.json:
            print(f"oracle check: ok ({checked} rays verified)")
    _trace_summary(trace, args.json)
    return 0


def _cmd_blowup(args) -> int:
    m = _load_fan(args.file)
    new_m, record = blowup_step(m)
    if args.emit:
        Path(args.emit).write_text(fanfile.emit_fan(new_m), encoding="utf-8")
    if args.json:
        payload = {
            "added": [[str(e) for e in u.entries] for u in record.added_rays],
            "centers": [
                {
                    "cone": [_fmt_vec(g) for g in center.cone.generators],
                    "order": str(center.order),
                    "weights": [str(w) for w in center.weights],
                    "charts": [
                        {"type": str(ch.chart_type), "order": str(ch.order), "tame": ch.tame}
                        for ch in charts
                    ],
                }
                for center, charts in zip(record.centers, record.charts)
            ],
        }
        _print_json(payload)
        return 0
    for center, charts in zip(record.centers, record.charts):
        print(f"center {_fmt_cone(center.cone)} of order {center.order}")
        print(f"  ray: {_fmt_vec(center.ray)}  weights: {center.weights}")
        for ch in charts:
            tame = "tame" if ch.tame else "non-tame"
            print(f"  chart {ch.chart_type} ({tame}), order {ch.order}")
    return 0


# ---------------------------------------------------------------------------
# tools


def _cmd_hilbert(args) -> int:
    order, chars = parse_quotient_literal(args.type)
    bound = args.bound if args.bound is not None else _max_degree()
    gens = invariant_generators_raw(order, chars, bound)
    ordered = sorted(gens, key=lambda mn: (mn.total_degree, mn.exponents))
    if args.json:
        _print_json(
            {
                "type": args.type.strip(),
                "bound": str(bound),
                "generators": [[str(e) for e in mn.exponents] for mn in ordered],
            }
        )
        return 0
    print(", ".join(str(mn) for mn in ordered) if ordered else "(none)")
    return 0


def _cmd_hj(args) -> int:
    exp = hj_expansion(args.l, args.a)
    if args.json:
        payload = {
            "l": str(args.l),
            "a": str(args.a),
            "coefficients": [str(b) for b in exp.coefficients],
        }
        if args.rays:
            payload["rays"] = [[str(e) for e in r.entries] for r in hj_rays(args.l, args.a)]
        _print_json(payload)
        return 0
    print("[" + ",".join(str(b) for b in exp.coefficients) + "]")
    if args.rays:
        print(" ".join(_fmt_vec(r) for r in hj_rays(args.l, args.a)))
    return 0


def _cmd_cartify(args) -> int:
    order, chars = parse_quotient_literal(args.type)
    if not 1 <= args.ray <= len(chars):
        raise PreconditionError(
            f"--ray must be between 1 and {len(chars)} (1-based coordinate)"
        )
    new_order, new_chars = _cartify_raw(order, chars, args.ray - 1)
    result = CyclicQuotientType(new_order, new_chars)
    if args.json:
        _print_json({"input": args.type.strip(), "ray": str(args.ray), "result": str(result)})
        return 0
    print(str(result))
    return 0


def _cmd_glue_check(args) -> int:
    order, chars = parse_quotient_literal(args.type)
    if math.gcd(chars[-1], order) != 1:
        raise PreconditionError(
            f"last coordinate of 1/{order}{chars} must carry a unit character"
        )
    s = pow(chars[-1], -1, order)
    weights = tuple((s * c) % order for c in chars)
    w = WeightedFiltration(order, weights)
    bound = args.kmax if args.kmax is not None else _max_degree()
    rng = Random(args.seed)
    passed = 0
    for _ in range(args.samples):
        phi = sample_divisor_fixing_automorphism(w, rng, truncation=bound)
        if glue_check(w, phi, bound):
            passed += 1
    ok = passed == args.samples
    if args.json:
        _print_json(
            {
                "type": args.type.strip(),
                "samples": str(args.samples),
                "passed": str(passed),
                "seed": str(args.seed),
                "truncation": str(bound),
                "ok": ok,
            }
        )
    else:
        print(f"glue check: {passed}/{args.samples} substitutions preserve the filtration")
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qres",
        description="classify and resolve diagonal cyclic quotient singularities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="per-cone quotient report for a fan file")
    c.add_argument("file")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=_cmd_classify)

    r = sub.add_parser("resolve", help="resolve a marked fan file")
    r.add_argument("file")
    r.add_argument("--char", type=int, default=None, help="override the characteristic")
    r.add_argument("--emit-trace", metavar="OUT", default=None)
    r.add_argument("--oracle-check", action="store_true",
                   help="rank 2: verify the final rays contain the classical minimal rays")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=_cmd_resolve)

    b = sub.add_parser("blowup", help="one simultaneous blow-up step")
    b.add_argument("file")
    b.add_argument("--emit", metavar="OUT", default=None)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=_cmd_blowup)

    h = sub.add_parser("hilbert", help="truncated invariant-algebra generators")
    h.add_argument("type", help="quotient type literal, e.g. 1/3(1,1)")
    h.add_argument("--bound", type=int, default=None)
    h.add_argument("--json", action="store_true")
    h.set_defaults(func=_cmd_hilbert)

    j = sub.add_parser("hj", help="continued-fraction expansion of l/a")
    j.add_argument("l", type=int)
    j.add_argument("a", type=int)
    j.add_argument("--rays", action="store_true")
    j.add_argument("--json", action="store_true")
    j.set_defaults(func=_cmd_hj)

    k = sub.add_parser("cartify", help="kernel of the character across one ray")
    k.add_argument("type", help="quotient type literal, e.g. 1/6(2,3,1)")
    k.add_argument("--ray", type=int, required=True,
                   help="1-based coordinate index into the literal as typed")
    k.add_argument("--json", action="store_true")
    k.set_defaults(func=_cmd_cartify)

    g = sub.add_parser("glue-check", help="sampled filtration-invariance check")
    g.add_argument("type", help="quotient type literal with unit last character")
    g.add_argument("--samples", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--kmax", type=int, default=None)
    g.add_argument("--json", action="store_true")
    g.set_defaults(func=_cmd_glue_check)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FanParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except MeasureError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 4
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QresError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
