"""Command-line frontend.

Subcommands: classify, scan, trace, cylinders, fourey, witness, twist.
All outputs are JSON or CSV with exact rationals rendered as strings; floats
appear only in the SVG renderer.  Exit codes: 0 success, 2 usage error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from math import gcd
from typing import Optional

from .exact import SqrtLength, frac_str
from .classify import (
    DRIFT,
    PERIODIC,
    ClassificationError,
    MethodDisagreement,
    classify_all,
    classify_oracle,
    classify_x,
    classify_y,
)
from .flow import FlowBudgetError, SIDE_NAMES, cylinder_decomposition
from .grouptheory import (
    ContinuedFraction,
    GroupWord,
    convergents,
    eval_word,
    find_witness,
    fourey_direction,
    fourey_word,
    is_in_gamma,
    recurrence_classify,
    rho,
)
from .mucube3d import (
    InternalGeometryError,
    Point3,
    SEED_CHART,
    SEED_FACE,
    trace3d,
    twist_length_prediction,
    twist_slope,
)
from .surfaces import SurfaceConstructionError, build_x, build_y

USAGE_ERROR = 2
INTERNAL_ERROR = 3

CSV_HEADER = "p,q,verdict,core_multiplier,drift_x,drift_y,drift_z"

_CLASSIFIERS = {
    "all": classify_all,
    "oracle": classify_oracle,
    "x": classify_x,
    "y": classify_y,
}


def _out_path(path: str) -> str:
    base = os.environ.get("MUCUBE_OUTDIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _serialize_certificate(cert: dict) -> dict:
    out = {}
    for key, val in cert.items():
        if key == "per_method":
            out[key] = {m: _serialize_certificate(c) for m, c in val.items()}
        elif key == "centers":
            out[key] = [[frac_str(c) for c in pt] for pt in val]
        elif key == "order4_motion":
            out[key] = {"rotation": [list(r) for r in val.rotation],
                        "translation": list(val.translation)}
        elif key == "start":
            out[key] = {"face": list(val.face.center2x), "axis": val.face.axis,
                        "u": frac_str(val.u), "v": frac_str(val.v)}
        elif isinstance(val, tuple):
            out[key] = list(val)
        else:
            out[key] = val
    return out


def _parse_direction(p: int, q: int) -> tuple[int, int, bool]:
    if (p, q) == (0, 0):
        raise ValueError("the zero vector is not a direction")
    g = gcd(abs(p), abs(q))
    return p // g, q // g, g != 1


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    try:
        p, q, reduced = _parse_direction(args.p, args.q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if reduced:
        print(
            f"warning: ({args.p}, {args.q}) is not primitive; reduced to ({p}, {q})",
            file=sys.stderr,
        )
    result = _CLASSIFIERS[args.method]((p, q))
    _emit(
        {
            "p": p,
            "q": q,
            "verdict": result.verdict,
            "method": result.method,
            "certificate": _serialize_certificate(result.certificate),
        }
    )
    return 0


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def scan_pairs(max_n: int) -> list[tuple[int, int]]:
    """All coprime pairs with |p|, |q| <= max_n, one per antipodal class,
    ordered by (p, q)."""
    out = []
    for p in range(0, max_n + 1):
        qs = range(1, max_n + 1) if p == 0 else range(-max_n, max_n + 1)
        for q in qs:
            if gcd(abs(p), abs(q)) == 1:
                out.append((p, q))
    out.sort()
    return out


def _verdict_record(pair_method):
    (p, q), method = pair_method
    cls = _CLASSIFIERS[method]((p, q))
    if cls.verdict == PERIODIC:
        return (p, q, PERIODIC, 4, (0, 0, 0))
    drift = tuple(cls.certificate.get("drift_vector") or cls.certificate["displacement"])
    return (p, q, DRIFT, 0, drift)


def scan_records(max_n: int, method: str = "oracle", jobs: int = 1):
    """Classification records for all scan pairs, deterministic order.

    The verdict of (p, q) is invariant under swapping and sign flips, so each
    symmetry class is classified once and the result is replayed onto all its
    representatives.
    """
    pairs = scan_pairs(max_n)
    canon: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for p, q in pairs:
        key = (max(abs(p), abs(q)), min(abs(p), abs(q)))
        canon.setdefault(key, []).append((p, q))
    tasks = sorted(canon)
    if jobs > 1:
        import multiprocessing

        with multiprocessing.Pool(jobs) as pool:
            results = pool.map(
                _verdict_record, [(t, method) for t in tasks], chunksize=64
            )
    else:
        results = [_verdict_record((t, method)) for t in tasks]
    by_canon = {(r[0], r[1]): r for r in results}

    records = []
    for p, q in pairs:
        key = (max(abs(p), abs(q)), min(abs(p), abs(q)))
        base = by_canon[key]
        if base[2] == PERIODIC:
            records.append((p, q, PERIODIC, 4, (0, 0, 0)))
        else:
            # Drift vectors are reported for the canonical representative;
            # symmetry images carry the same verdict.
            records.append((p, q, DRIFT, 0, base[4]))
    return records


def records_to_csv(records) -> str:
    lines = [CSV_HEADER]
    for p, q, verdict, core, drift in records:
        lines.append(f"{p},{q},{verdict},{core},{drift[0]},{drift[1]},{drift[2]}")
    return "\n".join(lines) + "\n"


def max_angular_gap(records, max_n: Optional[int] = None) -> float:
    """Largest angular gap (radians) between consecutive periodic rays."""
    angles = []
    for p, q, verdict, _, _ in records:
        if max_n is not None and max(abs(p), abs(q)) > max_n:
            continue
        if verdict == PERIODIC:
            a = math.atan2(q, p)
            angles.append(a % (2 * math.pi))
            angles.append((a + math.pi) % (2 * math.pi))
    if not angles:
        return 2 * math.pi
    angles.sort()
    gaps = [b - a for a, b in zip(angles, angles[1:])]
    gaps.append(angles[0] + 2 * math.pi - angles[-1])
    return max(gaps)


def records_to_svg(records) -> str:
    """Self-contained unit-disk picture: rays for periodic directions, dots
    for drift directions (both antipodal representatives drawn)."""
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.1 -1.1 2.2 2.2">',
        '<circle cx="0" cy="0" r="1" fill="none" stroke="#888" stroke-width="0.004"/>',
    ]
    rays = []
    dots = []
    for p, q, verdict, _, _ in records:
        norm = math.hypot(p, q)
        for sx, sy in ((p, q), (-p, -q)):
            x, y = sx / norm, -sy / norm  # SVG y grows downward
            if verdict == PERIODIC:
                rays.append(
                    f'<line x1="0" y1="0" x2="{x:.6f}" y2="{y:.6f}" '
                    f'stroke="#1a4f8a" stroke-width="0.002"/>'
                )
            else:
                dots.append(
                    f'<circle cx="{x:.6f}" cy="{y:.6f}" r="0.0035" fill="#c33"/>'
                )
    parts.extend(rays)
    parts.extend(dots)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_scan(args) -> int:
    if args.max < 1:
        print("error: --max must be at least 1", file=sys.stderr)
        return USAGE_ERROR
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    records = scan_records(args.max, method=args.method, jobs=jobs)
    out = _out_path(args.out)
    try:
        with open(out, "w") as fh:
            fh.write(records_to_csv(records))
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.svg:
        svg_path = _out_path(args.svg)
        try:
            with open(svg_path, "w") as fh:
                fh.write(records_to_svg(records))
        except OSError as exc:
            print(f"error: cannot write {svg_path}: {exc}", file=sys.stderr)
            return USAGE_ERROR
    n_periodic = sum(1 for r in records if r[2] == PERIODIC)
    print(
        f"scanned {len(records)} directions up to {args.max}: "
        f"{n_periodic} periodic, {len(records) - n_periodic} drift; "
        f"max periodic-ray gap {max_angular_gap(records):.6f} rad",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------------------
# trace
# ---------------------------------------------------------------------------

def cmd_trace(args) -> int:
    try:
        p, q, reduced = _parse_direction(args.p, args.q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if reduced:
        print(f"warning: reduced direction to ({p}, {q})", file=sys.stderr)
    try:
        u = Fraction(args.u)
        v = Fraction(args.v)
        start = Point3(SEED_FACE, SEED_CHART, u, v)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: bad start point: {exc}", file=sys.stderr)
        return USAGE_ERROR
    max_s = Fraction(args.max_s) if args.max_s else None
    traj = trace3d(start, (p, q), max_arc_s=max_s, max_crossings=args.max_crossings)
    payload = {
        "direction": [p, q],
        "closed": traj.closed,
        "drift_vector": list(traj.drift_vector) if traj.drift_vector else None,
        "arc_length": str(traj.arc_length),
        "stop_reason": traj.stop_reason,
        "vertices": [[frac_str(c) for c in pt] for pt in traj.vertices],
    }
    if traj.cone_point is not None:
        payload["cone_point"] = [frac_str(c) for c in traj.cone_point]
    _emit(payload)
    if args.csv:
        path = _out_path(args.csv)
        with open(path, "w") as fh:
            fh.write("x,y,z\n")
            for pt in traj.vertices:
                fh.write(",".join(frac_str(c) for c in pt) + "\n")
    return 0


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------

def cmd_cylinders(args) -> int:
    try:
        p, q, reduced = _parse_direction(args.p, args.q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if reduced:
        print(f"warning: reduced direction to ({p}, {q})", file=sys.stderr)
    surf = build_x() if args.surface == "x" else build_y()
    deco = cylinder_decomposition(surf, (p, q))
    _emit(
        {
            "surface": args.surface,
            "direction": [p, q],
            "cylinders": [
                {
                    "circumference": str(c.circumference),
                    "circumference_multiplier": c.circumference_multiplier,
                    "width": str(c.width),
                    "area": frac_str(c.area),
                    "squares": sorted(set(c.squares)),
                    "intervals": [
                        [sq, SIDE_NAMES[side], frac_str(lo), frac_str(hi)]
                        for (sq, side), lo, hi in c.intervals
                    ],
                }
                for c in deco.cylinders
            ],
            "total_area": frac_str(deco.total_area),
        }
    )
    return 0


# ---------------------------------------------------------------------------
# fourey
# ---------------------------------------------------------------------------

def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def cmd_fourey(args) -> int:
    try:
        coeffs = _parse_int_list(args.coeffs)
        period = _parse_int_list(args.period) if args.period else []
        cf = ContinuedFraction.fourey(coeffs, period)
    except (ValueError, IndexError) as exc:
        print(f"error: bad coefficients: {exc}", file=sys.stderr)
        return USAGE_ERROR
    payload = {
        "coefficients": coeffs,
        "period": period,
        "partial_quotients": cf.quotients(len(coeffs) - 1 + 2 * len(period)),
        "recurrence_class": recurrence_classify(cf),
    }
    if cf.finite:
        value = cf.value()
        direction = fourey_direction(coeffs)
        word = fourey_word(coeffs)
        m = eval_word(word)
        payload.update(
            {
                "slope": frac_str(value),
                "direction": list(direction),
                "word": str(word),
                "word_first_column": [m[0], m[2]],
                "in_gamma": is_in_gamma(word),
                "convergents": [[pn, qn] for pn, qn in convergents(cf, cf.depth())],
                "verdict": classify_all(direction).verdict,
            }
        )
    _emit(payload)
    return 0


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------

def cmd_witness(args) -> int:
    try:
        p, q, reduced = _parse_direction(args.p, args.q)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if reduced:
        print(f"warning: reduced direction to ({p}, {q})", file=sys.stderr)
    word = find_witness((p, q), max_depth=args.max_depth)
    if word is None:
        _emit(
            {
                "p": p,
                "q": q,
                "found": False,
                "max_depth": args.max_depth,
                "note": "no witness within depth; inconclusive by itself",
            }
        )
        return 0
    m = eval_word(word)
    r = rho(word)
    _emit(
        {
            "p": p,
            "q": q,
            "found": True,
            "word": str(word),
            "matrix": [[m[0], m[1]], [m[2], m[3]]],
            "rho": [[r[0], r[1]], [r[2], r[3]]],
            "depth": sum(abs(e) for _, e in word.letters),
        }
    )
    return 0


# ---------------------------------------------------------------------------
# twist
# ---------------------------------------------------------------------------

def _parse_slope(text: str) -> Optional[Fraction]:
    if text.lower() in ("inf", "infinity", "oo"):
        return None
    return Fraction(text)


def _slope_direction(s: Optional[Fraction]) -> tuple[int, int]:
    if s is None:
        return (0, 1)
    return (s.denominator, s.numerator)


def cmd_twist(args) -> int:
    try:
        slope = _parse_slope(args.slope)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: bad slope: {exc}", file=sys.stderr)
        return USAGE_ERROR
    direction = _slope_direction(slope)
    before = classify_all(direction)
    if before.verdict != PERIODIC:
        print(
            f"error: slope {args.slope} is not a periodic slope "
            "(the twist is defined on periodic trajectories)",
            file=sys.stderr,
        )
        return USAGE_ERROR
    try:
        out_slope = twist_slope(slope, args.axis, args.k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    out_dir = _slope_direction(out_slope)
    after = classify_all(out_dir)
    axis_dir = (0, 1) if args.axis == "vertical" else (1, 0)
    nv = axis_dir[0] ** 2 + axis_dir[1] ** 2
    length = twist_length_prediction(
        SqrtLength.of(4, nv),
        SqrtLength.of(Fraction(1, nv), nv),
        (axis_dir, direction),
        args.k,
        SqrtLength.of(4, direction[0] ** 2 + direction[1] ** 2),
    ) if args.k != 0 else SqrtLength.of(4, direction[0] ** 2 + direction[1] ** 2)
    _emit(
        {
            "slope_in": args.slope,
            "axis": args.axis,
            "k": args.k,
            "slope_out": "inf" if out_slope is None else frac_str(out_slope),
            "direction_out": list(out_dir),
            "verdict_out": after.verdict,
            "predicted_length": str(length),
        }
    )
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mucube",
        description="Exact periodicity analysis of the straight-line flow on "
        "the triply periodic half-translation surface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="decide periodic vs drift for a direction")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--method", choices=sorted(_CLASSIFIERS), default="all")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("scan", help="classify all directions up to a bound")
    s.add_argument("--max", type=int, required=True)
    s.add_argument("--out", required=True, help="CSV output path")
    s.add_argument("--svg", help="optional SVG output path")
    s.add_argument("--jobs", type=int, default=0, help="parallel workers (default: all cores)")
    s.add_argument("--method", choices=sorted(_CLASSIFIERS), default="oracle")
    s.set_defaults(func=cmd_scan)

    t = sub.add_parser("trace", help="trace the flow in the 3D embedding")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--q", type=int, required=True)
    t.add_argument("--u", default="1/2", help="start chart coordinate")
    t.add_argument("--v", default="1/2", help="start chart coordinate")
    t.add_argument("--max-s", dest="max_s", help="bound on the unfolded parameter")
    t.add_argument("--max-crossings", dest="max_crossings", type=int, default=100000)
    t.add_argument("--csv", help="also write vertices as CSV")
    t.set_defaults(func=cmd_trace)

    cy = sub.add_parser("cylinders", help="cylinder decomposition of a quotient")
    cy.add_argument("--surface", choices=("x", "y"), required=True)
    cy.add_argument("--p", type=int, required=True)
    cy.add_argument("--q", type=int, required=True)
    cy.set_defaults(func=cmd_cylinders)

    f = sub.add_parser("fourey", help="continued fractions over multiples of four")
    f.add_argument("--coeffs", required=True, help="comma-separated a_i")
    f.add_argument("--period", help="repeating block of a_i for infinite fractions")
    f.set_defaults(func=cmd_fourey)

    w = sub.add_parser("witness", help="search a group word certifying periodicity")
    w.add_argument("--p", type=int, required=True)
    w.add_argument("--q", type=int, required=True)
    w.add_argument("--max-depth", dest="max_depth", type=int, default=14)
    w.set_defaults(func=cmd_witness)

    tw = sub.add_parser("twist", help="twist a periodic slope around an axis direction")
    tw.add_argument("--slope", required=True, help="rational slope or 'inf'")
    tw.add_argument("--axis", choices=("vertical", "horizontal"), required=True)
    tw.add_argument("--k", type=int, required=True)
    tw.set_defaults(func=cmd_twist)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MethodDisagreement as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        for r in exc.results:
            print(f"  {r.method}: {r.verdict} {r.certificate}", file=sys.stderr)
        return INTERNAL_ERROR
    except (
        ClassificationError,
        FlowBudgetError,
        InternalGeometryError,
        SurfaceConstructionError,
    ) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
