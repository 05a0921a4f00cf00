"""Command line front end.

Subcommands: ``decide`` (run the approximate decision procedure at a
given delta), ``solve`` (run the per-norm optimizer), ``oracle``
(certified lower bound, plus the exact Linf optimum on tiny instances),
``generate`` (deterministic test instances) and ``svg`` (render a result).

Exit codes: 0 success, 1 certified failure (decide only), 2 usage or
input error.  Exact values travel as "p/q" strings; quadratic values as
{"a", "b", "m"} objects with a float approximation for display.  Result
payloads are byte-identical across reruns with the same inputs and seed;
wall time lives outside the payload.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from typing import Optional

from .geometry import Instance, Norm, ingest, instance_from_json
from .optimize import optimize
from .oracle import MAX_ORACLE_D, MAX_ORACLE_N, exact_linf_optimum, lower_bound_search
from .placement import (
    MatchingUncovered,
    PlacementSuccess,
    SmallPairTooClose,
    check_points,
    placement,
)
from .scalars import QuadScalar, approx_float, format_rational, parse_rational
from .svg import render_svg

USAGE_ERROR = 2


class CliError(Exception):
    pass


def _scalar_json(x):
    if isinstance(x, QuadScalar):
        if x.is_rational:
            return format_rational(x.a)
        return {
            "a": format_rational(x.a),
            "b": format_rational(x.b),
            "m": format_rational(x.m),
            "approx": approx_float(x),
        }
    return format_rational(Fraction(x))


def _halve(v):
    # undo ingestion scaling without touching floats
    if isinstance(v, int):
        return Fraction(v, 2)
    return v / 2


def _point_json(p):
    x = _halve(p.x)
    y = _halve(p.y)
    return {
        "x": _scalar_json(x),
        "y": _scalar_json(y),
        "approx": [approx_float(x), approx_float(y)],
    }


def _load_instance(path: str) -> tuple[Instance, str, list]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        raw = instance_from_json(text)
        inst = ingest(raw)
    except (OSError, ValueError, KeyError, IndexError, TypeError) as exc:
        raise CliError(f"cannot load instance from {path}: {exc}") from None
    digest = hashlib.sha256(
        json.dumps({"rects": [list(r) for r in raw]}, sort_keys=True).encode()
    ).hexdigest()
    return inst, f"sha256:{digest}", raw


def _delta_param(args, norm: Norm) -> Fraction:
    """Scaled grid parameter from the CLI delta flags (input units)."""
    if norm.is_l2:
        if args.delta_squared is None:
            raise CliError("the l2 norm needs --delta-squared p/q")
        if args.delta is not None:
            raise CliError("use --delta-squared (not --delta) with the l2 norm")
        val = parse_rational(args.delta_squared)
        if val <= 0:
            raise CliError("--delta-squared must be positive")
        return val * 4
    if args.delta is None:
        raise CliError(f"the {norm.name} norm needs --delta p/q")
    if args.delta_squared is not None:
        raise CliError("--delta-squared is only for the l2 norm")
    val = parse_rational(args.delta)
    if val <= 0:
        raise CliError("--delta must be positive")
    return val * 2


def _emit(record: dict, output: Optional[str]) -> None:
    text = json.dumps(record, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_probe_log(path: Optional[str], records) -> Optional[str]:
    if not path:
        return None
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return path


def _maybe_svg(args, inst, norm, points, radius) -> None:
    if getattr(args, "svg", None):
        doc = render_svg(inst, points=points, ball_radius=radius, norm=norm)
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(doc)


def cmd_decide(args) -> int:
    norm = Norm.from_name(args.norm)
    inst, digest, _ = _load_instance(args.instance)
    param = _delta_param(args, norm)
    start = time.monotonic()
    out = placement(inst, param, norm, verify=args.verify)
    wall = time.monotonic() - start

    if isinstance(out, PlacementSuccess):
        payload = {
            "outcome": "success",
            "points": [_point_json(p) for p in out.points],
            "matching_size": out.matching_size,
        }
        code = 0
        if norm.is_l2:
            radius = approx_float(QuadScalar.sqrt_of(param / 4)) / 2
        else:
            radius = float(param / 2) / 2
        _maybe_svg(args, inst, norm, out.points, radius)
    else:
        reason = out.reason
        if isinstance(reason, SmallPairTooClose):
            rj = {"kind": "small-pair-too-close", "i": reason.i, "j": reason.j}
        else:
            assert isinstance(reason, MatchingUncovered)
            rj = {"kind": "matching-uncovered", "uncovered": list(reason.uncovered)}
        payload = {
            "outcome": "failure",
            "certificate": "delta exceeds delta*/f",
            "reason": rj,
        }
        code = 1
    record = {
        "command": "decide",
        "norm": norm.name,
        "instance_digest": digest,
        "parameters": {
            ("delta_squared" if norm.is_l2 else "delta"): (
                args.delta_squared if norm.is_l2 else args.delta
            ),
            "verify": bool(args.verify),
        },
        "result": payload,
        "probe_log": None,
        "seed": None,
        "wall_time_s": round(wall, 6),
    }
    _emit(record, args.output)
    return code


def cmd_solve(args) -> int:
    norm = Norm.from_name(args.norm)
    inst, digest, _ = _load_instance(args.instance)
    start = time.monotonic()
    res = optimize(inst, norm)
    wall = time.monotonic() - start

    if args.verify and res.certificate != "identical-points-zero":
        violations = check_points(inst, res.points, res.delta_param_out, norm)
        if violations:
            raise CliError("solver produced an invalid placement: " + "; ".join(violations))

    if norm.is_l2:
        delta_sq = res.delta_param_out / 4
        value = {
            "delta_squared": format_rational(delta_sq),
            "delta_approx": approx_float(QuadScalar.sqrt_of(delta_sq)),
        }
    else:
        delta = res.delta_param_out / 2
        value = {"delta": format_rational(delta), "delta_approx": approx_float(delta)}
    payload = {
        "certificate": res.certificate,
        **value,
        "points": [_point_json(p) for p in res.points],
        "placement_calls": res.placement_calls,
        "next_fail": None
        if res.next_fail is None
        else format_rational(res.next_fail / (4 if norm.is_l2 else 2)),
        "strategy": res.strategy,
    }
    record = {
        "command": "solve",
        "norm": norm.name,
        "instance_digest": digest,
        "parameters": {"verify": bool(args.verify)},
        "result": payload,
        "probe_log": _write_probe_log(args.probe_log, res.probe_log),
        "seed": None,
        "wall_time_s": round(wall, 6),
    }
    if res.certificate != "identical-points-zero":
        if norm.is_l2:
            radius = approx_float(QuadScalar.sqrt_of(res.delta_param_out / 4)) / 2
        else:
            radius = float(res.delta_param_out / 2) / 2
        _maybe_svg(args, inst, norm, res.points, radius)
    _emit(record, args.output)
    return 0


def cmd_oracle(args) -> int:
    norm = Norm.from_name(args.norm)
    inst, digest, _ = _load_instance(args.instance)
    start = time.monotonic()
    lb = lower_bound_search(inst, norm, effort=args.effort, seed=args.seed)
    value_key = "delta_squared" if norm.is_l2 else "delta"
    results = {
        "lower_bound": {
            value_key: format_rational(lb.value / (4 if norm.is_l2 else 2)),
            "method": lb.method,
            "points": [_point_json(p) for p in lb.points],
        }
    }
    if (
        norm.name == "linf"
        and 2 <= inst.n <= MAX_ORACLE_N
        and inst.D <= MAX_ORACLE_D
    ):
        ex = exact_linf_optimum(inst)
        results["exact_optimum"] = {
            "delta": format_rational(ex.value / 2),
            "points": [_point_json(p) for p in ex.points],
        }
    wall = time.monotonic() - start
    record = {
        "command": "oracle",
        "norm": norm.name,
        "instance_digest": digest,
        "parameters": {"effort": args.effort},
        "result": results,
        "probe_log": None,
        "seed": args.seed,
        "wall_time_s": round(wall, 6),
    }
    _emit(record, args.output)
    return 0


def cmd_verify(args) -> int:
    """Re-check a decide/solve result against its instance, exactly."""
    inst, digest, _ = _load_instance(args.instance)
    try:
        with open(args.result, "r", encoding="utf-8") as fh:
            record = json.load(fh)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot load result from {args.result}: {exc}") from None
    if record.get("instance_digest") != digest:
        raise CliError("result file does not match the instance file")
    norm = Norm.from_name(record["norm"])
    payload = record.get("result", {})
    pts_json = payload.get("points")
    if pts_json is None:
        raise CliError("result file carries no points to verify")
    points = [_point_from_json(p) for p in pts_json]

    params = record.get("parameters", {})
    if "delta" in payload:
        param = parse_rational(payload["delta"]) * 2
    elif "delta_squared" in payload:
        param = parse_rational(payload["delta_squared"]) * 4
    elif "delta" in params:
        param = parse_rational(params["delta"]) * 2
    elif "delta_squared" in params:
        param = parse_rational(params["delta_squared"]) * 4
    else:
        raise CliError("result file carries no delta to verify against")

    violations = check_points(inst, points, param, norm)
    report = {
        "command": "verify",
        "norm": norm.name,
        "instance_digest": digest,
        "parameters": {"result": args.result},
        "result": {"valid": not violations, "violations": violations},
        "probe_log": None,
        "seed": None,
        "wall_time_s": 0.0,
    }
    _emit(report, args.output)
    return 0 if not violations else 1


def cmd_generate(args) -> int:
    n, d, seed = args.n, args.d, args.seed
    if n < 1 or d < 2:
        raise CliError("generate needs n >= 1 and d >= 2")
    rng = random.Random(seed)
    kind = args.kind
    rects: list[tuple[int, int, int, int]] = []
    if kind == "stacked-squares":
        rects = [(0, 1, 0, 1)] * n
    elif kind == "points-line":
        if n > d + 1:
            raise CliError("points-line needs n <= d + 1 for distinct points")
        spacing = d // max(1, n - 1) if n > 1 else 0
        spacing = max(1, spacing)
        y = d // 2
        rects = [(min(i * spacing, d),) * 2 + (y, y) for i in range(n)]
    elif kind == "segments":
        for _ in range(n):
            if rng.random() < 0.5:
                x1 = rng.randint(0, d - 1)
                x2 = rng.randint(x1 + 1, d)
                y = rng.randint(0, d)
                rects.append((x1, x2, y, y))
            else:
                y1 = rng.randint(0, d - 1)
                y2 = rng.randint(y1 + 1, d)
                x = rng.randint(0, d)
                rects.append((x, x, y1, y2))
    elif kind == "random":
        for _ in range(n):
            roll = rng.random()
            if roll < 0.2:
                x = rng.randint(0, d)
                y = rng.randint(0, d)
                rects.append((x, x, y, y))
            elif roll < 0.4:
                x1 = rng.randint(0, d)
                x2 = rng.randint(x1, d)
                y = rng.randint(0, d)
                if rng.random() < 0.5:
                    rects.append((x1, x2, y, y))
                else:
                    rects.append((y, y, x1, x2))
            else:
                x1 = rng.randint(0, d)
                x2 = rng.randint(x1, d)
                y1 = rng.randint(0, d)
                y2 = rng.randint(y1, d)
                rects.append((x1, x2, y1, y2))
    else:
        raise CliError(f"unknown generator kind {kind!r}")
    payload = {"rects": [list(r) for r in rects]}
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_svg(args) -> int:
    inst, digest, _ = _load_instance(args.instance)
    points = None
    radius = None
    norm = None
    if args.result:
        try:
            with open(args.result, "r", encoding="utf-8") as fh:
                record = json.load(fh)
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot load result from {args.result}: {exc}") from None
        if record.get("instance_digest") != digest:
            raise CliError("result file does not match the instance file")
        norm = Norm.from_name(record["norm"])
        payload = record.get("result", {})
        pts = payload.get("points")
        if pts is None:
            raise CliError("result file carries no points to draw")
        points = [_point_from_json(p) for p in pts]
        if "delta" in payload:
            radius = float(Fraction(parse_rational(payload["delta"]), 2))
        elif "delta_squared" in payload:
            radius = float(payload.get("delta_approx", 0.0)) / 2
        elif "delta" in record.get("parameters", {}):
            radius = float(parse_rational(record["parameters"]["delta"])) / 2
        elif "delta_squared" in record.get("parameters", {}):
            dsq = parse_rational(record["parameters"]["delta_squared"])
            radius = approx_float(QuadScalar.sqrt_of(dsq)) / 2
    blocker_param = None
    if args.delta is not None:
        if norm is None:
            norm = Norm.from_name(args.norm) if args.norm else None
        if norm is None:
            raise CliError("--delta for the blocker grid needs --norm")
        val = parse_rational(args.delta)
        blocker_param = val * val * 4 if norm.is_l2 else val * 2
    doc = render_svg(
        inst, points=points, ball_radius=radius, norm=norm, blocker_param=blocker_param
    )
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)
    return 0


class _ScaledPoint:
    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = x
        self.y = y


def _point_from_json(p) -> _ScaledPoint:
    def scal(v):
        if isinstance(v, dict):
            return QuadScalar(
                parse_rational(v["a"]), parse_rational(v["b"]), parse_rational(v["m"])
            )
        return parse_rational(v)

    # results store input units; rendering works in scaled units, so *2
    return _ScaledPoint(scal(p["x"]) * 2, scal(p["y"]) * 2)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="distrep",
        description="Distant representatives for axis-aligned rectangles: "
        "exact approximate decision and optimization under L1, L2, Linf.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, delta_flags=True):
        p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--norm", required=True, choices=["l1", "l2", "linf"])
        if delta_flags:
            p.add_argument("--delta", help='distance bound as "p/q" (l1/linf)')
            p.add_argument(
                "--delta-squared", dest="delta_squared", help='squared bound "p/q" (l2)'
            )
        p.add_argument("--verify", action="store_true", help="re-check outputs exactly")
        p.add_argument("--probe-log", dest="probe_log", help="write probe JSONL here")
        p.add_argument("--svg", help="also render the outcome as SVG here")
        p.add_argument("--output", help="write the result JSON here (default stdout)")

    p = sub.add_parser("decide", help="run the decision procedure at a given delta")
    add_common(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("solve", help="approximate the optimum")
    add_common(p, delta_flags=False)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="exactly re-check a stored result")
    p.add_argument("--instance", required=True)
    p.add_argument("--result", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="certified lower bound / tiny exact optimum")
    p.add_argument("--instance", required=True)
    p.add_argument("--norm", required=True, choices=["l1", "l2", "linf"])
    p.add_argument("--effort", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="write a deterministic instance")
    p.add_argument(
        "--kind",
        required=True,
        choices=["random", "stacked-squares", "points-line", "segments"],
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("svg", help="render an instance (and optional result)")
    p.add_argument("--instance", required=True)
    p.add_argument("--result", help="result JSON from decide/solve")
    p.add_argument("--norm", choices=["l1", "l2", "linf"])
    p.add_argument("--delta", help="draw the blocker grid for this delta")
    p.add_argument("--output")
    p.set_defaults(func=cmd_svg)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
