"""Command-line interface: grw-reapers <command> [flags]."""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .classifier import beta_terminal_limit, classify
from .closed_forms import ClosedFormBeta, RangeError, beta_closed, beta_for_initial, lightlike
from .curvature import (
    curvature_sample,
    ncc_verdict,
    null_ricci,
)
from .integrator import IntegratorOptions, NullDataError, causal_indicator, integrate
from .io import CURVATURE_HEADER, CURVE_HEADER, curve_json, to_csv, to_json
from .portrait import PortraitSpec, default_spec, portrait_svg
from .warping import DomainError, make_warping, sample_interior

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3
LIGHTLIKE_SAMPLES = 401


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser, formats=("csv", "json"), need_ic=False, default_format=None):
    p.add_argument("--family", choices=("I", "II", "III"), required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    if need_ic:
        p.add_argument("--s0", type=float, default=0.0)
        p.add_argument("--y0", type=float, required=True)
        p.add_argument("--v0", type=float, required=True)
    p.add_argument("--rel-tol", type=float, default=IntegratorOptions.rel_tol)
    p.add_argument("--abs-tol", type=float, default=IntegratorOptions.abs_tol)
    p.add_argument("--max-span", type=float, default=IntegratorOptions.max_span)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--format", choices=formats, default=default_format or formats[0])
    p.add_argument("--output", default="-", help="file path or - for stdout")
    p.add_argument("--record", default=None, help="write a JSON run record to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grw-reapers", description="Grim Reaper translating solitons in warped spacetimes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="integrate the generating curve from (s0, y0, v0)")
    _add_common(p, need_ic=True)

    p = sub.add_parser("classify", help="class, c1 and predicted portrait of an initial condition")
    _add_common(p, formats=("json",), need_ic=True)

    p = sub.add_parser("portrait", help="SVG portrait of several generating curves")
    _add_common(p, formats=("svg",))
    p.add_argument("--ic", action="append", default=None, metavar="S0,Y0,V0",
                   help="initial condition; repeatable. Without any, the family's default set is used")
    p.add_argument("--no-defaults", action="store_true", help="draw only the given --ic curves")
    p.add_argument("--s-range", type=float, nargs=2, default=(-3.0, 3.0))

    p = sub.add_parser("curvature", help="tabulate curvature quantities over the interval")
    _add_common(p)
    p.add_argument("--sc-fibre", type=float, default=0.0)
    p.add_argument("--ric-fibre", type=float, default=0.0)
    p.add_argument("--coefficient", choices=("binomial", "ordered"), default="binomial")

    p = sub.add_parser("ncc", help="null convergence verdict on sampled t")
    _add_common(p, formats=("json",))
    p.add_argument("--ric-fibre", type=float, default=0.0, help="lower bound of the fibre Ricci term")

    p = sub.add_parser("lightlike", help="sample the null curve through (s0, y0)")
    _add_common(p)
    p.add_argument("--s0", type=float, default=0.0)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--branch", choices=("+", "-"), default="+")

    p = sub.add_parser("beta", help="closed-form beta branch over its domain")
    _add_common(p)
    p.add_argument("--c1", type=float, default=None)
    p.add_argument("--y0", type=float, default=None)
    p.add_argument("--v0", type=float, default=None)
    p.add_argument("--branch", choices=("+", "-"), default="+")
    return parser


def _options(args) -> IntegratorOptions:
    return IntegratorOptions(rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_span=args.max_span)


def _warping(args):
    if args.family == "I" and args.command in ("integrate", "classify", "portrait", "lightlike", "beta"):
        raise UsageError(f"{args.command} needs family II or III")
    try:
        return make_warping(args.family, args.c, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _meta(args, w) -> dict:
    meta = {"family": w.family, "c": w.c, "n": w.n, "version": __version__}
    for key in ("s0", "y0", "v0"):
        if getattr(args, key, None) is not None:
            meta[key] = getattr(args, key)
    meta["rel_tol"] = args.rel_tol
    meta["abs_tol"] = args.abs_tol
    meta["max_span"] = args.max_span
    return meta


def _sample_null(w, s0, y0, branch, span, count):
    curve = lightlike(w, s0, y0, branch)
    lo, hi = curve.domain
    a = max(s0 - span, lo + 1e-9 * span) if math.isfinite(lo) else s0 - span
    b = min(s0 + span, hi - 1e-9 * span) if math.isfinite(hi) else s0 + span
    s = np.linspace(a, b, count)
    y = np.asarray(curve(s))
    v = branch * np.asarray([w.b(float(t)) for t in y])
    return s, y, v


def cmd_integrate(args) -> str:
    w = _warping(args)
    meta = _meta(args, w)
    try:
        curve = integrate(w, args.s0, args.y0, args.v0, _options(args), samples=args.samples)
    except NullDataError:
        branch = 1 if args.v0 > 0 else -1
        count = args.samples or LIGHTLIKE_SAMPLES
        s, y, v = _sample_null(w, args.s0, args.y0, branch, args.max_span, count)
        ci = causal_indicator(w, y, v)
        meta["closed_form"] = "lightlike"
        if args.format == "csv":
            return to_csv(CURVE_HEADER, [s, y, v, ci])
        term = {"kind": "LightLikeClosedForm"}
        return to_json({"meta": meta, "columns": list(CURVE_HEADER), "samples": np.column_stack([s, y, v, ci]),
                        "terminations": {"left": term, "right": term}, "critical_points": []})
    meta["c1"] = curve.c1
    if args.format == "csv":
        return to_csv(CURVE_HEADER, [curve.s, curve.y, curve.v, curve.causal])
    return to_json(curve_json(curve, meta))


def cmd_classify(args) -> str:
    w = _warping(args)
    report = classify(w, args.s0, args.y0, args.v0)
    body = report.to_dict()
    body["meta"] = _meta(args, w)
    return to_json(body)


def _parse_ic(text: str) -> tuple[float, float, float]:
    try:
        s0, y0, v0 = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--ic expects S0,Y0,V0, got {text!r}") from None
    return s0, y0, v0


def cmd_portrait(args) -> str:
    w = _warping(args)
    base = default_spec(w.family, w.c, w.n)
    ics = tuple(_parse_ic(t) for t in (args.ic or []))
    if args.no_defaults:
        anchors = ()
    else:
        ics = base.ics + ics
        anchors = base.lightlike_anchors
    try:
        spec = PortraitSpec(w, ics, anchors, tuple(args.s_range), None, args.samples or base.resolution)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return portrait_svg(spec, _options(args))


def cmd_curvature(args) -> str:
    w = _warping(args)
    ts = sample_interior(w, args.samples or 100)
    rows = [curvature_sample(w, float(t), args.sc_fibre, args.coefficient) for t in ts]
    cols = [
        ts,
        [r.scalar for r in rows],
        [r.mixed_sectional for r in rows],
        [r.null_ricci_offset for r in rows],
    ]
    if args.format == "csv":
        return to_csv(CURVATURE_HEADER, cols)
    table = np.column_stack(cols + [[null_ricci(w, float(t), args.ric_fibre) for t in ts]])
    return to_json({
        "meta": _meta(args, w) | {"sc_fibre": args.sc_fibre, "ric_fibre": args.ric_fibre, "coefficient": args.coefficient},
        "columns": list(CURVATURE_HEADER) + ["null_ricci"],
        "samples": table,
    })


def cmd_ncc(args) -> str:
    w = _warping(args)
    count = args.samples or 100
    if count < 2:
        raise UsageError("--samples must be at least 2")
    verdict = ncc_verdict(w, args.ric_fibre, count)
    body = verdict.to_dict()
    body["meta"] = _meta(args, w) | {"ric_fibre": args.ric_fibre}
    return to_json(body)


def cmd_lightlike(args) -> str:
    w = _warping(args)
    branch = 1 if args.branch == "+" else -1
    s, y, v = _sample_null(w, args.s0, args.y0, branch, args.max_span, args.samples or LIGHTLIKE_SAMPLES)
    ci = causal_indicator(w, y, v)
    if args.format == "csv":
        return to_csv(CURVE_HEADER, [s, y, v, ci])
    return to_json({"meta": _meta(args, w) | {"branch": branch}, "columns": list(CURVE_HEADER),
                    "samples": np.column_stack([s, y, v, ci])})


def cmd_beta(args) -> str:
    w = _warping(args)
    if args.c1 is not None:
        cf = ClosedFormBeta(w, args.c1, args.branch)
    elif args.y0 is not None and args.v0 is not None:
        cf = beta_for_initial(w, args.y0, args.v0)
    else:
        raise UsageError("beta needs --c1 or both --y0 and --v0")
    dom = cf.domain
    count = args.samples or 200
    lo = dom.lo if math.isfinite(dom.lo) else dom.hi - 10.0 / w.c
    hi = dom.hi if math.isfinite(dom.hi) else dom.lo + 10.0 / w.c
    pad = 1e-6 * (hi - lo)
    ys = np.linspace(lo + pad, hi - pad, count)
    betas = np.array([beta_closed(cf, float(y)) for y in ys])
    if args.format == "csv":
        return to_csv(("y", "beta"), [ys, betas])
    body = {
        "meta": _meta(args, w) | {"c1": cf.c1, "branch": cf.branch},
        "domain": {"lo": dom.lo, "hi": dom.hi, "root": dom.root},
        "columns": ["y", "beta"],
        "samples": np.column_stack([ys, betas]),
    }
    if w.family == "II" and math.isclose(cf.c1, -((w.c * w.n) ** 2), rel_tol=1e-12):
        body["terminal_limit"] = beta_terminal_limit(w, cf.branch)
    return to_json(body)


COMMANDS = {
    "integrate": cmd_integrate,
    "classify": cmd_classify,
    "portrait": cmd_portrait,
    "curvature": cmd_curvature,
    "ncc": cmd_ncc,
    "lightlike": cmd_lightlike,
    "beta": cmd_beta,
}


def _write(text: str, path: str) -> None:
    if path == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head)
            sys.stderr.close()
    else:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)


def run_record(args, text: str, wall: float) -> dict:
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "record")}
    return {
        "tool": "grw-reapers",
        "version": __version__,
        "inputs": inputs,
        "tolerances": {"rel_tol": args.rel_tol, "abs_tol": args.abs_tol, "max_span": args.max_span},
        "wall_clock_s": wall,
        "output_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
    }


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"grw-reapers: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, RangeError) as exc:
        print(f"grw-reapers: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"grw-reapers: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    wall = time.perf_counter() - start
    _write(text, args.output)
    if args.record:
        with open(args.record, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(run_record(args, text, wall), fh, sort_keys=True, indent=2, default=str)
            fh.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
