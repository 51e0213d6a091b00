"""Command-line interface.

Exit codes: 0 ok, 1 a verification check failed, 2 bad arguments,
3 I/O or malformed input file, 4 not a dual, 5 pattern budget exceeded.
"""

import argparse
import json
import math
import sys

from . import __version__, io, lab
from .charts import dual_from_parameter, make_chart
from .errors import (
    DimensionMismatch,
    InvalidDimensions,
    NotADual,
    PatternBudgetExceeded,
    SingularFrameOperator,
    UnknownCheckId,
)
from .frames import (
    DualPair,
    canonical_dual,
    construct,
    frame_operator,
    is_equiangular,
    is_parseval,
    is_tight,
    is_uniform,
)
from .metrics import PATTERN_CAP, AverageErrorSpec, Measure, average_error
from .optimize import Method, OptimizeConfig, optimize

EXIT_OK, EXIT_CHECK, EXIT_ARGS, EXIT_IO, EXIT_NOT_DUAL, EXIT_BUDGET = range(6)


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def p_value(text):
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid exponent {text!r}") from None
    if not (math.isfinite(p) and p > 1):
        raise argparse.ArgumentTypeError(f"p must be a finite number > 1 (the l^p average requires p > 1), got {text}")
    return p


def parse_vectors(text):
    """``"1,0;0,1;1,1"`` -> list of rows; entries may be complex (``1+2j``)."""
    try:
        return [[complex(x.strip().replace("i", "j")) for x in row.split(",")] for row in text.split(";")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse vectors {text!r}: {exc}") from None


# -- file helpers -------------------------------------------------------------


def _load_json(path):
    try:
        return io.read_json(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}", EXIT_IO) from None


def _load_frame(path):
    try:
        return io.frame_from_dict(_load_json(path))
    except InvalidDimensions as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from None


def _load_parameter(path):
    try:
        return io.parameter_from_dict(_load_json(path))
    except InvalidDimensions as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from None


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def _config(args):
    skip = {"func", "no_timestamp"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _meta(args, **extra):
    doc = io.meta(__version__, _config(args), timestamp=not args.no_timestamp)
    doc.update(extra)
    return doc


def _pair(frame, dual):
    try:
        return DualPair(frame, dual)
    except NotADual as exc:
        raise CliError(f"{exc} (residual {exc.residual:.17g})", EXIT_NOT_DUAL) from None
    except InvalidDimensions as exc:
        raise CliError(str(exc), EXIT_ARGS) from None


def _frame_summary(F):
    info = frame_operator(F)
    return (
        f"N={F.N} n={F.n}\n"
        f"frame bounds: A={info.lower_bound:.17g} B={info.upper_bound:.17g}\n"
        f"tight={is_tight(F)} parseval={is_parseval(F)} uniform={is_uniform(F)} "
        f"equiangular={is_equiangular(F)}\n"
    )


# -- subcommands ---------------------------------------------------------------


def cmd_frame_gen(args):
    try:
        vectors = parse_vectors(args.vectors) if args.vectors else None
    except argparse.ArgumentTypeError as exc:
        raise CliError(str(exc), EXIT_ARGS) from None
    try:
        F = construct(args.kind, n=args.n, N=args.N, seed=args.seed, vectors=vectors, columns=args.columns)
    except InvalidDimensions as exc:
        raise CliError(str(exc), EXIT_ARGS) from None
    doc = io.frame_to_dict(F)
    doc["meta"] = _meta(args)
    _write(args.output, io.dumps(doc))
    (sys.stdout if args.output not in (None, "-") else sys.stderr).write(_frame_summary(F))
    return EXIT_OK


def cmd_frame_info(args):
    F = _load_frame(args.frame)
    sys.stdout.write(_frame_summary(F))
    for i, r in enumerate(F.norms, 1):
        sys.stdout.write(f"||f_{i}|| = {r:.17g}\n")
    return EXIT_OK


def _write_dual(args, pair, **extra):
    doc = io.frame_to_dict(pair.dual)
    doc["meta"] = _meta(args, residual=pair.residual, **extra)
    _write(args.output, io.dumps(doc))


def cmd_dual_canonical(args):
    F = _load_frame(args.frame)
    try:
        pair = canonical_dual(F)
    except SingularFrameOperator as exc:
        raise CliError(str(exc), EXIT_ARGS) from None
    _write_dual(args, pair)
    if args.output not in (None, "-"):
        print(f"canonical dual written to {args.output} (residual {pair.residual:.3e})")
    return EXIT_OK


def cmd_dual_from_param(args):
    F = _load_frame(args.frame)
    B = _load_parameter(args.parameter)
    try:
        pair = dual_from_parameter(make_chart(F), B)
    except DimensionMismatch as exc:
        raise CliError(str(exc), EXIT_ARGS) from None
    _write_dual(args, pair)
    if args.output not in (None, "-"):
        print(f"dual written to {args.output} (residual {pair.residual:.3e})")
    return EXIT_OK


def cmd_dual_verify(args):
    pair = _pair(_load_frame(args.frame), _load_frame(args.dual))
    print(f"dual: residual {pair.residual:.17g}")
    return EXIT_OK


def cmd_ae(args):
    F = _load_frame(args.frame)
    pair = canonical_dual(F) if args.canonical else _pair(F, _load_frame(args.dual))
    try:
        spec = AverageErrorSpec(args.measure, args.m, args.p)
        report = average_error(pair, spec, cap=args.cap)
    except PatternBudgetExceeded as exc:
        raise CliError(str(exc), EXIT_BUDGET) from None
    except (InvalidDimensions, ValueError) as exc:
        raise CliError(str(exc), EXIT_ARGS) from None
    print(f"AE[{spec.measure.value}, m={spec.m}, p={spec.p:g}] = {report.average:.17g}")
    bound = F.n / F.N
    print(f"n/N = {bound:.17g}" + ("" if spec.m == 1 else "  (bound applies to m = 1)"))
    print(f"worst case over patterns = {report.worst_case:.17g}")
    if args.csv:
        _write(args.csv, io.report_csv(report))
    if args.json:
        doc = {"report": io.report_to_dict(report), "meta": _meta(args)}
        _write(args.json, io.dumps(doc))
    return EXIT_OK


def cmd_optimize(args):
    F = _load_frame(args.frame)
    try:
        spec = AverageErrorSpec(args.measure, args.m, args.p)
        cfg = OptimizeConfig(
            spec,
            method=args.method,
            max_iters=args.max_iters,
            restarts=args.restarts,
            seed=args.seed,
            nested_optimal=args.nested,
            cap=args.cap,
        )
        result = optimize(make_chart(F), cfg)
    except PatternBudgetExceeded as exc:
        raise CliError(str(exc), EXIT_BUDGET) from None
    except (InvalidDimensions, ValueError) as exc:
        raise CliError(str(exc), EXIT_ARGS) from None
    print(f"value = {result.best_value:.17g}")
    print(f"canonical = {result.canonical_value:.17g}")
    if spec.m == 1:
        print(f"n/N = {result.lower_bound:.17g}")
    print(f"certificate = {result.certificate.value}")
    for i, g in enumerate(result.best_dual.vectors, 1):
        print(f"g_{i} = " + ", ".join(_fmt_complex(z) for z in g))
    if args.output:
        doc = io.optimize_result_to_dict(result)
        doc["meta"] = _meta(args, resolved=cfg.as_dict())
        _write(args.output, io.dumps(doc))
    if args.trace:
        _write(args.trace, io.trace_csv(result.trace))
    return EXIT_OK


def _fmt_complex(z):
    if abs(z.imag) <= 1e-15 * max(1.0, abs(z.real)):
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def cmd_verify(args):
    if not args.all and not args.check_id:
        raise CliError("give a check id or --all", EXIT_ARGS)
    ids = None if args.all else [args.check_id]
    try:
        if ids:
            checks = [lab.run_check(ids[0], seed=args.seed)]
        else:
            checks, _ = lab.run_suite(args.seed)
    except UnknownCheckId as exc:
        raise CliError(str(exc), EXIT_ARGS) from None
    if ids:
        sys.stdout.write(lab.format_detail(checks[0]))
    else:
        sys.stdout.write(lab.format_table(checks))
    status = EXIT_CHECK if any(c.status == lab.FAIL for c in checks) else EXIT_OK
    if args.json:
        doc = {"checks": [c.as_dict() for c in checks], "exit_status": status, "meta": _meta(args)}
        _write(args.json, io.dumps(doc))
    return status


# -- parser --------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--no-timestamp", action="store_true", help="omit the creation time from metadata")

    parser = argparse.ArgumentParser(prog="dualframe", description="Dual frames and erasure error averages.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    frame = sub.add_parser("frame", help="construct or inspect frames").add_subparsers(dest="action", required=True)
    gen = frame.add_parser("gen", parents=[common], help="write a frame file")
    gen.add_argument("--kind", required=True, choices=["mb", "mercedes_benz", "simplex", "harmonic", "random", "explicit"])
    gen.add_argument("--n", type=int)
    gen.add_argument("--N", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--vectors", help='rows separated by ";", e.g. "1,0;0,1;1,1"')
    gen.add_argument("--columns", type=lambda s: [int(c) for c in s.split(",")], help="DFT columns for harmonic")
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_frame_gen)
    info = frame.add_parser("info", help="frame bounds and structural flags")
    info.add_argument("frame")
    info.set_defaults(func=cmd_frame_info)

    dual = sub.add_parser("dual", help="construct or check duals").add_subparsers(dest="action", required=True)
    can = dual.add_parser("canonical", parents=[common])
    can.add_argument("frame")
    can.add_argument("-o", "--output")
    can.set_defaults(func=cmd_dual_canonical)
    fp = dual.add_parser("from-param", parents=[common], help="dual for a chart parameter B")
    fp.add_argument("frame")
    fp.add_argument("parameter")
    fp.add_argument("-o", "--output")
    fp.set_defaults(func=cmd_dual_from_param)
    ver = dual.add_parser("verify", help="check the reconstruction identity")
    ver.add_argument("frame")
    ver.add_argument("dual")
    ver.set_defaults(func=cmd_dual_verify)

    ae = sub.add_parser("ae", parents=[common], help="l^p-average erasure error")
    ae.add_argument("frame")
    which = ae.add_mutually_exclusive_group(required=True)
    which.add_argument("--canonical", action="store_true")
    which.add_argument("--dual")
    ae.add_argument("--measure", required=True, type=Measure.parse)
    ae.add_argument("--m", type=int, default=1)
    ae.add_argument("--p", type=p_value, default=2.0)
    ae.add_argument("--cap", type=int, default=PATTERN_CAP, help="maximum number of erasure patterns")
    ae.add_argument("--csv", help="per-pattern values")
    ae.add_argument("--json", help="full report")
    ae.set_defaults(func=cmd_ae)

    opt = sub.add_parser("optimize", parents=[common], help="search for an optimal dual")
    opt.add_argument("frame")
    opt.add_argument("--measure", required=True, type=Measure.parse)
    opt.add_argument("--m", type=int, default=1)
    opt.add_argument("--p", type=p_value, default=2.0)
    opt.add_argument("--method", type=Method.parse, default=Method.GRADIENT, help="closed or gradient")
    opt.add_argument("--restarts", type=int, default=4)
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--max-iters", type=int, default=500)
    opt.add_argument("--nested", action="store_true", help="restrict to duals optimal for all smaller m")
    opt.add_argument("--cap", type=int, default=PATTERN_CAP)
    opt.add_argument("-o", "--output", help="result JSON (dual, parameter, certificate)")
    opt.add_argument("--trace", help="iteration trace CSV")
    opt.set_defaults(func=cmd_optimize)

    vf = sub.add_parser("verify", parents=[common], help="run numerical checks of the theory")
    vf.add_argument("check_id", nargs="?")
    vf.add_argument("--all", action="store_true")
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--json", help="suite report")
    vf.set_defaults(func=cmd_verify)
    return parser


def _jsonable(value):
    if isinstance(value, (Measure, Method)):
        return value.value
    return value


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in vars(args).items():
        setattr(args, k, _jsonable(v))
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
