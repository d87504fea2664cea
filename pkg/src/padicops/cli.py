"""Command-line front end.

Plain values print as single lines, structured results as JSON, traces
as TSV with a header row.  Exit codes: 0 success, 1 failed verify
suite, 2 precondition or certification failure, 3 exhausted budget or
precision, 4 parse or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .calculus import (binomial_series, certify_normal_contraction,
                       functional_calculus, teichmuller_idempotent)
from .config import ExperimentConfig, load_config
from .errors import (CertificationFailed, DependentBasis, DivisionByZero,
                     NoConvergence, NonIntegral, ParseError,
                     PrecisionExhausted, PreconditionFailed, SearchExhausted,
                     StructureError, Undecidable)
from .idempotents import (idempotent_equivalence, idempotent_lift,
                          idempotent_refine, idempotent_split, infinite_sum,
                          k0_trivialize)
from .io import (exponent_str, mahler_from_obj, mahler_to_obj,
                 operator_from_obj, operator_to_obj, scalar_from_text,
                 scalar_to_text, tsv_table)
from .mahler import mahler_eval, mahler_expand
from .operators import normalize, op_norm, truncate
from .scale import scale_minor_probe, willis_scale_finite
from .scalars import ValuationBound
from .verify import run_all

_PRECONDITION_ERRORS = (PreconditionFailed, CertificationFailed, NonIntegral,
                        DependentBasis, DivisionByZero, Undecidable,
                        StructureError, ValueError)
_BUDGET_ERRORS = (NoConvergence, SearchExhausted, PrecisionExhausted)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are parse errors, not exit 2
        raise ParseError(message)


def _report(exc: BaseException) -> None:
    obj: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
    for key in ("depth", "iterations", "budget"):
        value = getattr(exc, key, None)
        if value is not None:
            obj[key] = value
    print(json.dumps(obj, indent=2), file=sys.stderr)


def _read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def _file_header(obj: Any) -> tuple[int, int]:
    if not isinstance(obj, dict) or "p" not in obj or "precision" not in obj:
        raise ParseError("input file needs integer 'p' and 'precision' fields")
    return int(obj["p"]), int(obj["precision"])


def _emit(obj: Any) -> None:
    print(json.dumps(obj, indent=2))


# -- mahler --------------------------------------------------------------


def _cmd_mahler_expand(args, cfg: ExperimentConfig) -> int:
    obj = _read_json(args.infile)
    p, prec = _file_header(obj)
    samples = [scalar_from_text(t, p, prec) for t in obj.get("samples", [])]
    tail = obj.get("tail_exponent")
    bound = None if tail is None else ValuationBound(int(tail))
    fn = mahler_expand(samples, bound, prime=p)
    _emit(mahler_to_obj(fn, p, prec))
    return 0


def _cmd_mahler_eval(args, cfg: ExperimentConfig) -> int:
    obj = _read_json(args.infile)
    p, prec = _file_header(obj)
    fn = mahler_from_obj(obj)
    x = scalar_from_text(args.x, p, prec)
    print(scalar_to_text(mahler_eval(fn, x)))
    return 0


# -- calculus ------------------------------------------------------------


def _read_operator(path: str):
    obj = _read_json(path)
    p, prec = _file_header(obj)
    return operator_from_obj(obj), p, prec


def _cmd_calculus_certify(args, cfg: ExperimentConfig) -> int:
    a, _, _ = _read_operator(args.infile)
    cert = certify_normal_contraction(a, args.depth)
    rows = [[n, exponent_str(bound)] for n, bound in cert.checked]
    sys.stdout.write(tsv_table(["n", "norm_exponent"], rows))
    return 0


def _cmd_calculus_apply(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    fn = mahler_from_obj(_read_json(args.fn))
    depth = args.depth if args.depth is not None else len(fn.coefficients)
    cert = certify_normal_contraction(a, depth)
    result, error = functional_calculus(a, fn, cert)
    _emit({"result": operator_to_obj(result, prec),
           "error_exponent": exponent_str(error)})
    return 0


def _cmd_calculus_teich(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    cert = certify_normal_contraction(a, args.depth)
    target = cfg.target_valuation
    budget = args.budget if args.budget is not None else cfg.budget("teich")
    e, trace = teichmuller_idempotent(a, cert, target=target, budget=budget)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(tsv_table(["k", "gap_exponent"], trace))
    _emit({"e": operator_to_obj(e, prec), "iterations": len(trace) + 1})
    return 0


def _cmd_calculus_fz(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    z = scalar_from_text(args.z, p, prec)
    depth = args.depth if args.depth is not None else cfg.budget("series_depth")
    cert = certify_normal_contraction(a, depth)
    result, error = binomial_series(a, z, cert, depth)
    _emit({"result": operator_to_obj(result, prec),
           "error_exponent": exponent_str(error)})
    return 0


# -- idempotents ---------------------------------------------------------


def _cmd_idem_refine(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    target = cfg.target_valuation
    budget = args.budget if args.budget is not None else cfg.budget("refine")
    e = idempotent_refine(a, target, budget)
    distance = op_norm(a - e)
    _emit({"e": operator_to_obj(e, prec),
           "distance_exponent": exponent_str(distance)})
    return 0


def _cmd_idem_equiv(args, cfg: ExperimentConfig) -> int:
    e, p, prec = _read_operator(args.infile)
    f, _, _ = _read_operator(args.in2)
    target = cfg.target_valuation
    witness = idempotent_equivalence(e, f, target)
    _emit({"u": operator_to_obj(witness.u, prec),
           "u_inv": operator_to_obj(witness.u_inv, prec)})
    return 0


def _cmd_idem_split(args, cfg: ExperimentConfig) -> int:
    e, p, prec = _read_operator(args.infile)
    target = cfg.target_valuation
    split = idempotent_split(e, target)
    _emit({"f": operator_to_obj(split.f, prec),
           "g": operator_to_obj(split.g, prec)})
    return 0


def _cmd_idem_lift(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    target = cfg.target_valuation
    budget = args.budget if args.budget is not None else cfg.budget("lift")
    e = idempotent_lift(a, target=target, budget=budget)
    _emit({"e": operator_to_obj(e, prec)})
    return 0


def _cmd_idem_trivialize(args, cfg: ExperimentConfig) -> int:
    e, p, prec = _read_operator(args.infile)
    target = cfg.target_valuation
    _emit(k0_trivialize(e, target, args.prefix))
    return 0


def _cmd_idem_sumring(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    spread = infinite_sum(a, args.depth)
    _emit(operator_to_obj(spread, prec))
    return 0


# -- scale ---------------------------------------------------------------


def _finite_dim(a) -> int:
    nf = normalize(a)
    if nf.tail is not None or not nf.shift.is_zero:
        raise PreconditionFailed("operator has infinite support; pass --dim")
    top = 0
    for i, j in nf.head:
        top = max(top, i + 1, j + 1)
    return max(top, 1)


def _cmd_scale_finite(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    dim = args.dim if args.dim is not None else _finite_dim(a)
    print(willis_scale_finite(truncate(a, dim), dim))
    return 0


def _cmd_scale_probe(args, cfg: ExperimentConfig) -> int:
    a, p, prec = _read_operator(args.infile)
    try:
        bounds = [int(part) for part in args.bounds.split(",") if part]
    except ValueError as exc:
        raise ParseError(f"bad --bounds list: {args.bounds!r}") from exc
    rows = [[k, value.exponent] for k, value in scale_minor_probe(a, bounds)]
    sys.stdout.write(tsv_table(["k", "scale_exponent"], rows))
    return 0


# -- verify --------------------------------------------------------------


def _cmd_verify_all(args, cfg: ExperimentConfig) -> int:
    results = run_all(cfg)
    passed = sum(1 for r in results if r.passed)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


# -- wiring --------------------------------------------------------------


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="prime")
    common.add_argument("--precision", type=int, default=None)
    common.add_argument("--target", type=int, default=None,
                        help="target valuation for certified checks")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--config", default=None, help="JSON config file")

    parser = _Parser(prog="padicops")
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, handler, options=None):
        sub = group.add_parser(name, parents=[common])
        sub.set_defaults(handler=handler)
        for flag, kwargs in (options or {}).items():
            sub.add_argument(flag, **kwargs)
        return sub

    mahler = groups.add_parser("mahler").add_subparsers(dest="action", required=True)
    leaf(mahler, "expand", _cmd_mahler_expand,
         {"--in": dict(dest="infile", required=True, metavar="FILE")})
    leaf(mahler, "eval", _cmd_mahler_eval,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--x": dict(required=True, help="scalar text, e.g. 3^0*12")})

    calculus = groups.add_parser("calculus").add_subparsers(dest="action", required=True)
    leaf(calculus, "certify", _cmd_calculus_certify,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--depth": dict(type=int, required=True)})
    leaf(calculus, "apply", _cmd_calculus_apply,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--fn": dict(required=True, metavar="FILE"),
            "--depth": dict(type=int, default=None)})
    leaf(calculus, "teich-idem", _cmd_calculus_teich,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--depth": dict(type=int, default=1),
            "--budget": dict(type=int, default=None),
            "--trace": dict(default=None, metavar="FILE", help="write TSV trace")})
    leaf(calculus, "fz", _cmd_calculus_fz,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--z": dict(required=True, help="scalar text for the base point"),
            "--depth": dict(type=int, default=None)})

    idem = groups.add_parser("idem").add_subparsers(dest="action", required=True)
    leaf(idem, "refine", _cmd_idem_refine,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--budget": dict(type=int, default=None)})
    leaf(idem, "equiv", _cmd_idem_equiv,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--in2": dict(dest="in2", required=True, metavar="FILE")})
    leaf(idem, "split", _cmd_idem_split,
         {"--in": dict(dest="infile", required=True, metavar="FILE")})
    leaf(idem, "lift", _cmd_idem_lift,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--budget": dict(type=int, default=None)})
    leaf(idem, "trivialize", _cmd_idem_trivialize,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--prefix": dict(type=int, default=16)})
    leaf(idem, "sumring", _cmd_idem_sumring,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--depth": dict(type=int, required=True)})

    scale = groups.add_parser("scale").add_subparsers(dest="action", required=True)
    leaf(scale, "finite", _cmd_scale_finite,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--dim": dict(type=int, default=None)})
    leaf(scale, "probe", _cmd_scale_probe,
         {"--in": dict(dest="infile", required=True, metavar="FILE"),
            "--bounds": dict(required=True, help="comma-separated sizes")})

    verify = groups.add_parser("verify").add_subparsers(dest="action", required=True)
    leaf(verify, "all", _cmd_verify_all)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config, prime=args.p, precision=args.precision,
                          target_valuation=args.target, seed=args.seed)
        return args.handler(args, cfg)
    except ParseError as exc:
        _report(exc)
        return 4
    except OSError as exc:
        _report(exc)
        return 4
    except _BUDGET_ERRORS as exc:
        _report(exc)
        return 3
    except _PRECONDITION_ERRORS as exc:
        _report(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
