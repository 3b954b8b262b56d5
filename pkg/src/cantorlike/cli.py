"""Command-line interface.

Exit codes: 0 ok, 1 parse error, 2 validation failure, 3 interval cap
exceeded, 4 domain error, 5 output not writable.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from fractions import Fraction

from . import __version__
from .arith import as_rational, format_rational, to_decimal
from .errors import (
    BracketUnavailable,
    CapExceeded,
    CantorError,
    DomainError,
    NoLimit,
    NotApplicable,
    NotEmbeddable,
    SpecParseError,
    ValidationError,
)
from .families import (
    SVC,
    GeneralizedSVC,
    KAdic,
    LambdaFat,
    MiddleBeta,
    Rescaling,
    SubdivisionTemplate,
    Ternary,
    spec_from_json,
    validate,
)
from .generation import digit_member, generate, left_endpoints, member_up_to, midpoint_decompose
from .measure import Bracket, box_count, box_estimator, hausdorff_dimension, limit_measure, measure_report
from .render import RenderConfig, render
from .staircase import eval_classic_digit, eval_general, eval_iterative, rows_to_csv, sample_staircase

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_CAP, EXIT_DOMAIN, EXIT_IO = range(6)

DEFAULT_DEPTHS = {
    "validate": 20,
    "generate": 3,
    "endpoints": 3,
    "measure": 12,
    "dimension": 20,
    "boxdim": 10,
    "member": 40,
    "midpoint": 20,
    "feval": 30,
    "fsample": 20,
    "render": 4,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# spec resolution

_SHORTHAND = re.compile(r"^(svc)(\d+)$")


def _rational_arg(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (TypeError, ValueError) as exc:
        raise SpecParseError(str(exc)) from exc


def _spec_from_text(text: str):
    text = text.strip()
    m = _SHORTHAND.match(text)
    if m:
        return {"family": "svc", "params": {"n": int(m.group(2))}}
    if text.startswith("{"):
        source = text
    elif os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            source = fh.read()
    else:
        return None
    try:
        return json.loads(source, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"malformed spec JSON: {exc}") from exc


def resolve_spec(args):
    text = args.spec_opt or args.spec
    if text:
        obj = _spec_from_text(text)
        if obj is not None:
            return spec_from_json(obj)
        family = text
    else:
        family = args.family or "ternary"
    family = family.strip().lower()
    m = _SHORTHAND.match(family)
    if m:
        return SVC(int(m.group(2)))
    if family == "ternary":
        return Ternary()
    if family == "svc":
        if args.n is None:
            raise SpecParseError("--family svc needs --n")
        return SVC(args.n)
    if family == "lambda_fat":
        return LambdaFat(_need(args.lam, "--lambda"))
    if family == "middle_beta":
        return MiddleBeta(_need(args.beta, "--beta"))
    if family == "generalized_svc":
        return GeneralizedSVC(_need(args.alpha, "--alpha"), _need(args.beta, "--beta"))
    if family == "kadic":
        if args.base is None or args.allowed is None:
            raise SpecParseError("--family kadic needs --base and --allowed")
        return KAdic(args.base, frozenset(int(d) for d in args.allowed.split(",")))
    if family == "rescaling":
        if args.children is None or args.gaps is None:
            raise SpecParseError("--family rescaling needs --children and --gaps")
        return Rescaling(
            SubdivisionTemplate(
                tuple(_rational_arg(v) for v in args.children.split(",")),
                tuple(_rational_arg(v) for v in args.gaps.split(",")),
            )
        )
    raise SpecParseError(f"unknown family {family!r}; sequence families need --spec JSON")


def _need(value, flag):
    if value is None:
        raise SpecParseError(f"missing {flag}")
    return _rational_arg(value)


# ---------------------------------------------------------------------------
# output


def emit(args, text: str) -> None:
    data = text.encode("utf-8")
    if not args.output or args.output == "-":
        sys.stdout.flush()
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    path = os.path.abspath(args.output)
    directory = os.path.dirname(path)
    fd, tmp = tempfile.mkstemp(prefix=".cantorlike-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args, spec, depth):
    try:
        validate(spec, depth)
    except ValidationError as exc:
        emit(args, _dumps({"status": "invalid", **exc.report()}))
        return EXIT_INVALID
    emit(args, "ok\n")
    return EXIT_OK


def cmd_generate(args, spec, depth):
    gen = generate(spec, depth)
    emit(args, gen.to_csv() if args.format == "csv" else gen.dumps())
    return EXIT_OK


def cmd_endpoints(args, spec, depth):
    pts = left_endpoints(spec, depth)
    if args.format == "json":
        emit(args, _dumps([format_rational(p) for p in pts]))
    else:
        emit(args, "".join(format_rational(p) + "\n" for p in pts))
    return EXIT_OK


def _limit_text(limit, precision):
    if isinstance(limit, Bracket):
        return f"[{format_rational(limit.lower)}, {format_rational(limit.upper)}]"
    return format_rational(limit)


def cmd_measure(args, spec, depth):
    if args.limit:
        emit(args, _limit_text(limit_measure(spec, depth), args.precision) + "\n")
        return EXIT_OK
    report = measure_report(spec, depth)
    obj = {"family": _family_json(spec), "depth": depth, **report.to_json(args.precision)}
    emit(args, _dumps(obj))
    return EXIT_OK


def _family_json(spec):
    try:
        return spec.to_json()
    except SpecParseError:
        return {"family": spec.name, "params": None}


def cmd_dimension(args, spec, depth):
    dim = hausdorff_dimension(spec)
    if args.format == "json":
        emit(args, _dumps(dim.to_json(args.precision)))
    else:
        form = dim.exact.canonical_str() if dim.exact is not None else "numeric"
        emit(args, f"{form}\n{dim.decimal(args.precision)}\n")
    return EXIT_OK


def cmd_boxdim(args, spec, depth):
    count, scale = box_count(spec, depth)
    est = box_estimator(spec, depth)
    if est is None:
        est_form, est_dec = "undefined", "undefined"
    else:
        r = est.rational()
        est_form = est.canonical_str()
        est_dec = to_decimal(r, args.precision) if r is not None else _mp_decimal(est.value(), args.precision)
    if args.format == "json":
        emit(args, _dumps({"count": count, "scale": format_rational(scale), "estimator": est_form, "estimator_decimal": est_dec}))
    else:
        emit(args, f"{count}\n{format_rational(scale)}\n{est_form}\n{est_dec}\n")
    return EXIT_OK


def _mp_decimal(value, precision):
    from .measure import mpf_to_fraction

    return to_decimal(mpf_to_fraction(value), precision)


def cmd_member(args, spec, depth):
    if args.x is None:
        raise SpecParseError("member needs --x")
    x = _rational_arg(args.x)
    lines = [str(member_up_to(spec, x, depth))]
    if isinstance(spec, KAdic):
        lines.append(f"digit_member={'true' if digit_member(spec, x) else 'false'}")
    emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_midpoint(args, spec, depth):
    if args.y is None:
        raise SpecParseError("midpoint needs --y")
    y = _rational_arg(args.y)
    x1, x2 = midpoint_decompose(y, depth)
    residual = abs((x1 + x2) / 2 - y)
    emit(args, f"{format_rational(x1)}\n{format_rational(x2)}\n{format_rational(residual)}\n")
    return EXIT_OK


def cmd_feval(args, spec, depth):
    if args.x is None:
        raise SpecParseError("feval needs --x")
    x = _rational_arg(args.x)
    method = args.method
    if method == "auto":
        method = "digit" if isinstance(spec, Ternary) else "general"
    if method in ("digit", "iterative") and not isinstance(spec, Ternary):
        raise NotApplicable(f"method {method} only applies to the ternary set")
    if method == "digit":
        res = eval_classic_digit(x)
    elif method == "iterative":
        res = eval_iterative(x, depth)
    else:
        res = eval_general(spec, x, depth)
    if args.format == "json":
        emit(args, _dumps({
            "value_exact": format_rational(res.value),
            "value_decimal": to_decimal(res.value, args.precision),
            "error_bound": format_rational(res.error_bound),
        }))
    else:
        emit(args, f"{format_rational(res.value)}\n{to_decimal(res.value, args.precision)}\n{format_rational(res.error_bound)}\n")
    return EXIT_OK


def cmd_fsample(args, spec, depth):
    rows = sample_staircase(spec, args.samples, depth)
    if args.format == "json":
        emit(args, _dumps([r.to_json(args.precision) for r in rows]))
    else:
        emit(args, rows_to_csv(rows, args.precision))
    return EXIT_OK


def cmd_render(args, spec, depth):
    cfg = RenderConfig(
        width=args.width,
        bar_height=args.bar_height,
        depth=depth,
        fill=args.fill,
        stroke=args.stroke,
        samples=args.samples,
    )
    emit(args, render(spec, args.mode, cfg))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "generate": cmd_generate,
    "endpoints": cmd_endpoints,
    "measure": cmd_measure,
    "dimension": cmd_dimension,
    "boxdim": cmd_boxdim,
    "member": cmd_member,
    "midpoint": cmd_midpoint,
    "feval": cmd_feval,
    "fsample": cmd_fsample,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("spec", nargs="?", help="family shorthand (ternary, svc4, ...), inline JSON or a JSON file")
    common.add_argument("--spec", dest="spec_opt", help="spec as inline JSON or a file path")
    common.add_argument("--family", help="family name for shorthand flags")
    common.add_argument("--n", type=int, help="SVC parameter")
    common.add_argument("--lambda", dest="lam", help="lambda-fat parameter")
    common.add_argument("--alpha")
    common.add_argument("--beta")
    common.add_argument("--base", type=int)
    common.add_argument("--allowed", help="comma separated digits")
    common.add_argument("--children", help="comma separated child lengths (rescaling)")
    common.add_argument("--gaps", help="comma separated gap lengths (rescaling)")
    common.add_argument("--depth", type=int)
    common.add_argument("--precision", type=int, default=12)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--output", "-o")

    parser = _Parser(prog="cantorlike", description="Exact Cantor-like sets and staircase functions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "measure":
            p.add_argument("--limit", action="store_true", help="print only the limit measure")
        if name in ("member", "feval"):
            p.add_argument("--x")
        if name == "midpoint":
            p.add_argument("--y")
        if name == "feval":
            p.add_argument("--method", choices=("auto", "digit", "iterative", "general"), default="auto")
        if name in ("fsample", "render"):
            p.add_argument("--samples", type=int, default=101 if name == "fsample" else 513)
        if name == "render":
            p.add_argument("--mode", choices=("bars", "staircase"), default="bars")
            p.add_argument("--width", type=int, default=800)
            p.add_argument("--bar-height", type=int, default=16)
            p.add_argument("--fill", default="black")
            p.add_argument("--stroke", default="black")
    return parser


def _fail(code, message):
    sys.stderr.write(f"cantorlike: {message}\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_PARSE, exc)
    if args.format is None:
        args.format = {"generate": "json", "fsample": "csv"}.get(args.command, "text")
    depth = args.depth if args.depth is not None else DEFAULT_DEPTHS[args.command]
    try:
        spec = resolve_spec(args)
        return COMMANDS[args.command](args, spec, depth)
    except SpecParseError as exc:
        return _fail(EXIT_PARSE, exc)
    except ValidationError as exc:
        return _fail(EXIT_INVALID, exc)
    except CapExceeded as exc:
        return _fail(EXIT_CAP, exc)
    except (DomainError, NotEmbeddable, NoLimit, NotApplicable, BracketUnavailable) as exc:
        return _fail(EXIT_DOMAIN, exc)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    except CantorError as exc:
        return _fail(EXIT_DOMAIN, exc)


if __name__ == "__main__":
    sys.exit(main())
