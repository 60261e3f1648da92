"""CLI entry point."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import structlog
from pydantic import BaseModel

from .characters import MultCharacter, expected_abs_square, hermitian_jacobi_value, jacobi_sum
from .counting import DiagonalEquation, count_auto, i_is_zero_predicate, i_value, weil_bound
from .cyclotomic import abs_square
from .errors import ArityError, DiagcountError, EnumerationTooLargeError, NonzeroBError
from .extremal import (
    classify_affine,
    classify_curve,
    classify_projective,
    curve_points,
    projective_count,
    weil_deligne_bound,
)
from .gf import DEFAULT_TABLE_LIMIT, FieldCtx, FieldElement, build_field, check_field_size
from .grid import rows_to_csv, verify_grid
from .logging_config import configure_logging
from .oracle import PROJECTIVE_FIELD_LIMIT, brute_count, brute_projective_count
from .schemas import (
    BoundsReport,
    CountMethod,
    CountResult,
    ErrorReport,
    GridSpec,
    IValueReport,
    JacobiReport,
    OutputFormat,
    ProjectiveReport,
)

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def parse_element(ctx: FieldCtx, text: str) -> FieldElement:
    """``alpha^k``, ``alpha`` or an integer read in the prime subfield."""
    token = text.strip().replace(" ", "")
    try:
        if token == "alpha":
            return ctx.generator()
        if token.startswith("alpha^"):
            return ctx.element(int(token.removeprefix("alpha^")))
        return ctx.from_int(int(token))
    except ValueError as e:
        if isinstance(e, DiagcountError):
            raise
        raise DiagcountError(f"cannot read field element {text!r}: use alpha^k or an integer") from e


def _elements(ctx: FieldCtx, text: str) -> list[FieldElement]:
    return [parse_element(ctx, part) for part in text.split(",") if part.strip()]


def _field(args: argparse.Namespace) -> FieldCtx:
    return build_field(args.p, args.n, table_limit=args.table_limit)


def _exponents(args: argparse.Namespace, arity: int) -> list[int]:
    d = args.d
    if len(d) == 1:
        return d * arity
    if len(d) != arity:
        raise ArityError(f"{arity} coefficients but {len(d)} exponents")
    return d


def _equation(args: argparse.Namespace) -> DiagonalEquation:
    ctx = _field(args)
    a = _elements(ctx, args.a)
    b = parse_element(ctx, args.b) if args.b is not None else ctx.zero()
    return DiagonalEquation.create(ctx, a, _exponents(args, len(a)), b)


def cmd_count(args: argparse.Namespace) -> BaseModel:
    return count_auto(_equation(args))


def cmd_brute(args: argparse.Namespace) -> BaseModel:
    return CountResult(value=brute_count(_equation(args), method=args.method), method=CountMethod.oracle)


def cmd_curve(args: argparse.Namespace) -> BaseModel:
    ctx = _field(args)
    a = _elements(ctx, args.a)
    if len(a) != 2:
        raise ArityError(f"a curve has two coefficients, got {len(a)}")
    n, m = _exponents(args, 2)
    c = parse_element(ctx, args.b) if args.b is not None else ctx.zero()
    return curve_points(a[0], a[1], c, n, m)


def cmd_classify(args: argparse.Namespace) -> BaseModel:
    if args.projective or args.curve:
        ctx = _field(args)
        a = _elements(ctx, args.a)
        d = _exponents(args, len(a))
        if len(set(d)) != 1:
            raise ArityError(f"projective and curve classification take a single exponent, got {d}")
        b = parse_element(ctx, args.b) if args.b is not None else ctx.zero()
        if args.curve:
            if len(a) != 2:
                raise ArityError(f"a curve has two coefficients, got {len(a)}")
            return classify_curve(a[0], a[1], b, d[0])
        if not b.is_zero:
            raise NonzeroBError("the projective variety is a_1 x_1^d + ... + a_s x_s^d = 0")
        return classify_projective(a, d[0])
    return classify_affine(_equation(args))


def cmd_projective(args: argparse.Namespace) -> BaseModel:
    ctx = _field(args)
    a = _elements(ctx, args.a)
    d = args.d[0]
    s = len(a)
    oracle = brute_projective_count(a, d) if ctx.q_total <= PROJECTIVE_FIELD_LIMIT else None
    return ProjectiveReport(
        field_size=ctx.q_total,
        s=s,
        d=d,
        count=projective_count(a, d),
        oracle=oracle,
        center=(ctx.q_total ** (s - 1) - 1) // ctx.unit_order,
        weil_deligne=weil_deligne_bound(d, s, ctx.q_total) if s >= 3 and d >= 2 else None,
    )


def cmd_jacobi(args: argparse.Namespace) -> BaseModel:
    ctx = _field(args)
    exponents = args.exps or [1] * len(args.d)
    if len(exponents) != len(args.d):
        raise ArityError(f"{len(args.d)} character orders but {len(exponents)} exponents")
    chars = [MultCharacter(ctx, order, ell) for order, ell in zip(args.d, exponents, strict=True)]
    b = parse_element(ctx, args.b) if args.b is not None else ctx.one()
    value = jacobi_sum(chars, b, method=args.method)
    closed_form = None
    if len(chars) == 2 and b == ctx.one():
        try:
            closed_form = hermitian_jacobi_value(chars[0], chars[1])
        except DiagcountError:
            closed_form = None
    approx = value.to_complex()
    magnitude = abs_square(value).as_rational_integer()
    return JacobiReport(
        value=str(value),
        level=value.level,
        coeffs=list(value.coeffs),
        rational=value.as_rational_integer(),
        abs_square=magnitude if magnitude is not None else -1,
        expected_abs_square=expected_abs_square(chars, b),
        approx=(round(approx.real, 12), round(approx.imag, 12)),
        closed_form=closed_form,
    )


def cmd_ivalue(args: argparse.Namespace) -> BaseModel:
    try:
        enumerated: int | None = i_value(args.d, method="enumerate")
    except EnumerationTooLargeError:
        enumerated = None
    return IValueReport(
        d=args.d,
        enumerate=enumerated,
        lcm=i_value(args.d, method="lcm_formula"),
        incl_excl=i_value(args.d),
        is_zero_predicate=i_is_zero_predicate(args.d) if len(args.d) > 2 else None,
    )


def cmd_bounds(args: argparse.Namespace) -> BaseModel:
    size = check_field_size(args.p, args.n)
    d = args.d
    equal = len(set(d)) == 1
    return BoundsReport(
        field_size=size,
        d=d,
        i_value=i_value(d),
        weil_b_zero=weil_bound(d, size, True),
        weil_b_nonzero=weil_bound(d, size, False),
        weil_deligne=weil_deligne_bound(d[0], len(d), size) if equal and len(d) >= 3 else None,
    )


COMMANDS: dict[str, Callable[[argparse.Namespace], BaseModel]] = {
    "count": cmd_count,
    "brute": cmd_brute,
    "curve": cmd_curve,
    "classify": cmd_classify,
    "projective": cmd_projective,
    "jacobi": cmd_jacobi,
    "ivalue": cmd_ivalue,
    "bounds": cmd_bounds,
}


def _flatten(model: BaseModel) -> dict[str, str]:
    row = {}
    for key, value in model.model_dump(mode="json", by_alias=True).items():
        row[key] = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
    return row


def render(model: BaseModel, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.json:
        return model.model_dump_json(by_alias=True)
    row = _flatten(model)
    if fmt == OutputFormat.table:
        width = max(len(key) for key in row)
        return "\n".join(f"{key.ljust(width)}  {value}" for key, value in row.items())
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(row), lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)
    return buffer.getvalue().rstrip("\n")


def _run_grid(args: argparse.Namespace) -> int:
    spec = GridSpec(
        primes=args.primes,
        max_degree=args.max_degree,
        max_field=args.max_field,
        max_arity=args.max_arity,
        max_exponent=args.max_exponent,
        samples=args.samples,
        seed=args.seed,
        jobs=args.jobs,
    )
    report, rows = verify_grid(spec, force=args.force, table_limit=args.table_limit)
    fmt = OutputFormat(args.format or "csv")
    if fmt == OutputFormat.csv:
        sys.stdout.write(rows_to_csv(rows))
    elif fmt == OutputFormat.json:
        print(report.model_dump_json(by_alias=True))
    else:
        print(render(report.model_copy(update={"rows": []}), fmt))
    if report.mismatches:
        if args.report is not None:
            args.report.write_text(report.model_dump_json(by_alias=True, indent=2) + "\n", encoding="utf-8")
        logger.error("grid_mismatches", mismatches=report.mismatches, points=report.points)
        return EXIT_MISMATCH
    return EXIT_OK


def _add_field_flags(parser: argparse.ArgumentParser, with_field: bool = True) -> None:
    if with_field:
        parser.add_argument("--p", type=int, required=True, help="odd prime characteristic")
        parser.add_argument("--n", type=int, required=True, help="extension degree")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diagcount",
        description="Exact solution counts of diagonal equations over finite fields.",
    )
    parser.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    )
    parser.add_argument("--table-limit", type=int, default=DEFAULT_TABLE_LIMIT)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("count", "closed-form count of a_1 x_1^d_1 + ... + a_s x_s^d_s = b"),
        ("brute", "count the same equation by enumeration"),
        ("classify", "maximal / minimal verdict"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        _add_field_flags(cmd)
        cmd.add_argument("--a", required=True, help="coefficients, e.g. 1,alpha^3")
        cmd.add_argument("--d", type=_int_list, required=True, help="exponents, one or one per coefficient")
        cmd.add_argument("--b", default=None, help="right-hand side (default 0)")
        if name == "brute":
            cmd.add_argument("--method", choices=["convolution", "naive"], default="convolution")
        if name == "classify":
            kind = cmd.add_mutually_exclusive_group()
            kind.add_argument("--projective", action="store_true", help="classify the Fermat variety")
            kind.add_argument("--curve", action="store_true", help="classify the curve a x^d + b y^d = c")

    curve = sub.add_parser("curve", help="points of a x^n + b y^m = c with the line at infinity")
    _add_field_flags(curve)
    curve.add_argument("--a", required=True, help="the two coefficients a,b")
    curve.add_argument("--d", type=_int_list, required=True, help="n,m or a single n")
    curve.add_argument("--b", default=None, help="right-hand side c (default 0)")

    projective = sub.add_parser("projective", help="points of the Fermat variety in P^(s-1)")
    _add_field_flags(projective)
    projective.add_argument("--a", required=True)
    projective.add_argument("--d", type=_int_list, required=True)

    jacobi = sub.add_parser("jacobi", help="exact Jacobi sum J(chi_d1^l1, ..., chi_dk^lk, b)")
    _add_field_flags(jacobi)
    jacobi.add_argument("--d", type=_int_list, required=True, help="character orders")
    jacobi.add_argument("--exps", type=_int_list, default=None, help="character exponents (default all 1)")
    jacobi.add_argument("--b", default=None, help="target (default 1)")
    jacobi.add_argument("--method", choices=["convolution", "direct"], default="convolution")

    ivalue = sub.add_parser("ivalue", help="the combinatorial quantity I(d_1, ..., d_s)")
    _add_field_flags(ivalue, with_field=False)
    ivalue.add_argument("--d", type=_int_list, required=True)

    bounds = sub.add_parser("bounds", help="Weil and Weil-Deligne bounds")
    _add_field_flags(bounds)
    bounds.add_argument("--d", type=_int_list, required=True)

    grid = sub.add_parser("verify-grid", help="cross-check closed forms against enumeration")
    _add_field_flags(grid, with_field=False)
    defaults = GridSpec()
    grid.add_argument("--primes", type=_int_list, default=defaults.primes)
    grid.add_argument("--max-degree", type=int, default=defaults.max_degree)
    grid.add_argument("--max-field", type=int, default=defaults.max_field)
    grid.add_argument("--max-arity", type=int, default=defaults.max_arity)
    grid.add_argument("--max-exponent", type=int, default=defaults.max_exponent)
    grid.add_argument("--samples", type=int, default=defaults.samples)
    grid.add_argument("--seed", default=defaults.seed)
    grid.add_argument("--jobs", type=int, default=defaults.jobs)
    grid.add_argument("--force", action="store_true", help="run even above the work limit")
    grid.add_argument("--report", type=Path, default=None, help="write the mismatch report here")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        if args.command == "verify-grid":
            return _run_grid(args)
        if getattr(args, "d", None) is not None and not args.d:
            parser.error("--d needs at least one exponent")
        model = COMMANDS[args.command](args)
        print(render(model, OutputFormat(args.format or "json")))
    except ArityError as e:
        # the number of coefficients, exponents or characters is set by the flags
        parser.error(str(e))
    except DiagcountError as e:
        error = ErrorReport(error=e.code, message=str(e))
        print(error.model_dump_json(by_alias=True), file=sys.stderr)
        logger.debug("command_failed", command=args.command, error=e.code)
        return EXIT_DOMAIN
    return EXIT_OK


__all__ = [
    "EXIT_DOMAIN",
    "EXIT_MISMATCH",
    "EXIT_OK",
    "EXIT_USAGE",
    "build_parser",
    "main",
    "parse_element",
    "render",
]


if __name__ == "__main__":
    raise SystemExit(main())
