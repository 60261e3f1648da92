"""Verification harness: closed forms, bounds and classifiers against the oracle.

The grid sweeps fields F_{p^2t}, arities s and exponent vectors whose entries all
have a witness r | t with d | p^r + 1. Every point is counted by the closed forms
and by enumeration; the two must agree, respect Weil's bound and, for equal
exponents, produce a classifier verdict consistent with the count.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import random
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import anyio
import anyio.to_process
import structlog
import sympy

from .counting import DiagonalEquation, count_auto, find_witness, weil_bound
from .errors import DiagcountError, GridTooLargeError
from .extremal import classify_affine
from .gf import build_field, power_residue_class
from .oracle import brute_count
from .schemas import CountMethod, GridReport, GridRow, GridSpec

logger = structlog.get_logger(__name__)

GRID_WORK_LIMIT = 10**9
REPORT_ROWS = 100

B_CHOICES = ("0", "1", "alpha")

CSV_COLUMNS = [
    "p", "t", "s", "d", "a_classes", "b_class", "count", "method", "oracle", "bound", "attained", "verdict",
]


@dataclass(frozen=True, slots=True)
class GridPoint:
    """One equation of the sweep, described by plain values so it can cross process boundaries."""

    p: int
    t: int
    d: tuple[int, ...]
    a_exponents: tuple[int, ...]
    b: str

    @property
    def size(self) -> int:
        return self.p ** (2 * self.t)

    def equation(self, table_limit: int) -> DiagonalEquation:
        ctx = build_field(self.p, 2 * self.t, table_limit=max(table_limit, self.size))
        b = {"0": ctx.zero(), "1": ctx.one(), "alpha": ctx.generator()}[self.b]
        return DiagonalEquation.create(ctx, [ctx.element(k) for k in self.a_exponents], self.d, b)

    def work(self) -> int:
        """Operations spent by the convolution oracle: support size times field size per factor."""
        return sum(((self.size - 1) // di + 1) * self.size for di in self.d)


def witnessed_exponents(p: int, t: int, max_exponent: int) -> list[int]:
    """Divisors d >= 2 of p^2t - 1 up to max_exponent that have a witness r | t."""
    return [
        int(d)
        for d in sympy.divisors(p ** (2 * t) - 1)
        if 2 <= d <= max_exponent and find_witness(int(d), p, t) is not None
    ]


def grid_points(spec: GridSpec) -> Iterator[GridPoint]:
    """Points in grid order: p, t, s, exponent vector, coefficient sample, b."""
    for p in spec.primes:
        if p == 2 or not sympy.isprime(p):
            raise DiagcountError(f"grid primes must be odd primes, got {p}")
        t = 1
        while 2 * t <= spec.max_degree and p ** (2 * t) <= spec.max_field:
            units = p ** (2 * t) - 1
            exponents = witnessed_exponents(p, t, spec.max_exponent)
            for s in range(1, spec.max_arity + 1):
                for d in itertools.combinations_with_replacement(exponents, s):
                    rng = random.Random(f"{spec.seed}:{p}:{t}:{d}")
                    samples = [(0,) * s] + [
                        tuple(rng.randrange(units) for _ in range(s)) for _ in range(spec.samples - 1)
                    ]
                    for a_exponents in samples:
                        for b in B_CHOICES:
                            yield GridPoint(p, t, d, a_exponents, b)
            t += 1


def estimate_work(points: Sequence[GridPoint]) -> int:
    return sum(point.work() for point in points)


def evaluate_point(point: GridPoint, table_limit: int = 2**22) -> GridRow:
    """Count one equation every applicable way and record what disagreed."""
    eq = point.equation(table_limit)
    problems: list[str] = []
    oracle = brute_count(eq)
    try:
        result = count_auto(eq)
        count, method = result.value, result.method
    except DiagcountError as e:
        problems.append(f"closed forms: {e}")
        count, method = oracle, CountMethod.oracle
    if count != oracle:
        problems.append(f"{method.value} gave {count}, oracle {oracle}")

    bound = weil_bound(eq.d, eq.size, eq.b.is_zero)
    deviation = abs(oracle - eq.size ** (eq.s - 1))
    if not bound.admits(deviation):
        problems.append(f"deviation {deviation} exceeds the bound {bound}")

    verdict = None
    if len(set(eq.d)) == 1 and not problems:
        try:
            verdict = classify_affine(eq).verdict
        except DiagcountError as e:
            problems.append(f"classifier: {e}")

    if problems:
        logger.warning("grid_point_mismatch", equation=str(eq), problems=problems)
    level = math.lcm(*eq.d)
    return GridRow(
        p=point.p,
        t=point.t,
        s=eq.s,
        d=list(eq.d),
        a_classes=eq.classes(),
        b_class="0" if eq.b.is_zero else str(power_residue_class(eq.b, level)),
        count=count,
        method=method,
        oracle=oracle,
        bound=str(bound),
        attained=bound.attained(deviation),
        verdict=verdict,
        problems=problems,
    )


async def _evaluate_parallel(points: Sequence[GridPoint], jobs: int, table_limit: int) -> list[GridRow]:
    rows: list[GridRow | None] = [None] * len(points)
    limiter = anyio.CapacityLimiter(jobs)

    async def run(index: int, point: GridPoint) -> None:
        rows[index] = await anyio.to_process.run_sync(evaluate_point, point, table_limit, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for index, point in enumerate(points):
            tg.start_soon(run, index, point)
    return [row for row in rows if row is not None]


def verify_grid(
    spec: GridSpec, *, force: bool = False, table_limit: int = 2**22
) -> tuple[GridReport, list[GridRow]]:
    """Run the sweep; returns the report (first mismatching rows only) and every row in grid order."""
    points = list(grid_points(spec))
    work = estimate_work(points)
    logger.info("grid_started", points=len(points), estimated_work=work, jobs=spec.jobs)
    if work > GRID_WORK_LIMIT and not force:
        raise GridTooLargeError(
            f"estimated work {work} exceeds {GRID_WORK_LIMIT} basic operations; rerun with --force"
        )
    if spec.jobs > 1:
        rows = anyio.run(_evaluate_parallel, points, spec.jobs, table_limit)
    else:
        rows = [evaluate_point(point, table_limit) for point in points]
    bad = [row for row in rows if not row.ok]
    logger.info("grid_finished", points=len(rows), mismatches=len(bad))
    report = GridReport(points=len(rows), mismatches=len(bad), estimated_work=work, rows=bad[:REPORT_ROWS])
    return report, rows


def rows_to_csv(rows: Sequence[GridRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.p,
                row.t,
                row.s,
                " ".join(map(str, row.d)),
                " ".join(map(str, row.a_classes)),
                row.b_class,
                row.count,
                row.method.value,
                row.oracle,
                row.bound,
                row.attained,
                row.verdict.value if row.verdict else "",
            ]
        )
    return buffer.getvalue()


__all__ = [
    "B_CHOICES",
    "CSV_COLUMNS",
    "GRID_WORK_LIMIT",
    "GridPoint",
    "estimate_work",
    "evaluate_point",
    "grid_points",
    "rows_to_csv",
    "verify_grid",
    "witnessed_exponents",
]
