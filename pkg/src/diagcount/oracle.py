"""Brute-force solution counts used as ground truth for every closed form."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal

import numpy as np
import structlog

from .errors import (
    ArityError,
    DiagcountError,
    EnumerationTooLargeError,
    FieldTooLargeError,
    ZeroCoefficientError,
)
from .gf import FieldCtx, FieldElement
from .schemas import CurvePointCounts

if TYPE_CHECKING:
    from .counting import DiagonalEquation

logger = structlog.get_logger(__name__)

ORACLE_FIELD_LIMIT = 2**16
ORACLE_MAX_ARITY = 8
NAIVE_LIMIT = 10**8
PROJECTIVE_FIELD_LIMIT = 2**12

OracleMethod = Literal["convolution", "naive"]


@dataclass(frozen=True, slots=True)
class ValueDistribution:
    """counts[v] = #{x in F : a x^d = v}, indexed by element encoding."""

    field: FieldCtx
    counts: np.ndarray = field(compare=False, repr=False)

    @classmethod
    def of_monomial(cls, a: FieldElement, d: int) -> ValueDistribution:
        if a.exponent is None:
            raise ZeroCoefficientError("distribution of 0 * x^d")
        ctx = a.field
        ks = np.arange(ctx.unit_order, dtype=np.int64)
        values = ctx.exp_table[(a.exponent + d * ks) % ctx.unit_order]
        counts = np.bincount(values, minlength=ctx.q_total).astype(np.int64)
        counts[0] += 1
        return cls(ctx, counts)

    def fiber_sizes(self) -> dict[int, int]:
        """Fiber size -> number of nonzero values with a fiber of that size."""
        sizes = Counter(int(c) for c in self.counts[1:] if c)
        return dict(sizes)


def _dtype_for(ctx: FieldCtx, arity: int) -> type | np.dtype:
    return object if ctx.q_total**arity >= 2**62 else np.int64


def _convolve(ctx: FieldCtx, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """out[z] = sum over v of left[v] * right[z - v], additive group of ctx."""
    out = np.zeros_like(right)
    for weight in np.unique(left[left != 0]):
        block = np.zeros_like(right)
        for v in np.flatnonzero(left == weight):
            block += ctx.translate(right, int(v))
        out += block * weight
    return out


def _evaluate_at(ctx: FieldCtx, left: np.ndarray, right: np.ndarray, target: int) -> int:
    """The single entry out[target] of the convolution of left and right."""
    reflected = right[ctx.neg_table]
    return int(np.dot(left, ctx.translate(reflected, target)))


def _check_size(ctx: FieldCtx, arity: int, limit: int = ORACLE_FIELD_LIMIT) -> None:
    if ctx.q_total > limit:
        raise FieldTooLargeError(f"oracle refuses {ctx.label}: more than {limit} elements")
    if arity > ORACLE_MAX_ARITY:
        raise ArityError(f"oracle supports at most {ORACLE_MAX_ARITY} variables, got {arity}")


def prefix_distributions(a: Sequence[FieldElement], d: Sequence[int]) -> list[np.ndarray]:
    """Value counts of a_1 x_1^d_1 + ... + a_k x_k^d_k for k = 1..s."""
    ctx = a[0].field
    dtype = _dtype_for(ctx, len(a))
    current = ValueDistribution.of_monomial(a[0], d[0]).counts.astype(dtype)
    prefixes = [current]
    for coefficient, exponent in zip(a[1:], d[1:], strict=True):
        factor = ValueDistribution.of_monomial(coefficient, exponent).counts.astype(dtype)
        current = _convolve(ctx, factor, current)
        prefixes.append(current)
    return prefixes


def _naive_count(eq: DiagonalEquation) -> int:
    ctx = eq.field
    if ctx.q_total**eq.s > NAIVE_LIMIT:
        raise EnumerationTooLargeError(f"naive loop over {ctx.label}^{eq.s} exceeds {NAIVE_LIMIT} points")
    columns = [[a * x**d for x in ctx.elements()] for a, d in zip(eq.a, eq.d, strict=True)]
    hits = 0
    for values in itertools.product(*columns):
        total = ctx.zero()
        for v in values:
            total = total + v
        hits += total == eq.b
    return hits


def brute_count(eq: DiagonalEquation, *, method: OracleMethod = "convolution") -> int:
    """Number of solutions of the equation in F^s, by enumeration."""
    ctx = eq.field
    _check_size(ctx, eq.s)
    if method == "naive":
        return _naive_count(eq)
    if method != "convolution":
        raise DiagcountError(f"unknown oracle method {method!r}")
    dtype = _dtype_for(ctx, eq.s)
    if eq.s == 1:
        return int(ValueDistribution.of_monomial(eq.a[0], eq.d[0]).counts[eq.b.encoding])
    head = prefix_distributions(eq.a[:-1], eq.d[:-1])[-1]
    last = ValueDistribution.of_monomial(eq.a[-1], eq.d[-1]).counts.astype(dtype)
    return _evaluate_at(ctx, last, head, eq.b.encoding)


def brute_projective_count(a: Sequence[FieldElement], d: int, *, limit: int = PROJECTIVE_FIELD_LIMIT) -> int:
    """Points of a_1 x_1^d + ... + a_s x_s^d = 0 in P^(s-1).

    Each point is counted once through its representative whose last nonzero
    coordinate is 1; the remaining coordinates are summed through prefix distributions.
    """
    ctx = a[0].field
    _check_size(ctx, len(a), limit)
    if len(a) == 1:
        return 0
    prefixes = prefix_distributions(a[:-1], [d] * (len(a) - 1))
    total = 0
    for k in range(1, len(a)):
        # x_{k+1} = 1 and everything after it is 0.
        total += int(prefixes[k - 1][(-a[k]).encoding])
    return total


def brute_curve_points(
    a: FieldElement, b: FieldElement, c: FieldElement, n: int, m: int
) -> CurvePointCounts:
    """Affine points of a x^n + b y^m = c plus the points of its closure at infinity.

    The closure is taken in P^2 after homogenizing to degree max(n, m); its points
    at infinity solve the top-degree part on the line z = 0. ``closure_infinity`` is
    the closed-form 1 - C(n, m) value, kept alongside for comparison.
    """
    ctx = a.field
    _check_size(ctx, 2)
    ux = ValueDistribution.of_monomial(a, n).counts
    uy = ValueDistribution.of_monomial(b, m).counts
    affine = _evaluate_at(ctx, ux, uy, c.encoding)
    if n == m:
        # [x : 1 : 0] with a x^n = -b; y = 0 would force x = 0.
        infinity = int(ux[(-b).encoding])
    else:
        # the top-degree part is a single monomial, vanishing only at one point.
        infinity = 1
    if n == m:
        g = math.gcd(n, ctx.unit_order)
        same_class = (a.exponent - b.exponent) % g == 0  # type: ignore[operator]
        closure = 1 - ((1 - g) if same_class else 1)
    else:
        closure = 1
    logger.debug("curve_points", field=ctx.label, n=n, m=m, affine=affine, infinity=infinity)
    return CurvePointCounts(affine=affine, infinity=infinity, closure_infinity=closure)


__all__ = [
    "NAIVE_LIMIT",
    "ORACLE_FIELD_LIMIT",
    "ORACLE_MAX_ARITY",
    "PROJECTIVE_FIELD_LIMIT",
    "ValueDistribution",
    "brute_count",
    "brute_curve_points",
    "brute_projective_count",
    "prefix_distributions",
]
