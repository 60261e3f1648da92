"""Closed-form solution counts for diagonal equations.

The closed forms apply over fields of size Q = q^2 = p^(2t) with p odd, when the
exponents admit witnesses r | t with d | p^r + 1. ``count_auto`` picks every
closed form that applies, checks that they agree, and otherwise falls back to
the brute-force oracle.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import structlog
import sympy

from .characters import AdditiveCharacter, MultCharacter, char_eval, jacobi_sum, power_sum, theta
from .cyclotomic import CycInt
from .errors import (
    ArityError,
    DiagcountError,
    DNotDividingError,
    DTooSmallError,
    EnumerationTooLargeError,
    EvenCharacteristicError,
    FormulaMismatchError,
    MixedFieldsError,
    NonzeroBError,
    TrivialExponentError,
    WitnessMissingError,
    ZeroBError,
    ZeroCoefficientError,
)
from .gf import FieldCtx, FieldElement, power_residue_class
from .oracle import brute_count
from .schemas import CountMethod, CountResult, ExactBound, ExponentWitness

logger = structlog.get_logger(__name__)

ENUMERATION_LIMIT = 10**8
EXPANSION_LIMIT = 10**4


@dataclass(frozen=True, slots=True)
class DiagonalEquation:
    """a_1 x_1^d_1 + ... + a_s x_s^d_s = b over ``field``.

    Exponents are stored reduced to gcd(d_i, |F^*|), which leaves the count unchanged.
    """

    field: FieldCtx
    a: tuple[FieldElement, ...]
    d: tuple[int, ...]
    b: FieldElement

    @classmethod
    def create(
        cls, field: FieldCtx, a: Sequence[FieldElement], d: Sequence[int], b: FieldElement | None = None
    ) -> DiagonalEquation:
        if not a or len(a) != len(d):
            raise ArityError(
                f"need matching, non-empty coefficient and exponent lists ({len(a)} vs {len(d)})"
            )
        b = field.zero() if b is None else b
        for x in (*a, b):
            if x.field != field:
                raise MixedFieldsError(f"element of {x.field.label} in an equation over {field.label}")
        for i, coefficient in enumerate(a):
            if coefficient.is_zero:
                raise ZeroCoefficientError(f"coefficient a_{i + 1} is zero")
        reduced = []
        for i, exponent in enumerate(d):
            if exponent < 1:
                raise DTooSmallError(f"exponent d_{i + 1}={exponent} must be positive")
            reduced.append(math.gcd(exponent, field.unit_order))
        if 1 in reduced:
            i = reduced.index(1)
            count = field.q_total ** (len(a) - 1)
            raise TrivialExponentError(
                f"exponent d_{i + 1}={d[i]} is coprime to {field.unit_order}; the count is {count}", count
            )
        return cls(field, tuple(a), tuple(reduced), b)

    @property
    def s(self) -> int:
        return len(self.a)

    @property
    def size(self) -> int:
        return self.field.q_total

    def classes(self) -> list[int]:
        """Power residue class of each a_i modulo its own exponent."""
        return [power_residue_class(a, d) for a, d in zip(self.a, self.d, strict=True)]

    def __str__(self) -> str:
        terms = " + ".join(f"{a}*x{i + 1}^{d}" for i, (a, d) in enumerate(zip(self.a, self.d, strict=True)))
        return f"{terms} = {self.b} over {self.field.label}"


def find_witness(d: int, p: int, t: int) -> int | None:
    """Smallest divisor r of t with d | p^r + 1."""
    if d < 2:
        raise DTooSmallError(f"witness search needs d >= 2, got {d}")
    for r in sympy.divisors(t):
        if (p**r + 1) % d == 0:
            return int(r)
    return None


def common_witness(d: Sequence[int], p: int, t: int) -> int | None:
    """Smallest divisor r of t with every d_i | p^r + 1."""
    for r in sympy.divisors(t):
        if all((p**r + 1) % di == 0 for di in d):
            return int(r)
    return None


def _square_field(field: FieldCtx) -> tuple[int, int]:
    if field.p == 2:
        raise EvenCharacteristicError("closed forms need odd characteristic")
    return field.half_degree, field.sqrt_size


def exponent_witness(eq: DiagonalEquation) -> ExponentWitness:
    t, q = _square_field(eq.field)
    rs = [find_witness(d, eq.field.p, t) for d in eq.d]
    return ExponentWitness(
        t=t,
        r=rs,
        eps=[None if r is None else (-1) ** (t // r) for r in rs],
        lambda_flag=[(q + 1) % d == 0 for d in eq.d],
        common_r=common_witness(eq.d, eq.field.p, t),
    )


def _resolve_common(eq: DiagonalEquation, r: int | None) -> tuple[int, int, int]:
    """(t, q, r) after checking r, or finding the smallest common witness."""
    t, q = _square_field(eq.field)
    if r is None:
        r = common_witness(eq.d, eq.field.p, t)
        if r is None:
            raise WitnessMissingError(
                f"no divisor r of t={t} with every exponent of {list(eq.d)} dividing {eq.field.p}^r+1"
            )
        return t, q, r
    if r < 1 or t % r:
        raise WitnessMissingError(f"r={r} does not divide t={t}")
    for i, d in enumerate(eq.d):
        if (eq.field.p**r + 1) % d:
            raise WitnessMissingError(f"exponent d_{i + 1}={d} does not divide {eq.field.p}^{r}+1", index=i)
    return t, q, r


def _q_power_times(q: int, exponent: int, value: int) -> int:
    """q^exponent * value, exact also for negative exponents."""
    if exponent >= 0:
        return value * q**exponent
    quotient, remainder = divmod(value, q ** (-exponent))
    if remainder:
        raise FormulaMismatchError(f"{value} is not divisible by {q}^{-exponent}")
    return quotient


def class_product_sum(classes: Sequence[int], d: Sequence[int], offsets: Sequence[int], upper: int) -> int:
    """sum_{j=1}^{upper} prod_i (1 - d_i)^[classes_i == offsets_i + j mod d_i].

    The summand has period lcm(d); ``upper`` must be a multiple of it.
    """
    period = math.lcm(*d)
    if upper % period:
        raise FormulaMismatchError(f"summation length {upper} is not a multiple of the period {period}")
    total = 0
    for j in range(1, period + 1):
        term = 1
        for c, di, off in zip(classes, d, offsets, strict=True):
            if (c - off - j) % di == 0:
                term *= 1 - di
        total += term
    return total * (upper // period)


def theta_class_sum(d: int, b: FieldElement, upper: int) -> int:
    """sum_{j=1}^{upper} (1 - d)^theta_d(alpha^j, b); vanishes whenever d | upper."""
    ctx = b.field
    return sum((1 - d) ** theta(d, ctx.element(j), b) for j in range(1, upper + 1))


def divisor_product_sum(d: Sequence[int], upper: int) -> int:
    """sum_{m=1}^{upper} prod_{d_i | m} (1 - d_i), for upper a multiple of lcm(d)."""
    return class_product_sum([0] * len(d), d, [0] * len(d), upper)


def count_b0_mixed(eq: DiagonalEquation) -> CountResult:
    """Count for b = 0 when every exponent has its own witness r_i."""
    if not eq.b.is_zero:
        raise NonzeroBError("the mixed-exponent count needs b = 0")
    witness = exponent_witness(eq)
    for i, r in enumerate(witness.r):
        if r is None:
            raise WitnessMissingError(
                f"no divisor r of t={witness.t} with {eq.d[i]} | {eq.field.p}^r+1 for exponent index {i}",
                index=i,
            )
    q = eq.field.sqrt_size
    sign = math.prod(e for e in witness.eps if e is not None)
    offsets = [(q + 1) // 2 if flag else 0 for flag in witness.lambda_flag]
    total = sign * class_product_sum(eq.classes(), eq.d, offsets, eq.size - 1)
    value = eq.size ** (eq.s - 1) + _q_power_times(q, eq.s - 2, total)
    return CountResult(value=value, method=CountMethod.mixed_theorem, witness=witness)


def count_b0_common(eq: DiagonalEquation, r: int | None = None) -> CountResult:
    """Count for b = 0 when one witness r serves every exponent."""
    if not eq.b.is_zero:
        raise NonzeroBError("the common-witness count for b = 0 needs b = 0")
    t, q, r = _resolve_common(eq, r)
    eps = (-1) ** (t // r)
    total = class_product_sum(eq.classes(), eq.d, [0] * eq.s, q - eps)
    value = eq.size ** (eq.s - 1) + eps**eq.s * _q_power_times(q, eq.s - 2, (q + eps) * total)
    return CountResult(value=value, method=CountMethod.common_corollary, witness=exponent_witness(eq))


def count_bnz(eq: DiagonalEquation, r: int | None = None) -> CountResult:
    """Count for b != 0 with a common witness r."""
    if eq.b.is_zero:
        raise ZeroBError("the nonzero-b count needs b != 0")
    t, q, r = _resolve_common(eq, r)
    eps = (-1) ** (t // r)
    nu = math.prod((1 - d) ** theta(d, a, eq.b) for a, d in zip(eq.a, eq.d, strict=True))
    total = class_product_sum(eq.classes(), eq.d, [0] * eq.s, q - eps)
    value = eq.size ** (eq.s - 1) - eps ** (eq.s + 1) * _q_power_times(q, eq.s - 2, q * nu - total)
    return CountResult(value=value, method=CountMethod.nonzero_theorem, witness=exponent_witness(eq))


def count_s2(eq: DiagonalEquation, r: int | None = None) -> CountResult:
    """Two-variable count, any b."""
    if eq.s != 2:
        raise ArityError(f"the two-variable count needs s = 2, got {eq.s}")
    t, q, r = _resolve_common(eq, r)
    eps = (-1) ** (t // r)
    (a1, a2), (d1, d2) = eq.a, eq.d
    size = eq.size
    gcd = math.gcd(d1, d2)
    shared = (1 - gcd) ** theta(gcd, a1, a2)
    if eq.b.is_zero:
        value = size - (size - 1) * shared
    else:
        nu = (1 - d1) ** theta(d1, a1, eq.b) * (1 - d2) ** theta(d2, a2, eq.b)
        value = size - eps * q * nu - eps * (q - eps) * shared
    return CountResult(value=value, method=CountMethod.s2_proposition, witness=exponent_witness(eq))


def count_jacobi_expansion(eq: DiagonalEquation) -> CountResult:
    """N = Q^(s-1) + sum over nontrivial exponent tuples of prod chi_i(1/a_i) * J(chi_1, ..., chi_s, b)."""
    ctx = eq.field
    terms = math.prod(d - 1 for d in eq.d)
    if terms > EXPANSION_LIMIT:
        raise EnumerationTooLargeError(f"Jacobi expansion needs {terms} sums, above {EXPANSION_LIMIT}")
    if eq.s == 1:
        value = 1 if eq.b.is_zero else eq.d[0] * theta(eq.d[0], eq.a[0], eq.b)
        return CountResult(value=value, method=CountMethod.jacobi_expansion)
    level = math.lcm(*eq.d)
    total = CycInt.from_int(ctx.q_total ** (eq.s - 1), level)
    inverses = [a.inverse() for a in eq.a]
    for exponents in itertools.product(*(range(1, d) for d in eq.d)):
        chars = [MultCharacter(ctx, d, ell) for d, ell in zip(eq.d, exponents, strict=True)]
        weight = CycInt.from_int(1, level)
        for chi, inverse in zip(chars, inverses, strict=True):
            weight = weight * char_eval(chi, inverse)
        total = total + weight * jacobi_sum(chars, eq.b)
    value = total.as_rational_integer()
    if value is None:
        raise FormulaMismatchError(f"Jacobi expansion of {eq} is not a rational integer: {total}")
    return CountResult(value=value, method=CountMethod.jacobi_expansion)


def count_additive_expansion(eq: DiagonalEquation) -> CountResult:
    """N = Q^-1 sum_c psi_c(-b) prod_i S_i(c), with S_i the full-field power sums."""
    ctx = eq.field
    sums: dict[tuple[int, int], CycInt] = {}
    total = CycInt.zero(ctx.p)
    minus_b = -eq.b
    for c in ctx.elements():
        term = AdditiveCharacter(ctx, c)(minus_b)
        for a, d in zip(eq.a, eq.d, strict=True):
            if c.exponent is None:
                term = term * ctx.q_total
                continue
            # S_i(c) only depends on the d-th power class of c * a_i.
            key = (d, (c.exponent + a.exponent) % d)  # type: ignore[operator]
            if key not in sums:
                sums[key] = power_sum(c, a, d)
            term = term * sums[key]
        total = total + term
    scaled = total.as_rational_integer()
    if scaled is None or scaled % ctx.q_total:
        raise FormulaMismatchError(
            f"additive expansion of {eq} gave {total}, not a multiple of {ctx.q_total}"
        )
    return CountResult(value=scaled // ctx.q_total, method=CountMethod.additive_expansion)


def count_auto(eq: DiagonalEquation) -> CountResult:
    """Most specific applicable closed form, cross-checked against the others; oracle otherwise."""
    forms: list[tuple[CountMethod, Callable[[], CountResult]]] = []
    try:
        witness = exponent_witness(eq)
    except DiagcountError:
        witness = None
    if witness is not None:
        if witness.common_r is not None:
            if eq.s == 2:
                forms.append((CountMethod.s2_proposition, lambda: count_s2(eq)))
            if eq.b.is_zero:
                forms.append((CountMethod.common_corollary, lambda: count_b0_common(eq)))
            else:
                forms.append((CountMethod.nonzero_theorem, lambda: count_bnz(eq)))
        if eq.b.is_zero and witness.complete:
            forms.append((CountMethod.mixed_theorem, lambda: count_b0_mixed(eq)))
    if not forms:
        logger.debug("count_dispatched", equation=str(eq), method=CountMethod.oracle.value)
        return CountResult(value=brute_count(eq), method=CountMethod.oracle, witness=witness)

    results = [compute() for _, compute in forms]
    values = {result.value for result in results}
    if len(values) > 1:
        found = {result.method.value: result.value for result in results}
        logger.error("closed_form_mismatch", equation=str(eq), values=found)
        raise FormulaMismatchError(f"closed forms disagree for {eq}: {found}")
    logger.debug("count_dispatched", equation=str(eq), method=results[0].method.value)
    return results[0]


def i_value_over_period(d: Sequence[int], period: int) -> int:
    """(-1)^s / period * sum_{m=1}^{period} prod_{d_i | m} (1 - d_i), for any common multiple period."""
    for di in d:
        if period % di:
            raise DNotDividingError(f"{di} does not divide the period {period}")
    total = (-1) ** len(d) * divisor_product_sum(d, period)
    quotient, remainder = divmod(total, period)
    if remainder:
        raise FormulaMismatchError(f"period sum {total} for {list(d)} is not divisible by {period}")
    return quotient


def i_value_prime_power(d: Sequence[int], p: int, r: int) -> int:
    """I(d) read off one period of length p^r + 1; needs every d_i | p^r + 1."""
    return i_value_over_period(d, p**r + 1)


def _i_enumerate(d: Sequence[int]) -> int:
    tuples = math.prod(di - 1 for di in d)
    if tuples > ENUMERATION_LIMIT:
        raise EnumerationTooLargeError(
            f"{tuples} exponent tuples exceed the enumeration limit {ENUMERATION_LIMIT}"
        )
    level = math.lcm(*d)
    # residues[k] = number of partial tuples with sum(y_i / d_i) = k / level mod 1
    residues = np.zeros(level, dtype=object)
    residues[0] = 1
    for di in d:
        step = level // di
        residues = sum(np.roll(residues, y * step) for y in range(1, di))
    return int(residues[0])


def _i_inclusion_exclusion(d: Sequence[int]) -> int:
    total = 1
    for size in range(1, len(d) + 1):
        for subset in itertools.combinations(d, size):
            total += (-1) ** size * (math.prod(subset) // math.lcm(*subset))
    return (-1) ** len(d) * total


def i_value(d: Sequence[int], method: str = "inclusion_exclusion") -> int:
    """Number of tuples y_i in [1, d_i - 1] with sum(y_i / d_i) an integer."""
    if not d:
        raise ArityError("I needs at least one exponent")
    for di in d:
        if di < 2:
            raise DTooSmallError(f"I needs every d_i >= 2, got {di}")
    if method == "enumerate":
        return _i_enumerate(d)
    if method == "lcm_formula":
        return i_value_over_period(d, math.lcm(*d))
    if method == "inclusion_exclusion":
        return _i_inclusion_exclusion(d)
    raise DiagcountError(f"unknown I method {method!r}")


def i_is_zero_predicate(d: Sequence[int]) -> bool:
    """Vanishing criterion for I(d) with s > 2."""
    if len(d) <= 2:
        raise ArityError(f"the vanishing criterion needs s > 2, got {len(d)}")
    total = math.prod(d)
    for di in d:
        if math.gcd(di, total // di) == 1:
            return True
    even = [di for di in d if di % 2 == 0]
    odd = [di for di in d if di % 2]
    if len(even) % 2 == 0:
        return False
    halves = [di // 2 for di in even]
    if any(math.gcd(x, y) != 1 for x, y in itertools.combinations(halves, 2)):
        return False
    return all(math.gcd(e, o) == 1 for e in even for o in odd)


def weil_bound(d: Sequence[int], size: int, b_is_zero: bool) -> ExactBound:
    """Weil's bound on |N - Q^(s-1)| as an exact rational + coefficient * sqrt(Q)."""
    s = len(d)
    i_d = i_value(d)
    if b_is_zero:
        lead = i_d * (size - 1)
        if s % 2 == 0:
            return ExactBound(rational=lead * size ** ((s - 2) // 2), radicand=size)
        if s == 1:
            return ExactBound(rational=0, radicand=size)
        return ExactBound(sqrt_coefficient=lead * size ** ((s - 3) // 2), radicand=size)
    spread = math.prod(di - 1 for di in d) - i_d
    if s % 2 == 0:
        scale = size ** ((s - 2) // 2)
        return ExactBound(rational=scale * i_d, sqrt_coefficient=scale * spread, radicand=size)
    if s == 1:
        return ExactBound(rational=spread, radicand=size)
    return ExactBound(
        rational=size ** ((s - 1) // 2) * spread, sqrt_coefficient=size ** ((s - 3) // 2) * i_d, radicand=size
    )


def mixed_bound_rhs(eq: DiagonalEquation) -> int:
    """q^(s-2) |sum_{m=1}^{Q-1} prod_{d_i | m} (1 - d_i)|, the bound implied by the mixed count."""
    witness = exponent_witness(eq)
    for i, r in enumerate(witness.r):
        if r is None:
            raise WitnessMissingError(f"exponent index {i} (d={eq.d[i]}) has no witness", index=i)
    return _q_power_times(eq.field.sqrt_size, eq.s - 2, abs(divisor_product_sum(eq.d, eq.size - 1)))


def attaining_mixed_example(field: FieldCtx, d: Sequence[int]) -> DiagonalEquation:
    """x^d_1 + ... + x^d_k + lam x^d_(k+1) + ... + lam x^d_s = 0 with lam = alpha^((q+1)/2).

    Exponents dividing q - 1 get coefficient 1, those dividing q + 1 get lam; the
    count then meets :func:`mixed_bound_rhs` exactly.
    """
    _, q = _square_field(field)
    lam = field.element((q + 1) // 2)
    coefficients = []
    for di in d:
        if (q - 1) % di == 0:
            coefficients.append(field.one())
        elif (q + 1) % di == 0:
            coefficients.append(lam)
        else:
            raise DNotDividingError(f"{di} divides neither q-1={q - 1} nor q+1={q + 1}")
    eq = DiagonalEquation.create(field, coefficients, d)
    mixed_bound_rhs(eq)
    return eq


__all__ = [
    "ENUMERATION_LIMIT",
    "EXPANSION_LIMIT",
    "DiagonalEquation",
    "attaining_mixed_example",
    "class_product_sum",
    "common_witness",
    "count_additive_expansion",
    "count_auto",
    "count_b0_common",
    "count_b0_mixed",
    "count_bnz",
    "count_jacobi_expansion",
    "count_s2",
    "divisor_product_sum",
    "exponent_witness",
    "find_witness",
    "i_is_zero_predicate",
    "i_value",
    "i_value_over_period",
    "i_value_prime_power",
    "mixed_bound_rhs",
    "theta_class_sum",
    "weil_bound",
]
