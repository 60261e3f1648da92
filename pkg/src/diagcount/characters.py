"""Multiplicative and additive characters, Jacobi sums and power sums.

Characters are pinned to the primitive element of their field: chi_d(alpha) = zeta_d,
so chi_d^l(alpha^k) = zeta_d^(l k). Every character evaluates to 0 at 0.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import structlog
import sympy

from .cyclotomic import CycInt, abs_square, root_power, roots_of_unity
from .errors import (
    ArityError,
    DiagcountError,
    DNotDividingError,
    EnumerationTooLargeError,
    ExclusionViolatedError,
    MixedFieldsError,
    ModulusMismatchError,
    NonSquareFieldError,
    TrivialCharacterError,
    WitnessInvalidError,
    WitnessMissingError,
    ZeroCoefficientError,
    ZeroInputError,
)
from .gf import FieldCtx, FieldElement, power_residue_class

logger = structlog.get_logger(__name__)

DIRECT_SUM_LIMIT = 10**7

JacobiMethod = Literal["convolution", "direct"]


@dataclass(frozen=True, slots=True)
class MultCharacter:
    """chi_order^exponent on the units of ``field``."""

    field: FieldCtx
    order: int
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.order < 1 or self.field.unit_order % self.order:
            raise DNotDividingError(
                f"character order {self.order} does not divide "
                f"{self.field.unit_order} = |{self.field.label}^*|"
            )
        object.__setattr__(self, "exponent", self.exponent % self.order)

    @property
    def is_trivial(self) -> bool:
        return self.exponent == 0

    @property
    def exact_order(self) -> int:
        return self.order // math.gcd(self.order, self.exponent)

    def step(self, level: int) -> int:
        """e with chi(alpha) = zeta_level^e; level must be a multiple of the order."""
        return self.exponent * (level // self.order) % level

    def __mul__(self, other: MultCharacter) -> MultCharacter:
        if other.field != self.field:
            raise MixedFieldsError(f"characters of {self.field.label} and {other.field.label}")
        level = math.lcm(self.order, other.order)
        return MultCharacter(self.field, level, self.step(level) + other.step(level))

    def __call__(self, x: FieldElement) -> CycInt:
        return char_eval(self, x)

    def __str__(self) -> str:
        return f"chi_{self.order}^{self.exponent}"


@dataclass(frozen=True, slots=True)
class AdditiveCharacter:
    """psi_a(x) = zeta_p^tr(a x)."""

    field: FieldCtx
    shift: FieldElement

    def exponent_of(self, x: FieldElement) -> int:
        return int(self.field.trace_table[(self.shift * x).encoding])

    def __call__(self, x: FieldElement) -> CycInt:
        return root_power(self.field.p, self.exponent_of(x))


def char_eval(chi: MultCharacter, x: FieldElement) -> CycInt:
    chi.field._check(x)
    if x.exponent is None:
        return CycInt.zero(chi.order)
    return root_power(chi.order, chi.exponent * x.exponent)


def theta(d: int, a: FieldElement, b: FieldElement) -> int:
    """1 when a and b lie in the same d-th power class, else 0."""
    a.field._check(b)
    return int(power_residue_class(a, d) == power_residue_class(b, d))


def _validate_characters(chars: Sequence[MultCharacter], b: FieldElement) -> FieldCtx:
    if len(chars) < 2:
        raise ArityError(f"a Jacobi sum needs at least two characters, got {len(chars)}")
    ctx = chars[0].field
    for chi in chars:
        if chi.field != ctx:
            raise MixedFieldsError(f"characters over {chi.field.label} and {ctx.label} in one Jacobi sum")
        if chi.is_trivial:
            raise TrivialCharacterError(f"trivial character {chi} in a Jacobi sum")
    ctx._check(b)
    return ctx


def _jacobi_convolution(ctx: FieldCtx, chars: Sequence[MultCharacter], b: FieldElement, level: int) -> CycInt:
    # state[z, e] counts tuples of nonzero summands with sum z and character exponent e.
    ks = np.arange(ctx.unit_order, dtype=np.int64)
    encodings = ctx.exp_table
    big = ctx.q_total ** (len(chars) - 1) >= 2**62
    dtype = object if big else np.int64
    state = np.zeros((ctx.q_total, level), dtype=dtype)
    state[encodings, chars[0].step(level) * ks % level] = 1
    for chi in chars[1:]:
        shifts = chi.step(level) * ks % level
        folded = np.zeros_like(state)
        for k in range(ctx.unit_order):
            folded += np.roll(ctx.translate(state, int(encodings[k])), int(shifts[k]), axis=1)
        state = folded
    return CycInt.from_powers(level, [int(v) for v in state[b.encoding]])


def _jacobi_direct(ctx: FieldCtx, chars: Sequence[MultCharacter], b: FieldElement, level: int) -> CycInt:
    if ctx.unit_order ** (len(chars) - 1) > DIRECT_SUM_LIMIT:
        raise EnumerationTooLargeError(
            f"direct Jacobi sum over {ctx.label} with {len(chars)} characters "
            f"exceeds {DIRECT_SUM_LIMIT} terms"
        )
    steps = [chi.step(level) for chi in chars]
    vector = [0] * level
    for head in itertools.product(range(ctx.unit_order), repeat=len(chars) - 1):
        partial = ctx.zero()
        for k in head:
            partial = partial + ctx.element(k)
        last = b - partial
        if last.exponent is None:
            continue
        e = sum(s * k for s, k in zip(steps, head, strict=False)) + steps[-1] * last.exponent
        vector[e % level] += 1
    return CycInt.from_powers(level, vector)


def jacobi_sum(
    chars: Sequence[MultCharacter], b: FieldElement, *, method: JacobiMethod = "convolution"
) -> CycInt:
    """J(chi_1, ..., chi_k, b) = sum over b_1 + ... + b_k = b of chi_1(b_1) ... chi_k(b_k).

    The value lives in Z[zeta_D] with D the lcm of the character orders.
    """
    ctx = _validate_characters(chars, b)
    level = math.lcm(*(chi.order for chi in chars))
    if method == "direct":
        return _jacobi_direct(ctx, chars, b, level)
    if method != "convolution":
        raise DiagcountError(f"unknown Jacobi sum method {method!r}")
    return _jacobi_convolution(ctx, chars, b, level)


def expected_abs_square(chars: Sequence[MultCharacter], b: FieldElement) -> int:
    """|J|^2 predicted from whether b and the product character are trivial."""
    ctx = _validate_characters(chars, b)
    k = len(chars)
    product = chars[0]
    for chi in chars[1:]:
        product = product * chi
    size = ctx.q_total
    if not b.is_zero:
        return size ** (k - 1) if not product.is_trivial else size ** (k - 2)
    return 0 if not product.is_trivial else (size - 1) ** 2 * size ** (k - 2)


def _split_size(ctx: FieldCtx) -> tuple[int, int]:
    try:
        return ctx.half_degree, ctx.sqrt_size
    except NonSquareFieldError as e:
        raise WitnessInvalidError(f"{ctx.label} is not an even-degree extension") from e


def hermitian_jacobi_value(chi1: MultCharacter, chi2: MultCharacter) -> int:
    """J(chi_n^l1, chi_m^l2, 1) over F_{p^2t} when n and m divide p^r + 1 for some r | t.

    The value is -1 for a trivial product and -eps * p^t otherwise, eps = (-1)^(t/r).
    """
    ctx = _validate_characters([chi1, chi2], chi1.field.one())
    t, q = _split_size(ctx)
    for r in sympy.divisors(t):
        modulus = ctx.p**r + 1
        if modulus % chi1.order == 0 and modulus % chi2.order == 0:
            break
    else:
        raise WitnessMissingError(
            f"no divisor r of t={t} with {chi1.order} and {chi2.order} both dividing {ctx.p}^r+1"
        )
    if (chi1 * chi2).is_trivial:
        return -1
    eps = (-1) ** (t // r)
    return -eps * q


def power_sum(c: FieldElement, a: FieldElement, d: int) -> CycInt:
    """sum over all x in the field of psi_{c a}(x^d), exact in Z[zeta_p]."""
    ctx = a.field
    ctx._check(c)
    if a.exponent is None:
        raise ZeroCoefficientError("power sum with coefficient a = 0")
    if d < 1 or ctx.unit_order % d:
        raise DNotDividingError(f"d={d} does not divide {ctx.unit_order}")
    if c.exponent is None:
        return CycInt.from_int(ctx.q_total, ctx.p)
    ks = np.arange(ctx.unit_order, dtype=np.int64)
    logs = (c.exponent + a.exponent + d * ks) % ctx.unit_order
    traces = ctx.trace_table[ctx.exp_table[logs]]
    vector = np.bincount(traces, minlength=ctx.p)
    vector[0] += 1
    return CycInt.from_powers(ctx.p, [int(v) for v in vector])


def wolfmann_closed_power_sum(c: FieldElement, a: FieldElement, d: int, r: int) -> int:
    """Closed form of :func:`power_sum` over F_{p^2t} when d | p^r + 1 and r | t."""
    ctx = a.field
    ctx._check(c)
    if c.exponent is None or a.exponent is None:
        raise ZeroInputError("closed power sum needs nonzero c and a")
    t, q = _split_size(ctx)
    if r < 1 or t % r or (ctx.p**r + 1) % d:
        raise WitnessInvalidError(f"r={r} is not a divisor of t={t} with {d} | {ctx.p}^{r}+1")
    eps = (-1) ** (t // r)
    target = ctx.one() if eps ** ((ctx.p**r + 1) // d) == 1 else -ctx.one()
    if (c * a) ** (ctx.unit_order // d) == target:
        return -eps * (d - 1) * q
    return eps * q


def is_pure(x: CycInt, modulus_square: int) -> bool:
    """True when some positive power of x is a rational integer.

    Decided by testing x^2 = modulus_square * u over the roots of unity u of Q(zeta).
    """
    if abs_square(x) != modulus_square:
        raise ModulusMismatchError(f"|x|^2 of {x} is not {modulus_square}")
    square = x * x
    return any(square == u * modulus_square for u in roots_of_unity(x.level))


def purity_scan(field: FieldCtx, d: int, s: int) -> bool:
    """Whether J(chi_d^l1, ..., chi_d^ls, 1) is pure for every l with sum(l) not divisible by d."""
    if s < 2:
        raise ArityError(f"purity scan needs s >= 2, got {s}")
    if s == 3 and d <= 3:
        raise ExclusionViolatedError(f"s=3 requires d > 3, got d={d}")
    one = field.one()
    modulus_square = field.q_total ** (s - 1)
    for exponents in itertools.product(range(1, d), repeat=s):
        if sum(exponents) % d == 0:
            continue
        value = jacobi_sum([MultCharacter(field, d, ell) for ell in exponents], one)
        if not is_pure(value, modulus_square):
            logger.info("impure_jacobi_sum", field=field.label, d=d, exponents=list(exponents))
            return False
    return True


__all__ = [
    "AdditiveCharacter",
    "MultCharacter",
    "char_eval",
    "expected_abs_square",
    "hermitian_jacobi_value",
    "is_pure",
    "jacobi_sum",
    "power_sum",
    "purity_scan",
    "theta",
    "wolfmann_closed_power_sum",
]
