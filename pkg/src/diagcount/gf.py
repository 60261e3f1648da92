"""Finite fields F_{p^n} in discrete-log form.

A field is built once, deterministically, and carries the tables that make
multiplication, inversion and discrete logs O(1) and addition a Zech lookup.
Elements are either zero or a power of the primitive element ``alpha``.

Encodings: the element a_0 + a_1 x + ... + a_{n-1} x^{n-1} of F_p[x]/(modulus)
is the integer a_0 + a_1 p + ... + a_{n-1} p^{n-1}.
"""

from __future__ import annotations

import threading
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import structlog
import sympy
from cachetools import LRUCache, cached
from numpy.typing import NDArray
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irred_p_ben_or, gf_mul, gf_pow_mod, gf_rem, gf_strip

from .errors import (
    DiagcountError,
    DivisionByZeroError,
    DNotDividingError,
    EvenCharacteristicError,
    FieldTooLargeError,
    FormulaMismatchError,
    LogOfZeroError,
    MixedFieldsError,
    NonSquareFieldError,
    NotPrimeError,
    ZeroInputError,
)

logger = structlog.get_logger(__name__)

DEFAULT_TABLE_LIMIT = 2**22

IntArray = NDArray[np.int64]
ArithOp = Literal["add", "sub", "mul", "neg", "inv"]


def _digits(value: int, p: int, n: int) -> tuple[int, ...]:
    """Base-p digits a_0..a_{n-1} of an encoding."""
    out = []
    for _ in range(n):
        value, digit = divmod(value, p)
        out.append(digit)
    return tuple(out)


def _as_poly(digits: tuple[int, ...]) -> list:
    return gf_strip(ZZ.map(list(reversed(digits))))


def _poly_digits(poly: list, n: int) -> list[int]:
    coeffs = [int(c) for c in reversed(poly)]
    return coeffs + [0] * (n - len(coeffs))


@dataclass(frozen=True, slots=True)
class FieldCtx:
    """An immutable finite field with its lookup tables.

    Two contexts compare equal when they share characteristic, degree, modulus
    and primitive element; the tables are derived data and are read-only.
    """

    p: int
    n: int
    modulus: tuple[int, ...]
    alpha: int
    exp_table: IntArray = field(compare=False, repr=False)
    log_table: IntArray = field(compare=False, repr=False)
    zech_table: IntArray = field(compare=False, repr=False)
    neg_table: IntArray = field(compare=False, repr=False)
    trace_table: IntArray = field(compare=False, repr=False)

    @property
    def q_total(self) -> int:
        return self.p**self.n

    @property
    def unit_order(self) -> int:
        """Order of the multiplicative group, q_total - 1."""
        return self.q_total - 1

    @property
    def label(self) -> str:
        return f"F_{self.q_total}"

    @property
    def is_square_size(self) -> bool:
        return self.n % 2 == 0

    @property
    def half_degree(self) -> int:
        """t with q_total = p^(2t)."""
        if not self.is_square_size:
            raise NonSquareFieldError(f"{self.label} is not of the form p^(2t) (degree {self.n} is odd)")
        return self.n // 2

    @property
    def sqrt_size(self) -> int:
        """q = p^t for a field of size q^2."""
        return self.p**self.half_degree

    def zero(self) -> FieldElement:
        return FieldElement(self, None)

    def one(self) -> FieldElement:
        return FieldElement(self, 0)

    def generator(self) -> FieldElement:
        return FieldElement(self, 1 % self.unit_order)

    def element(self, exponent: int) -> FieldElement:
        """alpha^exponent, with the exponent reduced mod q_total - 1."""
        return FieldElement(self, exponent % self.unit_order)

    def from_encoding(self, encoding: int) -> FieldElement:
        if not 0 <= encoding < self.q_total:
            raise DiagcountError(f"encoding {encoding} outside [0, {self.q_total - 1}] for {self.label}")
        if encoding == 0:
            return self.zero()
        return FieldElement(self, int(self.log_table[encoding]))

    def from_int(self, value: int) -> FieldElement:
        """Image of an integer in the prime subfield."""
        return self.from_encoding(value % self.p)

    def elements(self) -> Iterator[FieldElement]:
        yield self.zero()
        yield from self.units()

    def units(self) -> Iterator[FieldElement]:
        for k in range(self.unit_order):
            yield FieldElement(self, k)

    def digits(self, encoding: int) -> tuple[int, ...]:
        return _digits(encoding, self.p, self.n)

    def log(self, x: FieldElement) -> int:
        """Discrete log of x to the base alpha, in [0, q_total - 2]."""
        self._check(x)
        if x.exponent is None:
            raise LogOfZeroError(f"log of zero in {self.label}")
        return x.exponent

    def translate(self, values: np.ndarray, shift: int) -> np.ndarray:
        """Shift an array indexed by encoding along the additive group.

        Returns ``out`` with ``out[v + c] = values[v]`` where ``c`` is the element with
        encoding ``shift``. Trailing axes beyond the first are carried along untouched.
        """
        grid = (self.p,) * self.n
        shaped = values.reshape(grid + values.shape[1:])
        rolled = np.roll(shaped, tuple(reversed(self.digits(shift))), axis=tuple(range(self.n)))
        return rolled.reshape(values.shape)

    def _check(self, x: FieldElement) -> None:
        if x.field != self:
            raise MixedFieldsError(f"element of {x.field.label} used with {self.label}")


@dataclass(frozen=True, slots=True)
class FieldElement:
    """Zero (``exponent is None``) or alpha^exponent with 0 <= exponent < q_total - 1."""

    field: FieldCtx
    exponent: int | None = None

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    @property
    def encoding(self) -> int:
        if self.exponent is None:
            return 0
        return int(self.field.exp_table[self.exponent])

    def inverse(self) -> FieldElement:
        return arith("inv", self)

    def frobenius(self) -> FieldElement:
        """x^p."""
        return self ** self.field.p

    def __add__(self, other: FieldElement) -> FieldElement:
        return arith("add", self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return arith("sub", self, other)

    def __mul__(self, other: FieldElement) -> FieldElement:
        return arith("mul", self, other)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return arith("mul", self, arith("inv", other))

    def __neg__(self) -> FieldElement:
        return arith("neg", self)

    def __pow__(self, k: int) -> FieldElement:
        if self.exponent is None:
            if k < 0:
                raise DivisionByZeroError(f"zero raised to negative power {k}")
            return self if k else self.field.one()
        return self.field.element(self.exponent * k)

    def __str__(self) -> str:
        return "0" if self.exponent is None else f"alpha^{self.exponent}"

    def __repr__(self) -> str:
        return f"FieldElement({self.field.label}, {self})"


def _add(x: FieldElement, y: FieldElement) -> FieldElement:
    if x.exponent is None:
        return y
    if y.exponent is None:
        return x
    ctx = x.field
    z = int(ctx.zech_table[(y.exponent - x.exponent) % ctx.unit_order])
    if z < 0:
        return ctx.zero()
    return ctx.element(x.exponent + z)


def _neg(x: FieldElement) -> FieldElement:
    if x.exponent is None:
        return x
    ctx = x.field
    return ctx.from_encoding(int(ctx.neg_table[x.encoding]))


def _mul(x: FieldElement, y: FieldElement) -> FieldElement:
    if x.exponent is None or y.exponent is None:
        return x.field.zero()
    return x.field.element(x.exponent + y.exponent)


def _inv(x: FieldElement) -> FieldElement:
    if x.exponent is None:
        raise DivisionByZeroError(f"zero has no inverse in {x.field.label}")
    return x.field.element(-x.exponent)


def arith(op: ArithOp, x: FieldElement, y: FieldElement | None = None) -> FieldElement:
    """Field operation ``op`` on x (and y for the binary operations)."""
    if op in ("neg", "inv"):
        return _neg(x) if op == "neg" else _inv(x)
    if y is None:
        raise DiagcountError(f"operation {op!r} needs two operands")
    x.field._check(y)
    if op == "add":
        return _add(x, y)
    if op == "sub":
        return _add(x, _neg(y))
    if op == "mul":
        return _mul(x, y)
    raise DiagcountError(f"unknown field operation {op!r}")


def trace_to_prime(x: FieldElement) -> int:
    """Absolute trace x + x^p + ... + x^(p^(n-1)) as a residue mod p."""
    total = x.field.zero()
    term = x
    for _ in range(x.field.n):
        total = total + term
        term = term.frobenius()
    value = total.encoding
    if value >= x.field.p:
        raise FormulaMismatchError(f"trace of {x} in {x.field.label} left the prime subfield")
    return value


def power_residue_class(x: FieldElement, d: int) -> int:
    """log(x) mod d; two elements share a class iff their ((q_total-1)/d)-th powers agree."""
    ctx = x.field
    if d < 1 or ctx.unit_order % d:
        raise DNotDividingError(f"d={d} does not divide {ctx.unit_order} = |{ctx.label}^*|")
    if x.exponent is None:
        raise ZeroInputError(f"power residue class of zero (d={d})")
    return x.exponent % d


def _find_modulus(p: int, n: int) -> tuple[int, ...]:
    for k in range(p**n):
        low = _digits(k, p, n)
        if gf_irred_p_ben_or(ZZ.map([1, *reversed(low)]), p, ZZ):
            return (*low, 1)
    raise FormulaMismatchError(f"no monic irreducible of degree {n} over F_{p}")


def _find_alpha(p: int, n: int, modulus: list) -> int:
    order = p**n - 1
    factors = [int(f) for f in sympy.primefactors(order)]
    for encoding in range(1, p**n):
        poly = _as_poly(_digits(encoding, p, n))
        if all(gf_pow_mod(poly, order // f, modulus, p, ZZ) != [ZZ.one] for f in factors):
            return encoding
    raise FormulaMismatchError(f"no primitive element in F_{p}^{n}")


def _multiplier_matrix(factor: list, modulus: list, p: int, n: int) -> IntArray:
    """Matrix of y -> factor * y on the basis 1, x, ..., x^(n-1)."""
    columns = []
    for j in range(n):
        monomial = [ZZ.one] + [ZZ.zero] * j
        columns.append(_poly_digits(gf_rem(gf_mul(factor, monomial, p, ZZ), modulus, p, ZZ), n))
    return np.array(columns, dtype=np.int64).T


def _read_only(array: np.ndarray) -> IntArray:
    array.setflags(write=False)
    return array


def _build_tables(p: int, n: int, modulus: tuple[int, ...], alpha: int) -> dict[str, IntArray]:
    q_total = p**n
    order = q_total - 1
    modulus_poly = ZZ.map(list(reversed(modulus)))

    # rows[k] holds the digits of alpha^k; each pass doubles the block.
    step = _multiplier_matrix(_as_poly(_digits(alpha, p, n)), modulus_poly, p, n)
    rows = np.zeros((1, n), dtype=np.int64)
    rows[0, 0] = 1
    while rows.shape[0] < order:
        rows = np.vstack([rows, rows @ step.T % p])
        step = step @ step % p
    rows = rows[:order]
    exp_table = rows @ (p ** np.arange(n, dtype=np.int64))

    log_table = np.full(q_total, -1, dtype=np.int64)
    log_table[exp_table] = np.arange(order, dtype=np.int64)
    if np.count_nonzero(log_table >= 0) != order:
        raise FormulaMismatchError(f"powers of alpha do not cover F_{q_total}^*")

    encodings = np.arange(q_total, dtype=np.int64)
    low = encodings % p
    plus_one = np.where(low == p - 1, encodings - (p - 1), encodings + 1)
    zech_table = log_table[plus_one[exp_table]]

    companion = _multiplier_matrix([ZZ.one, ZZ.zero], modulus_poly, p, n)
    trace_basis = []
    power = np.eye(n, dtype=np.int64)
    for _ in range(n):
        trace_basis.append(int(np.trace(power)) % p)
        power = power @ companion % p

    neg_table = np.zeros(q_total, dtype=np.int64)
    trace_table = np.zeros(q_total, dtype=np.int64)
    place = 1
    for i in range(n):
        digit = (encodings // place) % p
        neg_table += ((p - digit) % p) * place
        trace_table += digit * trace_basis[i]
        place *= p
    trace_table %= p

    return {
        "exp_table": _read_only(exp_table),
        "log_table": _read_only(log_table),
        "zech_table": _read_only(zech_table),
        "neg_table": _read_only(neg_table),
        "trace_table": _read_only(trace_table),
    }


def check_field_size(p: int, n: int, *, allow_even: bool = False) -> int:
    """p^n after checking n >= 1 and p prime (odd unless ``allow_even``)."""
    if n < 1:
        raise DiagcountError(f"extension degree must be positive, got {n}")
    if not sympy.isprime(p):
        raise NotPrimeError(f"p={p} is not prime")
    if p == 2 and not allow_even:
        raise EvenCharacteristicError("characteristic 2 is only available with allow_even=True")
    return p**n


@cached(cache=LRUCache(maxsize=32), lock=threading.Lock())
def build_field(
    p: int, n: int, *, table_limit: int = DEFAULT_TABLE_LIMIT, allow_even: bool = False
) -> FieldCtx:
    """Build F_{p^n} deterministically.

    The modulus is the first monic irreducible found scanning (c_0, ..., c_{n-1}) in
    ascending base-p order; alpha is the smallest encoding of multiplicative order
    p^n - 1. Results are cached, so repeated builds return the same context.
    """
    size = check_field_size(p, n, allow_even=allow_even)
    if size > table_limit:
        raise FieldTooLargeError(f"F_{p}^{n} has {size} elements, above the table limit {table_limit}")

    modulus = _find_modulus(p, n)
    alpha = _find_alpha(p, n, ZZ.map(list(reversed(modulus))))
    ctx = FieldCtx(p=p, n=n, modulus=modulus, alpha=alpha, **_build_tables(p, n, modulus, alpha))
    logger.info("field_built", p=p, n=n, modulus=list(modulus), alpha=alpha)
    return ctx


__all__ = [
    "DEFAULT_TABLE_LIMIT",
    "FieldCtx",
    "FieldElement",
    "arith",
    "build_field",
    "check_field_size",
    "power_residue_class",
    "trace_to_prime",
]
