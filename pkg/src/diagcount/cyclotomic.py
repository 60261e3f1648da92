"""Exact arithmetic in the cyclotomic rings Z[zeta_D].

A :class:`CycInt` stores its level D and the coefficients of the unique
representative of degree < phi(D) modulo the cyclotomic polynomial Phi_D.
Values at different levels are lifted to the lcm of the levels before any
operation or comparison.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import sympy
from cachetools import LRUCache, cached
from sympy.polys.densearith import dup_exquo, dup_mul, dup_rem
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import ZZ

from .errors import DiagcountError, LevelTooLargeError

MAX_LEVEL = 10**5

CycOp = Literal["add", "sub", "mul", "conj"]


def _check_level(level: int) -> None:
    if level < 1:
        raise DiagcountError(f"cyclotomic level must be positive, got {level}")
    if level > MAX_LEVEL:
        raise LevelTooLargeError(f"cyclotomic level {level} exceeds {MAX_LEVEL}")


def _dense(coeffs: Sequence[int]) -> list:
    """Lowest-first integer coefficients to a stripped sympy dense list."""
    return dup_strip(ZZ.map(list(reversed(coeffs))))


@cached(cache=LRUCache(maxsize=512), lock=threading.Lock())
def cyclotomic_polynomial(level: int) -> tuple[int, ...]:
    """Coefficients of Phi_level, lowest degree first.

    Computed by dividing x^level - 1 exactly by Phi_e for every proper divisor e.
    """
    _check_level(level)
    quotient = _dense([-1] + [0] * (level - 1) + [1])
    for e in sympy.divisors(level)[:-1]:
        quotient = dup_exquo(quotient, _dense(cyclotomic_polynomial(e)), ZZ)
    return tuple(int(c) for c in reversed(quotient))


def _reduce(level: int, vector: Sequence[int]) -> tuple[int, ...]:
    phi = cyclotomic_polynomial(level)
    degree = len(phi) - 1
    remainder = dup_rem(_dense(vector), _dense(phi), ZZ) if len(vector) > degree else _dense(vector)
    coeffs = [int(c) for c in reversed(remainder)]
    return tuple(coeffs + [0] * (degree - len(coeffs)))


def _common_level(a: int, b: int) -> int:
    level = math.lcm(a, b)
    _check_level(level)
    return level


@dataclass(frozen=True, slots=True, eq=False)
class CycInt:
    """Element of Z[zeta_level] in canonical reduced form."""

    level: int
    coeffs: tuple[int, ...]

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_powers(cls, level: int, vector: Sequence[int]) -> CycInt:
        """sum_j vector[j] * zeta_level^j for a vector of any length."""
        _check_level(level)
        return cls(level, _reduce(level, [int(v) for v in vector]))

    @classmethod
    def from_int(cls, value: int, level: int = 1) -> CycInt:
        return cls.from_powers(level, [value])

    @classmethod
    def zero(cls, level: int = 1) -> CycInt:
        return cls.from_int(0, level)

    def lift(self, level: int) -> CycInt:
        if level % self.level:
            raise DiagcountError(f"cannot lift level {self.level} to level {level}")
        if level == self.level:
            return self
        factor = level // self.level
        vector = [0] * ((len(self.coeffs) - 1) * factor + 1)
        for j, c in enumerate(self.coeffs):
            vector[j * factor] = c
        return CycInt.from_powers(level, vector)

    def _align(self, other: CycInt | int) -> tuple[CycInt, CycInt]:
        if isinstance(other, int):
            other = CycInt.from_int(other, self.level)
        level = _common_level(self.level, other.level)
        return self.lift(level), other.lift(level)

    def __add__(self, other: CycInt | int) -> CycInt:
        a, b = self._align(other)
        return CycInt(a.level, tuple(x + y for x, y in zip(a.coeffs, b.coeffs, strict=True)))

    __radd__ = __add__

    def __neg__(self) -> CycInt:
        return CycInt(self.level, tuple(-c for c in self.coeffs))

    def __sub__(self, other: CycInt | int) -> CycInt:
        return self + (-other)

    def __rsub__(self, other: int) -> CycInt:
        return (-self) + other

    def __mul__(self, other: CycInt | int) -> CycInt:
        if isinstance(other, int):
            return CycInt(self.level, tuple(c * other for c in self.coeffs))
        a, b = self._align(other)
        product = dup_mul(_dense(a.coeffs), _dense(b.coeffs), ZZ)
        return CycInt.from_powers(a.level, [int(c) for c in reversed(product)])

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CycInt:
        if k < 0:
            raise DiagcountError("negative powers are not defined in Z[zeta]")
        result = CycInt.from_int(1, self.level)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> CycInt:
        """Complex conjugation zeta -> zeta^-1."""
        vector = [0] * self.level
        for j, c in enumerate(self.coeffs):
            vector[-j % self.level] += c
        return CycInt.from_powers(self.level, vector)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.as_rational_integer() == other
        if not isinstance(other, CycInt):
            return NotImplemented
        a, b = self._align(other)
        return a.coeffs == b.coeffs

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_rational_integer(self) -> int | None:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def to_complex(self) -> complex:
        """Double-precision value under zeta -> exp(2 pi i / level). Display only."""
        roots = np.exp(2j * np.pi * np.arange(len(self.coeffs)) / self.level)
        return complex(roots @ np.array([float(c) for c in self.coeffs]))

    def __str__(self) -> str:
        rational = self.as_rational_integer()
        if rational is not None:
            return str(rational)
        terms = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            monomial = "" if j == 0 else f"z{self.level}" if j == 1 else f"z{self.level}^{j}"
            if not monomial:
                terms.append(str(c))
            elif c == 1:
                terms.append(monomial)
            elif c == -1:
                terms.append(f"-{monomial}")
            else:
                terms.append(f"{c}*{monomial}")
        return " + ".join(terms).replace("+ -", "- ")


def root_power(level: int, j: int) -> CycInt:
    """zeta_level^j."""
    _check_level(level)
    vector = [0] * level
    vector[j % level] = 1
    return CycInt.from_powers(level, vector)


def cyc_arith(op: CycOp, x: CycInt, y: CycInt | None = None) -> CycInt:
    if op == "conj":
        return x.conj()
    if y is None:
        raise DiagcountError(f"operation {op!r} needs two operands")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise DiagcountError(f"unknown cyclotomic operation {op!r}")


def as_rational_integer(x: CycInt) -> int | None:
    return x.as_rational_integer()


def abs_square(x: CycInt) -> CycInt:
    """x * conj(x), a real element of the ring."""
    return x * x.conj()


def roots_of_unity(level: int) -> list[CycInt]:
    """Every root of unity of Q(zeta_level): the values +-zeta_level^j."""
    positive = [root_power(level, j) for j in range(level)]
    return positive + [-u for u in positive]


__all__ = [
    "MAX_LEVEL",
    "CycInt",
    "abs_square",
    "as_rational_integer",
    "cyc_arith",
    "cyclotomic_polynomial",
    "root_power",
    "roots_of_unity",
]
