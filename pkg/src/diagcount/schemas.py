"""Pydantic models for results, reports and job specifications."""

from __future__ import annotations

import math
from enum import Enum
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, computed_field, model_validator

from . import SCHEMA_VERSION

# Counts and bounds outgrow every JSON number type; they travel as decimal strings.
BigInt = Annotated[int, PlainSerializer(lambda v: str(v), return_type=str, when_used="json")]


class CountMethod(str, Enum):
    mixed_theorem = "MixedTheorem"
    common_corollary = "CommonCorollary"
    nonzero_theorem = "NonzeroTheorem"
    s2_proposition = "S2Proposition"
    jacobi_expansion = "JacobiExpansion"
    additive_expansion = "AdditiveExpansion"
    oracle = "Oracle"


class Verdict(str, Enum):
    maximal = "Maximal"
    minimal = "Minimal"
    neither = "Neither"
    outside_theorem_scope = "OutsideTheoremScope"


class OutputFormat(str, Enum):
    json = "json"
    table = "table"
    csv = "csv"


class Versioned(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: str = Field(default=SCHEMA_VERSION, alias="schema")


class ExponentWitness(BaseModel):
    """Per-exponent witnesses r_i | t with d_i | p^r_i + 1, their signs and lambda flags."""

    t: int
    r: list[int | None]
    eps: list[int | None]
    lambda_flag: list[bool]
    common_r: int | None = None

    @property
    def complete(self) -> bool:
        return all(r is not None for r in self.r)


class ExactBound(BaseModel):
    """The real number rational + sqrt_coefficient * sqrt(radicand), kept exact."""

    model_config = ConfigDict(frozen=True)

    rational: BigInt = Field(default=0, ge=0)
    sqrt_coefficient: BigInt = Field(default=0, ge=0)
    radicand: int = Field(default=1, ge=1)

    def as_integer(self) -> int | None:
        if self.sqrt_coefficient == 0:
            return self.rational
        root = math.isqrt(self.radicand)
        if root * root != self.radicand:
            return None
        return self.rational + self.sqrt_coefficient * root

    def admits(self, deviation: int) -> bool:
        """deviation <= bound."""
        excess = deviation - self.rational
        if excess <= 0:
            return True
        return excess * excess <= self.sqrt_coefficient**2 * self.radicand

    def attained(self, deviation: int) -> bool:
        """deviation == bound."""
        excess = deviation - self.rational
        if excess < 0:
            return False
        return excess * excess == self.sqrt_coefficient**2 * self.radicand

    def is_zero(self) -> bool:
        return self.rational == 0 and self.sqrt_coefficient == 0

    @computed_field  # type: ignore[prop-decorator]
    @property
    def display(self) -> str:
        return str(self)

    def __str__(self) -> str:
        value = self.as_integer()
        if value is not None:
            return str(value)
        surd = f"{self.sqrt_coefficient}*sqrt({self.radicand})"
        return surd if self.rational == 0 else f"{self.rational} + {surd}"


class CountResult(Versioned):
    value: BigInt = Field(ge=0)
    method: CountMethod
    witness: ExponentWitness | None = None


class ExtremalReport(Versioned):
    kind: Literal["affine", "curve", "projective"]
    verdict: Verdict
    direct_verdict: Verdict
    in_scope: bool
    checklist: dict[str, bool] = Field(default_factory=dict)
    witness_r: int | None = None
    bound: ExactBound
    count: BigInt
    center: BigInt
    deviation: BigInt


class CurvePointCounts(BaseModel):
    """Enumerated points of a x^n + b y^m = c, affine and on the line at infinity."""

    affine: BigInt
    infinity: int
    closure_infinity: int


class CurveReport(Versioned):
    field_size: int
    affine_count: BigInt
    infinity_count: int
    closure_infinity_count: int
    projective_count: BigInt
    genus: int
    hasse_weil_bound: BigInt | None = None
    verdict: Verdict

    @model_validator(mode="after")
    def _projective_is_affine_plus_infinity(self) -> CurveReport:
        if self.projective_count != self.affine_count + self.infinity_count:
            raise ValueError(
                f"projective count {self.projective_count} != {self.affine_count} + {self.infinity_count}"
            )
        return self


class JacobiReport(Versioned):
    value: str
    level: int
    coeffs: list[BigInt]
    rational: BigInt | None = None
    abs_square: BigInt
    expected_abs_square: BigInt
    approx: tuple[float, float]
    closed_form: BigInt | None = None


class IValueReport(Versioned):
    d: list[int]
    enumerate: int | None = None
    lcm: int
    incl_excl: int
    is_zero_predicate: bool | None = None


class ProjectiveReport(Versioned):
    field_size: int
    s: int
    d: int
    count: BigInt
    oracle: BigInt | None = None
    center: BigInt
    weil_deligne: ExactBound | None = None


class BoundsReport(Versioned):
    field_size: int
    d: list[int]
    i_value: int
    weil_b_zero: ExactBound
    weil_b_nonzero: ExactBound
    weil_deligne: ExactBound | None = None


class GridSpec(BaseModel):
    """Ranges swept by the verification harness."""

    primes: list[int] = Field(default_factory=lambda: [3, 5])
    max_degree: int = Field(default=4, ge=2)
    max_field: int = Field(default=2**14, ge=9)
    max_arity: int = Field(default=3, ge=1)
    max_exponent: int = Field(default=16, ge=2)
    samples: int = Field(default=20, ge=1)
    seed: str = "diagcount"
    jobs: int = Field(default=1, ge=1)


class GridRow(BaseModel):
    p: int
    t: int
    s: int
    d: list[int]
    a_classes: list[int]
    b_class: str
    count: BigInt
    method: CountMethod
    oracle: BigInt
    bound: str
    attained: bool
    verdict: Verdict | None = None
    problems: list[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


class GridReport(Versioned):
    points: int
    mismatches: int
    estimated_work: int
    rows: list[GridRow] = Field(default_factory=list)


class ErrorReport(Versioned):
    error: str
    message: str


__all__ = [
    "BigInt",
    "BoundsReport",
    "CountMethod",
    "CountResult",
    "CurvePointCounts",
    "CurveReport",
    "ErrorReport",
    "ExactBound",
    "ExponentWitness",
    "ExtremalReport",
    "GridReport",
    "GridRow",
    "GridSpec",
    "IValueReport",
    "JacobiReport",
    "OutputFormat",
    "ProjectiveReport",
    "Verdict",
    "Versioned",
]
