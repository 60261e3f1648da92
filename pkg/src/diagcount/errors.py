"""Exception hierarchy.

Every failure raised by the library derives from :class:`DiagcountError`, itself a
``ValueError``, so callers that only care about bad input can catch the builtin.
The command-line front end maps the whole family to exit code 3.
"""

from __future__ import annotations


class DiagcountError(ValueError):
    """Base class for domain errors."""

    code = "DiagcountError"


class NotPrimeError(DiagcountError):
    code = "NotPrime"


class FieldTooLargeError(DiagcountError):
    code = "FieldTooLarge"


class EvenCharacteristicError(DiagcountError):
    code = "EvenCharacteristic"


class DivisionByZeroError(DiagcountError, ZeroDivisionError):
    code = "DivisionByZero"


class MixedFieldsError(DiagcountError):
    code = "MixedFields"


class LogOfZeroError(DiagcountError):
    code = "LogOfZero"


class ZeroInputError(DiagcountError):
    code = "ZeroInput"


class DNotDividingError(DiagcountError):
    code = "DNotDividing"


class LevelTooLargeError(DiagcountError):
    code = "LevelTooLarge"


class TrivialCharacterError(DiagcountError):
    code = "TrivialCharacter"


class ZeroCoefficientError(DiagcountError):
    code = "ZeroCoefficient"


class WitnessInvalidError(DiagcountError):
    code = "WitnessInvalid"


class ModulusMismatchError(DiagcountError):
    code = "ModulusMismatch"


class ExclusionViolatedError(DiagcountError):
    code = "ExclusionViolated"


class WitnessMissingError(DiagcountError):
    """A closed form needs a divisor r of t with d | p^r + 1 that does not exist."""

    code = "WitnessMissing"

    def __init__(self, message: str, index: int | None = None) -> None:
        super().__init__(message)
        self.index = index


class NonzeroBError(DiagcountError):
    code = "NonzeroB"


class ZeroBError(DiagcountError):
    code = "ZeroB"


class ArityError(DiagcountError):
    code = "Arity"


class EnumerationTooLargeError(DiagcountError):
    code = "EnumerationTooLarge"


class ExponentsNotEqualError(DiagcountError):
    code = "ExponentsNotEqual"


class DTooSmallError(DiagcountError):
    code = "DTooSmall"


class DivisibilityFailureError(DiagcountError):
    code = "DivisibilityFailure"


class NonSquareFieldError(DiagcountError):
    code = "NonSquareField"


class TrivialExponentError(DiagcountError):
    """An exponent reduced to 1; the count is known without any closed form."""

    code = "TrivialExponent"

    def __init__(self, message: str, count: int) -> None:
        super().__init__(message)
        self.count = count


class FormulaMismatchError(DiagcountError):
    """Two exact computations of the same quantity disagree."""

    code = "FormulaMismatch"


class GridTooLargeError(DiagcountError):
    code = "GridTooLarge"


__all__ = [
    "ArityError",
    "DNotDividingError",
    "DTooSmallError",
    "DiagcountError",
    "DivisibilityFailureError",
    "DivisionByZeroError",
    "EnumerationTooLargeError",
    "EvenCharacteristicError",
    "ExclusionViolatedError",
    "ExponentsNotEqualError",
    "FieldTooLargeError",
    "FormulaMismatchError",
    "GridTooLargeError",
    "LevelTooLargeError",
    "LogOfZeroError",
    "MixedFieldsError",
    "ModulusMismatchError",
    "NonSquareFieldError",
    "NonzeroBError",
    "NotPrimeError",
    "TrivialCharacterError",
    "TrivialExponentError",
    "WitnessInvalidError",
    "WitnessMissingError",
    "ZeroBError",
    "ZeroCoefficientError",
    "ZeroInputError",
]
