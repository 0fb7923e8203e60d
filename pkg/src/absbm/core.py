"""Shared parameter types, evaluation results, errors, and precision plumbing.

Numerical code in this package runs on one of two mpmath contexts: the
double-precision ``fp`` context (plain Python floats/complex) or the
arbitrary-precision ``mp`` context.  ``working_ctx`` picks the context from a
requested decimal-digit count; anything at or below 17 digits means native
floating point.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field

from mpmath import fp, mp

NATIVE_DIGITS = 17


class NumericError(Exception):
    """Base class for numerical failures (maps to CLI exit code 3)."""


class SectorDomainError(NumericError):
    """Asymptotic expansion requested outside its validity sector."""


class PoleError(NumericError):
    """Evaluation requested at a pole (e.g. gamma at a nonpositive integer)."""


class RangeError(NumericError):
    """Result overflows the representable range."""


class PrecisionError(NumericError):
    """Cancellation destroyed the requested number of digits."""

    def __init__(self, message, best_value=None, digits_validated=None):
        super().__init__(message)
        self.best_value = best_value
        self.digits_validated = digits_validated


class ConvergenceError(NumericError):
    """An iteration (series, Newton, bracketing, quadrature) failed to converge."""


class RegimeError(NumericError):
    """The requested evaluation lies outside the method's usable regime."""


class TruncationError(NumericError):
    """Series budget exhausted before the stop rule fired."""

    def __init__(self, message, last_term=None, partial=None):
        super().__init__(message)
        self.last_term = last_term
        self.partial = partial


@dataclass(frozen=True)
class DriftParams:
    """Parameter triple (mu, sigma, t) of the drifted Brownian motion.

    The distribution of the absolute-value integral is even in ``mu``; every
    evaluator consumes the drift only through ``b**2`` or ``theta``, which
    makes that invariance exact at the bit level.
    """

    mu: float
    sigma: float = 1.0
    t: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValueError("t must be positive and finite")
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")

    @property
    def b(self) -> float:
        return self.mu / self.sigma

    @property
    def theta(self) -> float:
        # mu^2 t / (2 sigma^2), dimensionless drift strength
        b = self.mu / self.sigma
        return b * b * self.t / 2.0


@dataclass(frozen=True)
class SeriesBudget:
    """Truncation controls shared by every series evaluation."""

    max_terms: int = 400
    abs_tol: float = 1e-17
    rel_tol: float = 1e-15
    precision_digits: int = NATIVE_DIGITS

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.precision_digits < 1:
            raise ValueError("precision_digits must be positive")

    @classmethod
    def for_digits(cls, digits: int, max_terms: int = 400) -> "SeriesBudget":
        digits = int(digits)
        tol = 10.0 ** (-(digits + 2)) if digits < 300 else mp.mpf(10) ** (-(digits + 2))
        return cls(max_terms=max_terms, abs_tol=tol, rel_tol=tol,
                   precision_digits=digits)


DEFAULT_BUDGET = SeriesBudget()


@dataclass
class EvalResult:
    """Value with an a-posteriori error bound, returned by distribution evaluators."""

    value: float
    error_bound: float
    terms_used: int
    method: str
    truncated: bool = False

    def __float__(self):
        return float(self.value)


@dataclass
class MomentValue:
    """Moment of a given order with a validated-digit guarantee."""

    n: int
    value: object  # float for native precision, mpf beyond
    digits_requested: int
    digits_validated: int
    route: str

    def __float__(self):
        return float(self.value)


@contextmanager
def working_ctx(digits: int, pad: int = 0):
    """Yield the mpmath context for ``digits`` decimal digits plus ``pad`` guard digits.

    digits <= 17 with no padding means the fast float context; everything else
    runs on ``mp`` at the combined precision.
    """
    if digits <= NATIVE_DIGITS and pad == 0:
        yield fp
    else:
        with mp.workdps(max(digits, NATIVE_DIGITS + 1) + pad):
            yield mp


def to_native(value, digits: int):
    """Downcast an mp result to float/complex when native precision was requested."""
    if digits <= NATIVE_DIGITS:
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, complex):
            return value
        if hasattr(value, "imag") and value.imag != 0:
            return complex(value)
        return float(value.real if hasattr(value, "real") else value)
    return value
