"""Lorentz factor, its derivatives, and the receiver's rescaled codebook."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .codebook import CodebookLike, as_codebook, max_entropy_distribution
from .errors import InvalidParameter, NumericOverflow, OutOfDomain


def _one_minus_beta2(v: float, c: float) -> float:
    """``1 - v^2/c^2`` with validation; factored to keep precision near c."""
    if not c > 0 or not math.isfinite(c):
        raise InvalidParameter(f"light speed must be positive, got {c!r}")
    if not (0 <= v < c):
        raise OutOfDomain(f"speed {v!r} outside [0, {c!r})")
    r = v / c
    x = (1.0 - r) * (1.0 + r)
    if x <= 0:
        raise NumericOverflow(f"Lorentz factor overflows at v={v!r}")
    return x


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise NumericOverflow(f"{what} is not representable")
    return value


def lorentz_gamma(v: float, c: float = 1.0) -> float:
    return _finite(1.0 / math.sqrt(_one_minus_beta2(v, c)), "gamma")


def gamma_first_derivative(v: float, c: float = 1.0) -> float:
    x = _one_minus_beta2(v, c)
    return _finite(v / c**2 * x**-1.5, "gamma'")


def gamma_second_derivative(v: float, c: float = 1.0) -> float:
    """``(c^2 + 2 v^2) / ((c^2 - v^2)^2 sqrt(1 - v^2/c^2))``."""
    x = _one_minus_beta2(v, c)
    c2 = c * c
    den = (c2 * x) ** 2 * math.sqrt(x)
    if den == 0:
        raise NumericOverflow("gamma'' is not representable")
    return _finite((c2 + 2.0 * v * v) / den, "gamma''")


def dilation_ratio(v: float, v0: float, c: float = 1.0) -> float:
    """Net duration scale factor ``gamma(v) / gamma(v0)`` seen by the receiver."""
    if v == v0:
        _one_minus_beta2(v, c)
        return 1.0
    return lorentz_gamma(v, c) / lorentz_gamma(v0, c)


def speed_from_gamma(gamma: float, c: float = 1.0) -> float:
    """Inverse of :func:`lorentz_gamma` on ``gamma >= 1``."""
    if not gamma >= 1:
        raise OutOfDomain(f"gamma {gamma!r} < 1 has no real speed")
    return c * math.sqrt(1.0 - 1.0 / gamma**2)


def receiver_durations(codebook: CodebookLike, lam: float):
    if not lam > 0 or not math.isfinite(lam):
        raise InvalidParameter(f"scale factor must be positive, got {lam!r}")
    return as_codebook(codebook).scaled(lam)


def receiver_distribution(codebook: CodebookLike, beta: float, lam: float) -> np.ndarray:
    """Symbol probabilities the receiver reconstructs from scaled durations."""
    return max_entropy_distribution(receiver_durations(codebook, lam), beta)


@dataclass(frozen=True)
class FrameContext:
    v: float
    v0: float = 0.0
    c: float = 1.0
    lam: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "lam", dilation_ratio(self.v, self.v0, self.c))
