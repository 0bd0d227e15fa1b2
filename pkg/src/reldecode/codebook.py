"""Maximum-entropy duration codebooks.

Each symbol of the alphabet is identified by its transmission duration.
Under a fixed mean-duration constraint the entropy-maximising symbol
probabilities are ``p_j = exp(-beta * tau_j) / Z``.  Everything here is per
symbol; sequence length only enters in :mod:`reldecode.simulate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp

from .errors import (
    DegenerateConstraint,
    DivisionByZero,
    InvalidParameter,
    NumericOverflow,
    OutOfRange,
)


@dataclass(frozen=True)
class Codebook:
    """Ordered symbol durations (seconds)."""

    durations: tuple

    def __post_init__(self):
        tau = tuple(float(t) for t in self.durations)
        if len(tau) < 1:
            raise InvalidParameter("a codebook needs at least one duration")
        for t in tau:
            if not (math.isfinite(t) and t > 0):
                raise InvalidParameter(f"durations must be positive and finite, got {t!r}")
        object.__setattr__(self, "durations", tau)

    def __len__(self):
        return len(self.durations)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.durations, dtype=float)

    def scaled(self, factor: float) -> "Codebook":
        return Codebook(tuple(factor * t for t in self.durations))


CodebookLike = Union[Codebook, Sequence[float], np.ndarray]


def as_codebook(durations: CodebookLike) -> Codebook:
    if isinstance(durations, Codebook):
        return durations
    return Codebook(tuple(np.asarray(durations, dtype=float).ravel()))


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta):
        raise InvalidParameter(f"beta must be finite, got {beta!r}")
    return beta


def _check_dist(dist, n: int | None = None) -> np.ndarray:
    p = np.asarray(dist, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InvalidParameter("probabilities must be finite and nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidParameter(f"probabilities sum to {p.sum()!r}, not 1")
    if n is not None and p.size != n:
        raise InvalidParameter(f"distribution has {p.size} entries, codebook has {n}")
    return p


def log_partition_function(codebook: CodebookLike, beta: float) -> float:
    """``ln Z`` by log-sum-exp, safe for any finite ``beta * tau``."""
    beta = _check_beta(beta)
    tau = as_codebook(codebook).array
    return float(logsumexp(-beta * tau))


def partition_function(codebook: CodebookLike, beta: float) -> float:
    """Sum of Boltzmann weights ``Z = sum_j exp(-beta * tau_j)``.

    Raises
    ------
    InvalidParameter
        If ``beta`` is not finite.
    NumericOverflow
        If ``Z`` itself is not representable as a double.
    """
    log_z = log_partition_function(codebook, beta)
    if log_z > 709.78:
        raise NumericOverflow(f"partition function exp({log_z}) overflows")
    return math.exp(log_z)


def max_entropy_distribution(codebook: CodebookLike, beta: float) -> np.ndarray:
    """Exponential (Gibbs) symbol probabilities, in duration order."""
    beta = _check_beta(beta)
    tau = as_codebook(codebook).array
    log_w = -beta * tau
    log_w -= log_w.max()
    w = np.exp(log_w)
    return w / w.sum()


def mean_duration(codebook: CodebookLike, dist) -> float:
    tau = as_codebook(codebook).array
    p = _check_dist(dist, tau.size)
    return float(np.dot(p, tau))


def _mean_at(tau: np.ndarray, beta: float) -> float:
    log_w = -beta * tau
    log_w -= log_w.max()
    w = np.exp(log_w)
    return float(np.dot(w, tau) / w.sum())


def solve_beta(codebook: CodebookLike, target_mean: float) -> float:
    """Find the inverse temperature that reproduces a mean duration.

    The mean is strictly decreasing in ``beta`` (its derivative is minus the
    duration variance), so the root is unique.  The root is bracketed by
    doubling outward from ``[-1, 1]`` and then polished with Brent's method.

    Raises
    ------
    DegenerateConstraint
        If all durations are equal.
    OutOfRange
        If ``target_mean`` is not strictly between the shortest and longest
        duration.
    """
    tau = as_codebook(codebook).array
    target = float(target_mean)
    lo_tau, hi_tau = tau.min(), tau.max()
    if lo_tau == hi_tau:
        raise DegenerateConstraint("all durations are equal; the mean cannot be tuned")
    if not (lo_tau < target < hi_tau):
        raise OutOfRange(f"target mean {target} outside ({lo_tau}, {hi_tau})")

    def excess(beta):
        return _mean_at(tau, beta) - target

    lo, hi = -1.0, 1.0
    for _ in range(1100):
        if excess(hi) <= 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise OutOfRange(f"target mean {target} too close to {lo_tau}")
    for _ in range(1100):
        if excess(lo) >= 0:
            break
        lo, hi = 2.0 * lo, lo
    else:
        raise OutOfRange(f"target mean {target} too close to {hi_tau}")

    if excess(lo) == 0:
        return lo
    if excess(hi) == 0:
        return hi
    beta = brentq(excess, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(beta)


def entropy_per_symbol(dist) -> float:
    """Shannon entropy in nats, with ``0 ln 0 = 0``."""
    p = _check_dist(dist)
    nz = p[p > 0]
    return float(max(-np.dot(nz, np.log(nz)), 0.0))


def info_temperature(power: float, beta: float) -> float:
    """Information temperature ``T = P / beta``."""
    if beta == 0:
        raise DivisionByZero("beta = 0 means infinite information temperature")
    return power / beta


def transmission_energy(power: float, mean_tau: float) -> float:
    if not power > 0 or not mean_tau > 0:
        raise InvalidParameter("power and mean duration must be positive")
    return power * mean_tau


def log_multiplicity(counts) -> float:
    """Log of the multinomial coefficient ``N! / prod_j N_j!``."""
    counts = np.asarray(counts)
    if counts.size == 0 or np.any(counts < 0) or np.any(counts != np.round(counts)):
        raise InvalidParameter("counts must be nonnegative integers")
    if counts.sum() <= 0:
        raise InvalidParameter("at least one count must be positive")
    counts = counts.astype(float)
    value = gammaln(counts.sum() + 1) - gammaln(counts + 1).sum()
    return float(max(value, 0.0))


@dataclass(frozen=True)
class EncodingModel:
    """A codebook together with its inverse temperature, power and light speed.

    Derived quantities (``probabilities``, ``mean_tau``, ``entropy``, ...)
    are recomputed on access; the model itself is immutable.
    """

    codebook: Codebook
    beta: float
    power: float = 1.0
    light_speed: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "codebook", as_codebook(self.codebook))
        object.__setattr__(self, "beta", _check_beta(self.beta))
        if not self.power > 0 or not math.isfinite(self.power):
            raise InvalidParameter("power must be positive")
        if not self.light_speed > 0 or not math.isfinite(self.light_speed):
            raise InvalidParameter("light speed must be positive")

    @classmethod
    def from_mean(cls, codebook: CodebookLike, mean_tau: float, power: float = 1.0,
                  light_speed: float = 1.0) -> "EncodingModel":
        return cls(as_codebook(codebook), solve_beta(codebook, mean_tau), power, light_speed)

    @property
    def n(self) -> int:
        return len(self.codebook)

    @property
    def partition(self) -> float:
        return partition_function(self.codebook, self.beta)

    @property
    def log_partition(self) -> float:
        return log_partition_function(self.codebook, self.beta)

    @property
    def probabilities(self) -> np.ndarray:
        return max_entropy_distribution(self.codebook, self.beta)

    @property
    def mean_tau(self) -> float:
        return mean_duration(self.codebook, self.probabilities)

    @property
    def beta_tau(self) -> float:
        return self.beta * self.mean_tau

    @property
    def entropy(self) -> float:
        return entropy_per_symbol(self.probabilities)

    @property
    def t_info(self) -> float:
        return info_temperature(self.power, self.beta)

    @property
    def energy(self) -> float:
        return transmission_energy(self.power, self.mean_tau)


@dataclass(frozen=True)
class FigureModel:
    """Codebook-free parameterisation ``(n, beta*<tau>)`` with ``Z = n``.

    Used for the velocity-sweep figures: a uniform partition function
    ``Z = n`` combined with a free ``beta * <tau>``.  No explicit codebook
    realises both at once, so the model carries the scalars directly.  ``beta`` and ``power`` default to 1.
    """

    n: int
    beta_tau: float
    beta: float = 1.0
    power: float = 1.0
    light_speed: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameter(f"n must be a positive integer, got {self.n!r}")
        if not self.beta_tau > 0 or not math.isfinite(self.beta_tau):
            raise InvalidParameter("beta_tau must be positive")
        if not self.beta > 0 or not self.power > 0 or not self.light_speed > 0:
            raise InvalidParameter("beta, power and light speed must be positive")
        object.__setattr__(self, "n", int(self.n))

    @property
    def log_partition(self) -> float:
        return math.log(self.n)

    @property
    def entropy(self) -> float:
        return self.beta_tau + math.log(self.n)

    @property
    def mean_tau(self) -> float:
        return self.beta_tau / self.beta

    @property
    def t_info(self) -> float:
        return info_temperature(self.power, self.beta)


def figure_model(n: int, beta_tau: float, *, beta: float = 1.0, power: float = 1.0,
                 light_speed: float = 1.0) -> FigureModel:
    return FigureModel(n, beta_tau, beta, power, light_speed)
