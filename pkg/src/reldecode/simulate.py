"""Seeded Monte Carlo checks of the encoding model.

Sequences are drawn i.i.d. from the sender distribution, durations are
rescaled by the dilation ratio (optionally with multiplicative Gaussian
jitter), and the scale factor is recovered by maximum likelihood.  With
jitter the estimator variance is compared against a Cramer-Rao bound whose
Fisher information is computed independently by Gauss-Hermite quadrature.

Trial ``t`` draws from ``PCG64(seed ^ (t * 0x9E3779B97F4A7C15 mod 2**64))``,
so trials can run in any order or in parallel and give identical results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.optimize import minimize_scalar

from .codebook import CodebookLike, EncodingModel, as_codebook, max_entropy_distribution
from .errors import (
    BracketFailure,
    InconsistentObservations,
    InvalidParameter,
    OutOfDomain,
)
from .infogeo import fisher_paper, kld
from .relativity import dilation_ratio, lorentz_gamma, speed_from_gamma

SEED_MIX = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def trial_seed(seed: int, trial: int) -> int:
    return (int(seed) ^ ((int(trial) * SEED_MIX) & _MASK64)) & _MASK64


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def generator_name() -> str:
    return "numpy.random.PCG64"


def sample_sequence(model: EncodingModel, num_symbols: int, seed) -> np.ndarray:
    """Draw ``num_symbols`` symbol indices from the sender distribution."""
    if num_symbols < 1:
        raise InvalidParameter("num_symbols must be at least 1")
    cdf = np.cumsum(model.probabilities)
    cdf[-1] = 1.0
    u = _rng(seed).random(int(num_symbols))
    return np.searchsorted(cdf, u, side="right").astype(np.intp)


def observe_durations(indices, codebook: CodebookLike, lam: float, jitter_sigma: float,
                      seed) -> np.ndarray:
    """Durations ``lam * tau_j * (1 + sigma * eta)``, redrawing any ``eta`` that
    would make the factor nonpositive."""
    if not lam > 0:
        raise InvalidParameter("scale factor must be positive")
    if jitter_sigma < 0:
        raise InvalidParameter("jitter_sigma must be nonnegative")
    tau = as_codebook(codebook).array
    base = lam * tau[np.asarray(indices, dtype=np.intp)]
    if jitter_sigma == 0:
        return base
    rng = _rng(seed)
    factor = 1.0 + jitter_sigma * rng.standard_normal(base.size)
    bad = factor <= 0
    while np.any(bad):
        factor[bad] = 1.0 + jitter_sigma * rng.standard_normal(int(bad.sum()))
        bad = factor <= 0
    return base * factor


def empirical_distribution(indices, n: int, smoothing: Optional[str] = None) -> np.ndarray:
    """Symbol frequencies; ``smoothing="add-half"`` adds 1/2 to every count."""
    idx = np.asarray(indices, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise InvalidParameter(f"indices must lie in [0, {n})")
    counts = np.bincount(idx, minlength=n).astype(float)
    if smoothing is None:
        if idx.size == 0:
            raise InvalidParameter("no observations")
        return counts / counts.sum()
    if smoothing in ("add-half", "AddHalf"):
        return (counts + 0.5) / (counts.sum() + n / 2.0)
    raise InvalidParameter(f"unknown smoothing {smoothing!r}")


def _lse(a: np.ndarray, axis: int) -> np.ndarray:
    top = a.max(axis=axis, keepdims=True)
    return np.log(np.exp(a - top).sum(axis=axis)) + np.squeeze(top, axis=axis)


def _mixture_loglik(lams: np.ndarray, durations: np.ndarray, tau: np.ndarray,
                    log_p: np.ndarray, sigma: float) -> np.ndarray:
    """Log-likelihood of ``durations`` for every scale in ``lams``."""
    # (d - lam tau) / (sigma lam tau) = (d / lam - tau) / (sigma tau)
    x = durations[None, :] / lams[:, None]                            # (G, N)
    z = x[:, :, None] - tau                                           # (G, N, n)
    z *= 1.0 / (sigma * tau)
    np.square(z, out=z)
    z *= -0.5
    z += log_p - np.log(tau)
    top = z.max(axis=2)
    z -= top[:, :, None]
    np.exp(z, out=z)
    per_obs = np.log(z.sum(axis=2)) + top
    n_obs = durations.size
    return (per_obs.sum(axis=1) - n_obs * (math.log(sigma) + np.log(lams))
            - n_obs * 0.5 * math.log(2 * math.pi))


def ml_scale_estimate(durations, codebook: CodebookLike, beta: float,
                      jitter_sigma: float = 0.0, grid_points: int = 65) -> float:
    """Maximum-likelihood estimate of the duration scale factor.

    Without jitter the observations determine the scale exactly; every
    candidate ``d_0 / tau_j`` is checked against all observations.  With
    jitter, the mixture log-likelihood is scanned on
    ``[0.5 m, 2 m]`` (``m = mean(d) / <tau>``) and the best cell refined by
    golden-section search.

    Raises
    ------
    InconsistentObservations
        Noiseless data that no single scale explains.
    BracketFailure
        The likelihood peaks on the edge of the search interval.
    """
    d = np.asarray(durations, dtype=float).ravel()
    if d.size == 0 or np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise InvalidParameter("durations must be positive and finite")
    if jitter_sigma < 0:
        raise InvalidParameter("jitter_sigma must be nonnegative")
    tau = as_codebook(codebook).array
    p = max_entropy_distribution(tau, beta)

    if jitter_sigma == 0:
        best, best_score = None, -math.inf
        for lam in np.unique(d[0] / tau):
            ratio = d / lam
            rel = np.abs(ratio[:, None] - tau[None, :]) / tau[None, :]
            hit = rel <= 1e-9
            if not np.all(hit.any(axis=1)):
                continue
            with np.errstate(divide="ignore"):
                score = float(np.log(p[np.argmax(hit, axis=1)]).sum())
            if best is None or score > best_score:
                best, best_score = float(lam), score
        if best is None:
            raise InconsistentObservations("no single scale factor explains the durations")
        return best

    with np.errstate(divide="ignore"):
        log_p = np.log(p)
    m = d.mean() / float(np.dot(p, tau))
    grid = np.linspace(0.5 * m, 2.0 * m, grid_points)
    ll = _mixture_loglik(grid, d, tau, log_p, jitter_sigma)
    i = int(np.argmax(ll))
    if i == 0 or i == grid_points - 1:
        raise BracketFailure(f"likelihood maximum at bracket edge {grid[i]!r}")

    def neg(lam):
        return -float(_mixture_loglik(np.array([lam]), d, tau, log_p, jitter_sigma)[0])

    try:
        res = minimize_scalar(neg, bracket=(grid[i - 1], grid[i], grid[i + 1]),
                              method="golden", tol=1e-10)
    except ValueError as exc:
        raise BracketFailure(str(exc)) from exc
    return float(res.x)


def observation_fisher(codebook: CodebookLike, beta: float, lam: float, jitter_sigma: float,
                       nodes: int = 96, rel_step: float = 1e-4) -> float:
    """Per-observation Fisher information about the scale factor.

    Minus the curvature of the expected log-likelihood
    ``L(s) = E_lam[ln f(d; s)]``, with the expectation taken by
    Gauss-Hermite quadrature per mixture component and the curvature by a
    central second difference in ``s``.
    """
    if not jitter_sigma > 0:
        raise InvalidParameter("observation Fisher information needs jitter_sigma > 0")
    tau = as_codebook(codebook).array
    p = max_entropy_distribution(tau, beta)
    x, w = hermegauss(nodes)
    w = w / math.sqrt(2 * math.pi)
    keep = p > 0
    tau_k, p_k = tau[keep], p[keep]
    # abscissae for every component, flattened with their quadrature weights
    d = (lam * tau_k[:, None] * (1.0 + jitter_sigma * x[None, :])).ravel()
    weight = (p_k[:, None] * w[None, :]).ravel()
    pos = d > 0
    d, weight = d[pos], weight[pos]
    log_p = np.log(p_k)

    def expected_ll(s):
        return float(np.dot(weight, _pointwise_loglik(s, d, tau_k, log_p, jitter_sigma)))

    h = rel_step * lam
    curv = (expected_ll(lam + h) - 2.0 * expected_ll(lam) + expected_ll(lam - h)) / (h * h)
    return -curv


def _pointwise_loglik(s, d, tau, log_p, sigma):
    scale = sigma * s * tau
    z = (d[:, None] - s * tau[None, :]) / scale[None, :]
    comp = log_p[None, :] - np.log(scale)[None, :] - 0.5 * z * z
    return _lse(comp, axis=1) - 0.5 * math.log(2 * math.pi)


@dataclass(frozen=True)
class SimulationConfig:
    model: EncodingModel
    v: float
    v0: float = 0.0
    num_symbols: int = 1000
    trials: int = 1
    seed: int = 0
    jitter_sigma: float = 0.0

    def __post_init__(self):
        if self.num_symbols < 1 or self.trials < 1:
            raise InvalidParameter("num_symbols and trials must be at least 1")
        if self.jitter_sigma < 0:
            raise InvalidParameter("jitter_sigma must be nonnegative")
        if not 0 <= self.seed <= _MASK64:
            raise InvalidParameter("seed must be a 64-bit unsigned integer")
        dilation_ratio(self.v, self.v0, self.model.light_speed)

    @property
    def lam(self) -> float:
        return dilation_ratio(self.v, self.v0, self.model.light_speed)


@dataclass(frozen=True)
class SimulationReport:
    empirical_dist: tuple
    empirical_kld_to_sender: float
    seed_used: int
    generator_name: str
    true_scale: float
    scale_estimates: tuple = ()
    estimate_mean: Optional[float] = None
    estimate_variance: Optional[float] = None
    cr_bound: Optional[float] = None
    variance_ratio: Optional[float] = None
    implied_speed: Optional[float] = None
    paper_fisher: Optional[float] = None
    extras: dict = field(default_factory=dict)

    def as_lines(self) -> list:
        """``name=value`` lines at 15 significant digits."""

        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, str):
                return x
            if isinstance(x, (tuple, list, np.ndarray)):
                return ",".join(fmt(float(y)) for y in x)
            return f"{float(x):.15g}"

        rows = [
            ("generator_name", self.generator_name),
            ("seed_used", str(self.seed_used)),
            ("true_scale", self.true_scale),
            ("empirical_dist", self.empirical_dist),
            ("empirical_kld_to_sender", self.empirical_kld_to_sender),
            ("estimate_mean", self.estimate_mean),
            ("estimate_variance", self.estimate_variance),
            ("cr_bound", self.cr_bound),
            ("variance_ratio", self.variance_ratio),
            ("implied_speed", self.implied_speed),
            ("paper_fisher", self.paper_fisher),
            ("scale_estimates", self.scale_estimates),
        ]
        rows += sorted(self.extras.items())
        return [f"{k}={fmt(v)}" for k, v in rows]


def empirical_kld_experiment(config: SimulationConfig) -> SimulationReport:
    """One sequence of ``num_symbols`` draws; plug-in ``D(empirical || p_a)``."""
    model = config.model
    idx = sample_sequence(model, config.num_symbols, config.seed)
    emp = empirical_distribution(idx, model.n)
    return SimulationReport(
        empirical_dist=tuple(emp),
        empirical_kld_to_sender=kld(emp, model.probabilities),
        seed_used=config.seed,
        generator_name=generator_name(),
        true_scale=config.lam,
    )


def _one_trial(config: SimulationConfig, t: int) -> float:
    rng = _rng(trial_seed(config.seed, t))
    model = config.model
    idx = sample_sequence(model, config.num_symbols, rng)
    d = observe_durations(idx, model.codebook, config.lam, config.jitter_sigma, rng)
    return ml_scale_estimate(d, model.codebook, model.beta, config.jitter_sigma)


def scale_estimates(config: SimulationConfig, workers: int = 1) -> np.ndarray:
    """Per-trial estimates in trial order, independent of ``workers``."""
    trials = range(config.trials)
    if workers <= 1:
        return np.array([_one_trial(config, t) for t in trials])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.array(list(pool.map(lambda t: _one_trial(config, t), trials)))


def _implied_speed(lam_hat: float, config: SimulationConfig) -> Optional[float]:
    c = config.model.light_speed
    try:
        return speed_from_gamma(lam_hat * lorentz_gamma(config.v0, c), c)
    except OutOfDomain:
        return None


def run_simulation(config: SimulationConfig, workers: int = 1) -> SimulationReport:
    """Empirical divergence plus ``trials`` scale-factor estimations.

    The bound is ``1 / (N * I_obs)``; without jitter the estimator is exact
    and the bound is reported as 0.
    """
    if config.trials < 2:
        raise InvalidParameter("estimator variance needs at least 2 trials")
    base = empirical_kld_experiment(config)
    est = scale_estimates(config, workers)
    mean = float(est.mean())
    var = float(est.var(ddof=1))
    model = config.model
    if config.jitter_sigma > 0:
        fisher = observation_fisher(model.codebook, model.beta, config.lam, config.jitter_sigma)
        bound = 1.0 / (config.num_symbols * fisher)
        ratio = var / bound
    else:
        bound, ratio = 0.0, None
    c = model.light_speed
    paper = fisher_paper(model.beta_tau, config.v, c) if model.beta_tau > 0 else None
    return SimulationReport(
        empirical_dist=base.empirical_dist,
        empirical_kld_to_sender=base.empirical_kld_to_sender,
        seed_used=config.seed,
        generator_name=generator_name(),
        true_scale=config.lam,
        scale_estimates=tuple(est),
        estimate_mean=mean,
        estimate_variance=var,
        cr_bound=bound,
        variance_ratio=ratio,
        implied_speed=_implied_speed(mean, config),
        paper_fisher=paper,
    )


def cramer_rao_experiment(config: SimulationConfig, workers: int = 1) -> SimulationReport:
    """Compare the estimator variance with the quadrature Cramer-Rao bound.

    ``report.variance_ratio`` is variance / bound; values well below 1
    would indicate a broken estimator or bound.
    """
    if not config.jitter_sigma > 0:
        raise InvalidParameter("the noiseless estimator has zero variance; set jitter_sigma > 0")
    return run_simulation(config, workers)
