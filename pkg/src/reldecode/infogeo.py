"""Divergences between sender and receiver distributions, and velocity
sensitivity (Fisher information) derived from them.

Direction convention: the canonical divergence puts the *receiver*
distribution outside the log, ``D(p_b || p_a)``.  :func:`kld_reverse`
gives ``D(p_a || p_b)``, which is the direction the cross-entropy
decomposition actually needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .codebook import EncodingModel
from .errors import InvalidParameter, OutOfDomain, SupportMismatch
from .relativity import (
    _one_minus_beta2,
    dilation_ratio,
    gamma_second_derivative,
    receiver_distribution,
)


def _pair(p, q):
    p = np.asarray(p)
    q = np.asarray(q)
    dtype = np.result_type(p, q, float)
    p = p.astype(dtype).ravel()
    q = q.astype(dtype).ravel()
    if p.shape != q.shape:
        raise InvalidParameter(f"length mismatch: {p.size} vs {q.size}")
    if np.any(p < 0) or np.any(q < 0) or not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise InvalidParameter("probabilities must be finite and nonnegative")
    if np.any((p > 0) & (q == 0)):
        raise SupportMismatch("q vanishes where p is positive")
    return p, q


def kld(p, q) -> float:
    """Kullback-Leibler divergence ``sum_j p_j ln(p_j / q_j)`` in nats.

    Evaluated as ``sum_j q_j * phi(p_j / q_j)`` with
    ``phi(r) = r ln r - r + 1 >= 0``; the extra ``-p + q`` terms cancel
    because both vectors are normalised, and every summand is nonnegative,
    which keeps the relative error small when ``p`` is close to ``q``.

    Raises
    ------
    SupportMismatch
        If some ``q_j`` is zero while ``p_j`` is positive.
    """
    p, q = _pair(p, q)
    on = q > 0
    p, q = p[on], q[on]
    r = p / q
    d = r - 1.0
    phi = np.ones_like(d)
    near = (p > 0) & (np.abs(d) < 0.5)
    far = (p > 0) & ~near
    phi[near] = (1.0 + d[near]) * np.log1p(d[near]) - d[near]
    phi[far] = r[far] * np.log(r[far]) - d[far]
    return float(max(np.dot(q, phi), 0.0))


def cross_entropy(p, q) -> float:
    """``-sum_j p_j ln q_j``; equals ``S(p) + D(p || q)``."""
    p, q = _pair(p, q)
    on = p > 0
    return float(-np.dot(p[on], np.log(q[on])))


@dataclass(frozen=True)
class KldBreakdown:
    value: float
    mean_tau_receiver: float
    log_partition_ratio: float


def _logsumexp(a: np.ndarray) -> np.ndarray:
    top = a.max()
    return top + np.log(np.exp(a - top).sum())


def _weighted_exp_excess(log_w: np.ndarray, x: np.ndarray):
    """``sum_j w_j (exp(x_j) - 1 - x_j)`` without cancellation for small ``|x|``."""
    w = np.exp(log_w)
    small = np.abs(x) < 0.5
    terms = np.empty_like(x)
    xs = x[small]
    acc = np.ones_like(xs)
    for k in range(24, 2, -1):
        acc = 1.0 + acc * xs / k
    terms[small] = w[small] * 0.5 * xs * xs * acc
    big = ~small
    terms[big] = np.exp(log_w[big] + x[big]) - w[big] * (1.0 + x[big])
    return terms.sum()


def kld_closed_form(model: EncodingModel, v: float, v0: float = 0.0) -> KldBreakdown:
    """Receiver-to-sender divergence from partition functions.

    ``D = beta (1 - lam) <tau>_b + ln(Z_a / Z_b)`` where ``lam`` is the
    dilation ratio and ``<tau>_b`` averages the *sender* durations under the
    receiver's weights.

    Both terms grow like ``beta |lam - 1| <tau>`` while their sum is second
    order in ``lam - 1``, so the value is evaluated in the equivalent form
    ``ln E_b[exp(k (tau - <tau>_b))]`` with ``k = beta (lam - 1)``, using
    ``exp(x) - 1 - x`` for the centred terms.  Sums run in extended
    precision (``np.longdouble``) because for ``lam`` near 1 the result is
    ill-conditioned in the durations.
    """
    lam = dilation_ratio(v, v0, model.light_speed)
    beta = np.longdouble(model.beta)
    lam_ld = np.longdouble(lam)
    tau = model.codebook.array.astype(np.longdouble)
    log_za = _logsumexp(-beta * tau)
    log_zb = _logsumexp(-beta * lam_ld * tau)
    log_pb = -beta * lam_ld * tau - log_zb
    p_b = np.exp(log_pb)
    mean_b = np.dot(p_b, tau)

    x = beta * (lam_ld - 1) * (tau - mean_b)
    drift = np.dot(p_b, x)
    excess = _weighted_exp_excess(log_pb, x)
    if np.isfinite(excess):
        value = np.log1p(excess + drift) - drift
    else:
        value = _logsumexp(log_pb + x) - drift
    return KldBreakdown(max(float(value), 0.0), float(mean_b), float(log_za - log_zb))


def kld_exact(model: EncodingModel, v: float, v0: float = 0.0) -> float:
    """Direct-sum ``D(p_b || p_a)``."""
    lam = dilation_ratio(v, v0, model.light_speed)
    return kld(receiver_distribution(model.codebook, model.beta, lam), model.probabilities)


def kld_reverse(model: EncodingModel, v: float, v0: float = 0.0) -> float:
    """Direct-sum ``D(p_a || p_b)``."""
    lam = dilation_ratio(v, v0, model.light_speed)
    return kld(model.probabilities, receiver_distribution(model.codebook, model.beta, lam))


def one_minus_inverse_gamma(v: float, c: float = 1.0) -> float:
    x = _one_minus_beta2(v, c)
    return (v / c) ** 2 / (1.0 + math.sqrt(x))


def kld_simplified(entropy_sender: float, v: float, c: float = 1.0) -> float:
    """Saturating curve ``(1 - 1/gamma(v)) * S_a``; bounded by ``S_a``."""
    if not entropy_sender >= 0:
        raise InvalidParameter("sender entropy must be nonnegative")
    return one_minus_inverse_gamma(v, c) * entropy_sender


def fisher_paper(beta_tau: float, v: float, c: float = 1.0) -> float:
    """Velocity sensitivity ``beta<tau> * gamma''(v)``.

    Equals ``beta<tau> / c^2`` at rest and diverges as ``v -> c``.  Note
    this is *not* the second derivative of :func:`kld_simplified`, which is
    ``S_a * gamma^3 / c^2``; the two agree only at ``v = 0`` when
    ``S_a = beta<tau>``.
    """
    if not beta_tau > 0:
        raise InvalidParameter("beta_tau must be positive")
    return beta_tau * gamma_second_derivative(v, c)


def fisher_finite_difference(curve: Callable[[float], float], v: float, h: float = 1e-4,
                             c: float = 1.0) -> float:
    """Central second difference of ``curve`` at ``v``.

    If the stencil would reach below zero the centre moves forward to ``h``.
    """
    if not h > 0:
        raise InvalidParameter("step must be positive")
    if v < 0:
        raise OutOfDomain(f"speed {v!r} < 0")
    centre = max(v, h)
    if centre + h >= c:
        raise OutOfDomain(f"stencil [{centre - h}, {centre + h}] leaves [0, {c})")
    return (curve(centre + h) - 2.0 * curve(centre) + curve(centre - h)) / (h * h)


def cramer_rao_bound(fisher: float) -> float:
    if not fisher > 0:
        raise InvalidParameter(f"Fisher information must be positive, got {fisher!r}")
    return 1.0 / fisher
