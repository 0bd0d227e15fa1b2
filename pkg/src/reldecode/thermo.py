"""Information free energies and the critical decoding velocity.

``F_A = P<tau> - T S_a`` is the sender-frame free energy with
``T = P / beta``; the receiver replaces ``S_a`` by ``S_a + D`` so that
``F_A - F_B = T D``.  Decoding is feasible while ``F_B > 0``.

Two critical-velocity formulas are provided.  ``critical_velocity_consistent``
follows from ``D(v_crit) = -ln Z_a`` with the saturating divergence curve,
giving ``gamma_crit = S_a / (S_a + ln Z_a)``.  ``critical_velocity_paper``
and ``critical_velocity_approx`` use ``gamma_crit = (b + ln Z_a) / b`` with
``b = beta<tau>``, which the sweep figures use.  The
two are different functions of the model and generally disagree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from scipy.optimize import brentq

from .codebook import EncodingModel, FigureModel
from .errors import (
    InvalidParameter,
    NoCriticalVelocity,
    NoCrossing,
    OutOfDomain,
    UnreachableThreshold,
)
from .infogeo import kld_closed_form, kld_exact, one_minus_inverse_gamma
from .relativity import _one_minus_beta2, dilation_ratio, speed_from_gamma

Model = Union[EncodingModel, FigureModel]


class KldMode(str, enum.Enum):
    EXACT = "exact"
    CLOSED_FORM = "closed-form"
    SIMPLIFIED = "simplified"


class Regime(str, enum.Enum):
    FEASIBLE = "Feasible"
    CRITICAL = "Critical"
    INFEASIBLE = "Infeasible"


def free_energy_sender(model: Model) -> float:
    """``F_A = P<tau> - (P/beta) S_a``; equals ``-(P/beta) ln Z_a``."""
    t_info = model.t_info
    return model.power * model.mean_tau - t_info * model.entropy


def mode_divergence(model: Model, v: float, v0: float = 0.0,
                    kld_mode: KldMode | str = KldMode.SIMPLIFIED) -> float:
    """Divergence used by the receiver free energy for the chosen mode.

    The simplified curve is ``(1 - 1/lam) S_a`` with ``lam`` the dilation
    ratio, which reduces to ``(1 - 1/gamma(v)) S_a`` for ``v0 = 0`` and
    vanishes at ``v = v0``; it is only defined for ``v >= v0``.
    """
    mode = KldMode(kld_mode)
    c = model.light_speed
    if mode is KldMode.SIMPLIFIED:
        if v < v0:
            raise OutOfDomain(f"simplified divergence needs v >= v0, got v={v!r} < v0={v0!r}")
        if v0 == 0:
            return one_minus_inverse_gamma(v, c) * model.entropy
        return (1.0 - 1.0 / dilation_ratio(v, v0, c)) * model.entropy
    if isinstance(model, FigureModel):
        raise InvalidParameter(f"{mode.value} divergence needs an explicit codebook")
    if mode is KldMode.EXACT:
        return kld_exact(model, v, v0)
    return kld_closed_form(model, v, v0).value


def free_energy_receiver(model: Model, v: float, v0: float = 0.0,
                         kld_mode: KldMode | str = KldMode.SIMPLIFIED) -> float:
    t_info = model.t_info
    d = mode_divergence(model, v, v0, kld_mode)
    return model.power * model.mean_tau - t_info * (model.entropy + d)


def free_energy_gap(t_info: float, d_kl: float) -> float:
    if d_kl < 0:
        raise InvalidParameter(f"divergence must be nonnegative, got {d_kl!r}")
    return t_info * d_kl


def regime_tolerance(model: Model) -> float:
    return 1e-9 * model.power * model.mean_tau


def classify_regime(f_receiver: float, tolerance: float) -> Regime:
    if not tolerance > 0:
        raise InvalidParameter("tolerance must be positive")
    if abs(f_receiver) <= tolerance:
        return Regime.CRITICAL
    return Regime.FEASIBLE if f_receiver > 0 else Regime.INFEASIBLE


@dataclass(frozen=True)
class FreeEnergyPoint:
    v: float
    f_sender: float
    f_receiver: float
    gap: float
    regime: Regime


def free_energy_point(model: Model, v: float, v0: float = 0.0,
                      kld_mode: KldMode | str = KldMode.SIMPLIFIED) -> FreeEnergyPoint:
    f_a = free_energy_sender(model)
    f_b = free_energy_receiver(model, v, v0, kld_mode)
    return FreeEnergyPoint(v, f_a, f_b, f_a - f_b, classify_regime(f_b, regime_tolerance(model)))


def critical_gamma_consistent(model: Model) -> float:
    s = model.entropy
    log_z = model.log_partition
    if log_z >= 0:
        raise NoCriticalVelocity(f"ln Z = {log_z:.6g} >= 0: F_B never crosses zero from above")
    if log_z <= -s:
        raise UnreachableThreshold(
            f"required divergence -ln Z = {-log_z:.6g} exceeds its supremum S = {s:.6g}")
    return s / (s + log_z)


def critical_velocity_consistent(model: Model) -> float:
    """Speed at which the simplified-mode ``F_B`` reaches zero (``v0 = 0``).

    Raises
    ------
    NoCriticalVelocity
        If ``ln Z_a >= 0``.
    UnreachableThreshold
        If ``ln Z_a <= -S_a``.
    """
    return speed_from_gamma(critical_gamma_consistent(model), model.light_speed)


def critical_velocity_paper(beta_tau: float, log_z: float, c: float = 1.0) -> float:
    """``c sqrt(1 - (b / (b + ln Z))^2)`` with ``b = beta<tau>``.

    Real only for ``ln Z >= 0``; negative ``ln Z`` pushes the radicand below
    zero and raises :class:`OutOfDomain`.
    """
    if not beta_tau > 0:
        raise InvalidParameter("beta_tau must be positive")
    denom = beta_tau + log_z
    if not denom > 0:
        raise OutOfDomain(f"beta_tau + ln Z = {denom!r} must be positive")
    radicand = 1.0 - (beta_tau / denom) ** 2
    if not (0 <= radicand < 1):
        raise OutOfDomain(f"radicand {radicand!r} outside [0, 1)")
    return c * math.sqrt(radicand)


def critical_velocity_approx(n: int, beta_tau: float, c: float = 1.0) -> float:
    """Uniform-codebook approximation ``ln Z ~ ln n``."""
    if int(n) != n or n < 1:
        raise InvalidParameter(f"n must be a positive integer, got {n!r}")
    return critical_velocity_paper(beta_tau, math.log(n), c)


def free_energy_zero_crossing(model: Model, v0: float = 0.0,
                              kld_mode: KldMode | str = KldMode.SIMPLIFIED) -> float:
    """Numerical root of ``F_B(v) = 0`` on ``[v0, c (1 - 1e-12))``.

    Returns ``v0`` when ``F_B`` already vanishes there (within the regime
    tolerance).  Raises :class:`NoCrossing` when the endpoints share a sign.
    """
    c = model.light_speed
    _one_minus_beta2(v0, c)
    tol = regime_tolerance(model)
    hi = c * (1.0 - 1e-12)

    def f(v):
        return free_energy_receiver(model, v, v0, kld_mode)

    f_lo = f(v0)
    if abs(f_lo) <= tol:
        return v0
    f_hi = f(hi)
    if f_lo * f_hi > 0:
        raise NoCrossing(f"F_B keeps the sign of {f_lo:.6g} on [{v0}, {hi}]")
    return brentq(f, v0, hi, xtol=1e-15 * c, rtol=8.9e-16, maxiter=500)
