"""Numerical audit of the model's internal consistency.

Each check yields ``PASS`` when an identity holds to rounding and
``FINDING`` when two relations of the model disagree with each other or a
stated property fails.  Findings are data, not failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .codebook import EncodingModel, FigureModel, figure_model
from .errors import ReldecodeError
from .infogeo import (
    fisher_finite_difference,
    fisher_paper,
    kld_closed_form,
    kld_exact,
    kld_reverse,
    kld_simplified,
)
from .relativity import lorentz_gamma
from .thermo import critical_velocity_approx, free_energy_sender, free_energy_zero_crossing

FISHER_SPEEDS = (0.0, 0.3, 0.6, 0.9)
DEFAULT_NS = (5, 10, 20, 40)


@dataclass(frozen=True)
class Check:
    id: str
    status: str
    value: str

    def line(self) -> str:
        return f"CHECK {self.id} {self.status} {self.value}"


def _g(x: float) -> str:
    return f"{x:.6g}"


def check_entropy_relation(model) -> Check:
    """beta against S / <tau>; they coincide only when ln Z = 0."""
    residual = model.beta - model.entropy / model.mean_tau
    ok = abs(residual) <= 1e-12 * max(1.0, abs(model.beta))
    return Check("A1", "PASS" if ok else "FINDING", f"residual={_g(residual)}")


def check_dilation_convention(c: float = 1.0) -> Check:
    # tau/gamma and gamma*tau differ by gamma^2; shown at v = 0.6c
    g = lorentz_gamma(0.6 * c, c)
    return Check("R1", "FINDING",
                 f"used=gamma(v)/gamma(v0);tau/gamma_vs_gamma*tau_ratio@0.6c={_g(g * g)}")


def check_closed_form(model: EncodingModel, points: int = 100) -> Check:
    c = model.light_speed
    worst = 0.0
    for v in np.linspace(0.0, 0.99 * c, points):
        worst = max(worst, abs(kld_closed_form(model, v).value - kld_exact(model, v)))
    return Check("K1", "PASS" if worst < 1e-12 else "FINDING", f"max_residual={_g(worst)}")


def check_asymmetry(model: EncodingModel) -> Check:
    c = model.light_speed
    v = c * math.sqrt(3.0) / 2.0  # gamma = 2
    diff = kld_reverse(model, v) - kld_exact(model, v)
    status = "FINDING" if abs(diff) > 1e-12 else "PASS"
    return Check("K2", status, f"D(a||b)-D(b||a)={_g(diff)}")


def fisher_ratios(beta_tau: float, c: float = 1.0, speeds: Sequence[float] = FISHER_SPEEDS,
                  h: float = 1e-4) -> list:
    """``fisher_paper / d2/dv2[(1 - 1/gamma) beta<tau>]`` at ``speeds * c``."""
    out = []
    for s in speeds:
        v = s * c
        fd = fisher_finite_difference(lambda u: kld_simplified(beta_tau, u, c), v, h * c, c)
        out.append(fisher_paper(beta_tau, v, c) / fd)
    return out


def check_fisher(beta_tau: float, c: float = 1.0) -> Check:
    ratios = fisher_ratios(beta_tau, c)
    status = "PASS" if abs(ratios[0] - 1.0) <= 1e-3 else "FINDING"
    value = ",".join(f"{s:g}c:{r:.6f}" for s, r in zip(FISHER_SPEEDS, ratios))
    return Check("F1", status, value)


def check_sender_free_energy(fig: FigureModel) -> Check:
    f_a = free_energy_sender(fig)
    return Check("T1", "FINDING" if f_a < 0 else "PASS", f"F_A={_g(f_a)}")


def vcrit_direction(ns: Sequence[int], beta_tau: float, c: float = 1.0) -> str:
    v = [critical_velocity_approx(n, beta_tau, c) for n in sorted(ns)]
    d = np.diff(v)
    if np.all(d > 0):
        return "increasing"
    if np.all(d < 0):
        return "decreasing"
    return "non-monotone"


def check_vcrit_direction(ns: Sequence[int], beta_tau: float, c: float = 1.0) -> Check:
    # PASS only if v_crit falls with n
    direction = vcrit_direction(ns, beta_tau, c)
    return Check("T2", "PASS" if direction == "decreasing" else "FINDING", direction)


def check_zero_crossing(fig: FigureModel) -> Check:
    try:
        v = free_energy_zero_crossing(fig)
    except ReldecodeError as exc:
        return Check("T3", "FINDING", type(exc).__name__)
    return Check("T3", "PASS", f"v={_g(v)}")


def reference_model(c: float = 1.0) -> EncodingModel:
    return EncodingModel((1.0, 2.0), 1.0, 1.0, c)


def run_audit(model: Optional[EncodingModel] = None, n: int = 5, beta_tau: float = 1.0,
              c: float = 1.0, power: float = 1.0, ns: Sequence[int] = DEFAULT_NS) -> list:
    """All eight checks in order A1, R1, K1, K2, F1, T1, T2, T3.

    Without an explicit ``model`` the codebook checks (K1, K2) use the
    two-symbol reference codebook ``{1, 2}`` at ``beta = 1``.
    """
    fig = figure_model(n, beta_tau, power=power, light_speed=c)
    explicit = model if model is not None else reference_model(c)
    scalar_model = model if model is not None else fig
    bt = model.beta_tau if model is not None and model.beta_tau > 0 else beta_tau
    return [
        check_entropy_relation(scalar_model),
        check_dilation_convention(c),
        check_closed_form(explicit),
        check_asymmetry(explicit),
        check_fisher(bt, c),
        check_sender_free_energy(fig),
        check_vcrit_direction(ns, beta_tau, c),
        check_zero_crossing(fig),
    ]
