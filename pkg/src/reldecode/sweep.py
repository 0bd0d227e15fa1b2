"""Velocity sweeps and their CSV rendering."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .codebook import EncodingModel, FigureModel
from .errors import InvalidParameter, NumericOverflow
from .infogeo import fisher_paper, kld_closed_form, kld_simplified
from .relativity import lorentz_gamma
from .thermo import KldMode, classify_regime, free_energy_receiver, regime_tolerance

HEADER = ("v", "gamma", "kld_simplified", "kld_closed_form", "fisher", "f_receiver", "regime")
QUANTITIES = ("kld", "fisher", "free-energy", "all")
OVERFLOW = "overflow"

Cell = Union[float, str, None]


@dataclass(frozen=True)
class SweepRow:
    v: float
    gamma: Cell
    kld_simplified: Cell = None
    kld_closed_form: Cell = None
    fisher: Cell = None
    f_receiver: Cell = None
    regime: Optional[str] = None


def velocity_grid(v_min: float, v_max: float, steps: int, c: float = 1.0) -> np.ndarray:
    """Inclusive uniform grid; requires ``0 <= v_min < v_max < c``."""
    if not (0 <= v_min < v_max < c):
        raise InvalidParameter(f"need 0 <= v_min < v_max < c, got {v_min}, {v_max}, {c}")
    if steps < 2:
        raise InvalidParameter("steps must be at least 2")
    return np.linspace(v_min, v_max, int(steps))


def _guard(fn, *args):
    try:
        return fn(*args)
    except NumericOverflow:
        return OVERFLOW


def sweep_rows(model: Union[EncodingModel, FigureModel], grid: Iterable[float],
               quantity: str = "all", v0: float = 0.0,
               kld_mode: Union[KldMode, str, None] = None) -> list:
    """Evaluate the requested columns at every grid speed.

    Columns outside ``quantity`` are left empty, as is ``kld_closed_form``
    for a :class:`FigureModel`.  ``kld_mode`` defaults to the simplified
    curve in figure mode and the closed form otherwise.
    """
    if quantity not in QUANTITIES:
        raise InvalidParameter(f"quantity must be one of {QUANTITIES}")
    figure = isinstance(model, FigureModel)
    if kld_mode is None:
        kld_mode = KldMode.SIMPLIFIED if figure else KldMode.CLOSED_FORM
    c = model.light_speed
    want_kld = quantity in ("kld", "all")
    want_fisher = quantity in ("fisher", "all")
    want_f = quantity in ("free-energy", "all")
    entropy = model.entropy
    beta_tau = model.beta_tau
    tol = regime_tolerance(model) if want_f else None

    rows = []
    for v in grid:
        v = float(v)
        row = dict(v=v, gamma=_guard(lorentz_gamma, v, c))
        if want_kld:
            row["kld_simplified"] = _guard(kld_simplified, entropy, v, c)
            if not figure:
                row["kld_closed_form"] = _guard(lambda *a: kld_closed_form(*a).value, model, v, v0)
        if want_fisher:
            row["fisher"] = _guard(fisher_paper, beta_tau, v, c)
        if want_f:
            f_b = _guard(free_energy_receiver, model, v, v0, kld_mode)
            row["f_receiver"] = f_b
            if f_b != OVERFLOW:
                row["regime"] = classify_regime(f_b, tol).value
        rows.append(SweepRow(**row))
    return rows


def format_number(x: Cell) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return f"{float(x):.15g}"


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in rows:
        writer.writerow([format_number(getattr(r, name)) for name in HEADER])
    return buf.getvalue()


def write_csv(rows: Iterable[SweepRow], path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(path) -> list:
    """Parse a sweep CSV back into dicts of floats (strings kept as-is)."""
    out = []
    with open(path, newline="", encoding="ascii") as fh:
        for rec in csv.DictReader(fh):
            parsed = {}
            for k, val in rec.items():
                try:
                    parsed[k] = float(val) if val not in ("", OVERFLOW) else val
                except ValueError:
                    parsed[k] = val
            out.append(parsed)
    return out
