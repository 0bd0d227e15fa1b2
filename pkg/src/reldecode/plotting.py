"""Figures drawn from sweep rows.

Renders to files only (Agg backend); nothing here opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "figure.figsize": (5.0, 3.6),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "savefig.dpi": 150,
}


def _numeric(rows, key):
    xs, ys = [], []
    for r in rows:
        y = getattr(r, key)
        if isinstance(y, (int, float)) and y is not None:
            xs.append(r.v)
            ys.append(y)
    return xs, ys


def _save(fig, path):
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_kld(curves: dict, path, c: float = 1.0):
    """``curves`` maps a legend label to a list of sweep rows."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, rows in curves.items():
            ax.plot(*_numeric(rows, "kld_simplified"), label=label)
        ax.set_xlabel(f"sender speed v (c = {c:g})")
        ax.set_ylabel("KL divergence [nats]")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_fisher(curves: dict, path, c: float = 1.0):
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, rows in curves.items():
            ax.plot(*_numeric(rows, "fisher"), label=label)
        ax.set_yscale("log")
        ax.set_xlabel(f"sender speed v (c = {c:g})")
        ax.set_ylabel("Fisher information I(v)")
        if len(curves) > 1:
            ax.legend(frameon=False)
        return _save(fig, path)


def plot_free_energy(curves: dict, path, markers: dict | None = None, c: float = 1.0):
    """Receiver free energy; ``markers`` maps labels to speeds drawn as dotted lines."""
    markers = markers or {}
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, rows in curves.items():
            (line,) = ax.plot(*_numeric(rows, "f_receiver"), label=label)
            if markers.get(label) is not None:
                ax.axvline(markers[label], ls=":", color=line.get_color())
        ax.axhline(0.0, color="k", lw=0.6)
        ax.set_xlabel(f"sender speed v (c = {c:g})")
        ax.set_ylabel("receiver free energy F_B")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_quantity(quantity: str, curves: dict, path, markers: dict | None = None,
                  c: float = 1.0):
    if quantity == "fisher":
        return plot_fisher(curves, path, c)
    if quantity == "free-energy":
        return plot_free_energy(curves, path, markers, c)
    return plot_kld(curves, path, c)


_GNUPLOT_COLUMNS = {"kld": 3, "fisher": 5, "free-energy": 6}


def write_gnuplot_script(csv_paths, quantity: str, path) -> Path:
    """Plain-text gnuplot script that plots the given sweep CSV files."""
    col = _GNUPLOT_COLUMNS.get(quantity, 3)
    ylabel = {3: "KL divergence [nats]", 5: "Fisher information", 6: "F_B"}[col]
    plots = ", \\\n     ".join(
        f"'{Path(p).name}' using 1:{col} with lines title '{Path(p).stem}'" for p in csv_paths)
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 'v'",
        f"set ylabel '{ylabel}'",
    ]
    if col == 5:
        lines.append("set logscale y")
    lines.append(f"plot {plots}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path
