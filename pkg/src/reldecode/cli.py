"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 solver domain error, 4 no
successful rows, 5 simulation error.

Examples
--------
    reldecode solve model.json
    reldecode sweep --quantity kld --n 5 10 20 40 --v-max 0.999 --steps 500 --output kld.csv --plot
    reldecode vcrit --n 5 10 20 40 --beta-tau 1 --variant paper
    reldecode simulate model.json --v 0.6 --num-symbols 1000 --trials 1000 --sigma 0.05 --seed 7 --output sim.txt
    reldecode audit
    reldecode figures --outdir figs
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .audit import run_audit
from .codebook import EncodingModel, figure_model
from .errors import (
    DegenerateConstraint,
    InvalidParameter,
    OutOfDomain,
    OutOfRange,
    ReldecodeError,
)
from .relativity import _one_minus_beta2
from .simulate import SimulationConfig, run_simulation
from .sweep import QUANTITIES, format_number, sweep_rows, velocity_grid, write_csv
from .thermo import (
    KldMode,
    critical_velocity_approx,
    critical_velocity_consistent,
    critical_velocity_paper,
)

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_NO_ROWS, EXIT_SIM = 0, 2, 3, 4, 5


class ConfigError(InvalidParameter):
    pass


class _SolverError(Exception):
    pass


def _number(doc, key, required=True):
    if key not in doc or doc[key] is None:
        if required:
            raise ConfigError(f"config is missing {key!r}")
        return None
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{key!r} must be a finite number")
    return float(val)


def load_config(path) -> tuple:
    """Read a model JSON document; returns ``(model, extras)``.

    ``extras`` carries the optional ``v0`` and ``jitter_sigma`` entries.
    Solver failures while resolving ``mean_tau`` are re-raised unchanged so
    that callers can map them to their own exit code.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    durations = doc.get("durations")
    if not isinstance(durations, list) or not durations:
        raise ConfigError("'durations' must be a non-empty list")
    for t in durations:
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise ConfigError("durations must be numbers")
    has_beta = doc.get("beta") is not None
    has_mean = doc.get("mean_tau") is not None
    if has_beta == has_mean:
        raise ConfigError("exactly one of 'beta' and 'mean_tau' must be given")
    power = _number(doc, "power")
    c = _number(doc, "c")
    extras = {
        "v0": _number(doc, "v0", required=False) or 0.0,
        "jitter_sigma": _number(doc, "jitter_sigma", required=False) or 0.0,
    }
    try:
        if has_beta:
            model = EncodingModel(tuple(durations), _number(doc, "beta"), power, c)
        else:
            model = EncodingModel.from_mean(tuple(durations), _number(doc, "mean_tau"), power, c)
    except (OutOfRange, DegenerateConstraint):
        raise
    except InvalidParameter as exc:
        raise ConfigError(str(exc)) from exc
    try:
        _one_minus_beta2(extras["v0"], c)
    except ReldecodeError as exc:
        raise ConfigError(f"v0: {exc}") from exc
    if extras["jitter_sigma"] < 0:
        raise ConfigError("jitter_sigma must be nonnegative")
    return model, extras


def _fmt(x) -> str:
    return format_number(x)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def cmd_solve(args) -> int:
    model, _ = load_config(args.config)
    try:
        t_info = model.t_info
    except ZeroDivisionError:
        t_info = math.inf
    values = [
        ("beta", model.beta),
        ("Z", model.partition),
        ("mean_tau", model.mean_tau),
        ("entropy", model.entropy),
        ("T_info", t_info),
        ("E", model.energy),
        ("log_Z", model.log_partition),
    ]
    for name, val in values:
        print(f"{name}={_fmt(val)}")
    return EXIT_OK


def _sweep_models(args):
    """``(label, model, v0)`` triples for the sweep source."""
    if args.config:
        model, extras = load_config(args.config)
        return [(Path(args.config).stem, model, extras["v0"])]
    ns = args.n or [5]
    return [(f"n={n}", figure_model(n, args.beta_tau, beta=args.beta, power=args.power,
                                    light_speed=args.c), 0.0) for n in ns]


def _output_paths(output: Path, labels) -> list:
    if len(labels) == 1:
        return [output]
    return [output.with_name(f"{output.stem}_{lab.replace('=', '')}{output.suffix}")
            for lab in labels]


def cmd_sweep(args) -> int:
    sources = _sweep_models(args)
    c = sources[0][1].light_speed
    grid = velocity_grid(args.v_min, args.v_max, args.steps, c)
    output = Path(args.output)
    paths = _output_paths(output, [s[0] for s in sources])
    curves, markers = {}, {}
    for (label, model, v0), path in zip(sources, paths):
        rows = sweep_rows(model, grid, args.quantity, v0, args.kld_mode)
        write_csv(rows, path)
        curves[label] = rows
        if not args.config:
            markers[label] = critical_velocity_approx(model.n, model.beta_tau, c)
    if args.emit_plot_script:
        from .plotting import write_gnuplot_script

        write_gnuplot_script(paths, args.quantity, output.with_suffix(".gp"))
    if args.plot:
        from .plotting import plot_quantity

        plot_quantity(args.quantity, curves, output.with_suffix(".png"), markers, c)
    return EXIT_OK


def cmd_vcrit(args) -> int:
    rows = []
    if args.config:
        model, _ = load_config(args.config)
        c = model.light_speed
        if args.variant == "paper":
            print("n,v_crit")
            rows.append((str(model.n), lambda: critical_velocity_paper(
                model.beta_tau, model.log_partition, c)))
        else:
            print("v_crit")
            rows.append((None, lambda: critical_velocity_consistent(model)))
    else:
        ns = args.n or [5, 10, 20, 40]
        print("n,v_crit")
        for n in ns:
            if args.variant == "paper":
                rows.append((str(n), lambda n=n: critical_velocity_approx(n, args.beta_tau, args.c)))
            else:
                fig = figure_model(n, args.beta_tau, beta=args.beta, power=args.power,
                                   light_speed=args.c)
                rows.append((str(n), lambda fig=fig: critical_velocity_consistent(fig)))
    ok = 0
    for label, fn in rows:
        try:
            text = _fmt(fn())
            ok += 1
        except ReldecodeError as exc:
            text = type(exc).__name__
        print(text if label is None else f"{label},{text}")
    return EXIT_OK if ok else EXIT_NO_ROWS


def cmd_simulate(args) -> int:
    model, extras = load_config(args.config)
    v0 = args.v0 if args.v0 is not None else extras["v0"]
    sigma = args.sigma if args.sigma is not None else extras["jitter_sigma"]
    try:
        config = SimulationConfig(model, args.v, v0, args.num_symbols, args.trials,
                                  args.seed, sigma)
    except ReldecodeError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        report = run_simulation(config, workers=args.workers)
    except ReldecodeError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_SIM
    text = "\n".join(report.as_lines()) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_audit(args) -> int:
    model = load_config(args.config)[0] if args.config else None
    ns = args.n or [5, 10, 20, 40]
    for check in run_audit(model, n=ns[0], beta_tau=args.beta_tau, c=args.c,
                           power=args.power, ns=ns if len(ns) > 1 else [5, 10, 20, 40]):
        print(check.line())
    return EXIT_OK


def cmd_figures(args) -> int:
    """Write the three velocity-sweep figures (CSV per curve plus PNG)."""
    from .plotting import plot_quantity

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ns = args.n or [5, 10, 20, 40]
    c = args.c
    grid = velocity_grid(0.0, args.v_max * c, args.steps, c)
    for stem, quantity, names in (("fig1_kld", "kld", ns),
                                  ("fig2_fisher", "fisher", [ns[0]]),
                                  ("fig3_free_energy", "free-energy", ns)):
        curves, markers = {}, {}
        for n in names:
            model = figure_model(n, args.beta_tau, beta=args.beta, power=args.power, light_speed=c)
            label = f"n={n}" if quantity != "fisher" else f"beta<tau>={args.beta_tau:g}"
            rows = sweep_rows(model, grid, quantity)
            write_csv(rows, outdir / f"{stem}_n{n}.csv")
            curves[label] = rows
            markers[label] = critical_velocity_approx(n, args.beta_tau, c)
        png = plot_quantity(quantity, curves, outdir / f"{stem}.png",
                            markers if quantity == "free-energy" else None, c)
        print(png)
    return EXIT_OK


def _speed_list(parser, name, **kw):
    parser.add_argument(name, type=int, nargs="+", **kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reldecode",
                                description="Time-encoded communication under relative motion.")
    sub = p.add_subparsers(dest="command", required=True)

    def figure_opts(sp, default_c=True):
        sp.add_argument("--beta-tau", type=float, default=1.0, help="beta*<tau> in figure mode")
        sp.add_argument("--beta", type=float, default=1.0, help="beta in figure mode")
        sp.add_argument("--power", type=float, default=1.0)
        if default_c:
            sp.add_argument("--c", type=float, default=1.0, help="light speed")

    sp = sub.add_parser("solve", help="print the derived scalars of a model config")
    sp.add_argument("config")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="velocity sweep to CSV")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--config")
    _speed_list(src, "--n", help="codebook size(s) in figure mode")
    sp.add_argument("--quantity", choices=QUANTITIES, default="all")
    sp.add_argument("--v-min", type=float, default=0.0)
    sp.add_argument("--v-max", type=float, default=0.99)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--kld-mode", choices=[m.value for m in KldMode], default=None)
    sp.add_argument("--output", required=True)
    sp.add_argument("--emit-plot-script", action="store_true",
                    help="write a gnuplot script next to the CSV")
    sp.add_argument("--plot", action="store_true", help="render a PNG next to the CSV")
    figure_opts(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("vcrit", help="critical velocities")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--config")
    _speed_list(src, "--n")
    sp.add_argument("--variant", choices=("paper", "consistent"), default="paper")
    figure_opts(sp)
    sp.set_defaults(func=cmd_vcrit)

    sp = sub.add_parser("simulate", help="seeded Monte Carlo report")
    sp.add_argument("config")
    sp.add_argument("--v", type=float, required=True)
    sp.add_argument("--v0", type=float, default=None)
    sp.add_argument("--num-symbols", "--N", dest="num_symbols", type=int, default=1000)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--sigma", type=float, default=None, help="relative duration jitter")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("audit", help="consistency checks, one line each")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("--config")
    _speed_list(src, "--n")
    figure_opts(sp)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("figures", help="render the three sweep figures")
    sp.add_argument("--outdir", default="figures")
    _speed_list(sp, "--n")
    sp.add_argument("--v-max", type=float, default=0.999)
    sp.add_argument("--steps", type=int, default=500)
    figure_opts(sp)
    sp.set_defaults(func=cmd_figures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OutOfRange, DegenerateConstraint) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_SOLVER
    except (InvalidParameter, OutOfDomain) as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
