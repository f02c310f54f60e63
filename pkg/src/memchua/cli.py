#!/usr/bin/env python3

"""memchua: Design and simulation of memristor-based Chua's circuits."""

import dataclasses
import logging
import os
import sys
import time

import click

from memchua.analysis import (
    INCONCLUSIVE,
    local_extrema,
    simulate_and_classify,
    sweep,
)
from memchua.circuit import CircuitParams, existence_condition, find_equilibria
from memchua.design import design_circuit
from memchua.device import (
    FIT_SET_MARGIN,
    DeviceState,
    fit_poly,
    read_resistance,
    scaling_table,
    state_at,
)
from memchua.errors import (
    EXIT_DESIGN,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_RUNTIME,
    ConfigError,
    FitError,
    MemChuaError,
)
from memchua.parsers.device_parser import (
    read_iv_samples,
    read_state_table,
    write_device_card,
)
from memchua.parsers.result_parser import (
    equilibria_record,
    write_bifurcation,
    write_extrema,
    write_record,
    write_trajectory,
)
from memchua.utils.options import CONFIG_ENVVAR, load_config


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")


def run_options(func):
    """Options shared by every command."""
    func = click.option(
        "--prefix",
        help="prefix for the output files",
        type=str,
        required=False,
    )(func)
    func = click.option(
        "--out",
        help="path to the output folder",
        type=click.Path(dir_okay=True, writable=True, readable=True),
        required=False,
    )(func)
    func = click.option(
        "--config",
        help=f"path to the YAML run configuration (default from ${CONFIG_ENVVAR})",
        type=click.Path(exists=True, dir_okay=False),
        envvar=CONFIG_ENVVAR,
        required=False,
    )(func)
    return func


def table_option(func):
    return click.option(
        "--table",
        help="path to the programmed-state table (device card) CSV",
        type=click.Path(exists=True, dir_okay=False),
        required=False,
    )(func)


def _normalise_prefix(prefix):
    if prefix is None:
        return None
    if prefix != "" and not prefix.endswith("_"):
        prefix = prefix + "_"
    return prefix


def execute(name, config_file, out, prefix, body, **overrides):
    """Load the configuration, set up logging and map failures to exit codes."""

    logger.setLevel(logging.DEBUG)
    consoleHeader = logging.StreamHandler()
    consoleHeader.setFormatter(formatter)
    consoleHeader.setLevel(logging.INFO)
    logger.addHandler(consoleHeader)
    fileHandler = None

    logger.info("Welcome to MemChua: memristor-based Chua's circuit design and simulation.")

    start_time = time.time()
    try:
        config = load_config(config_file)
        config = config.override(output=out, prefix=_normalise_prefix(prefix), **overrides)

        os.makedirs(config.output, exist_ok=True)
        fileHandler = logging.FileHandler(
            os.path.join(config.output, f"{config.prefix}memchua.log")
        )
        fileHandler.setLevel(logging.DEBUG)
        fileHandler.setFormatter(formatter)
        logger.addHandler(fileHandler)

        logger.info(f"Command: {name}")
        logger.info(f"Configuration: {config_file if config_file else 'defaults'}")
        logger.info(f"Output folder: {config.output}")
        logger.debug(f"Resolved configuration: {config}")

        code = body(config)

    except MemChuaError as err:
        logger.error(str(err))
        code = err.exit_code
    except ValueError as err:
        logger.error(f"Invalid input: {err}")
        code = EXIT_PARSE

    logger.info(f"Elapsed time: {time.time() - start_time:.2f} seconds")
    if code == EXIT_OK:
        logger.info("Thank you for using MemChua! Bye...!")
    else:
        logger.info("Exiting MemChua... Bye...!")

    if fileHandler is not None:
        logger.removeHandler(fileHandler)
        fileHandler.close()
    logger.removeHandler(consoleHeader)

    sys.exit(code)


# Shared steps
# ---------------------------------------------------


def load_state(config, table_file=None):
    """Programmed state at the configured R_PROG (the table's largest by default)."""

    table_file = table_file or config.device.state_table
    table = read_state_table(table_file) if table_file else scaling_table()
    r_prog = config.device.r_prog if config.device.r_prog is not None else table[-1].r_prog
    state = state_at(table, r_prog)
    logger.info(f"Programmed state: R_PROG = {state.r_prog:.6g} ohm")
    return table, state


def build_circuit(config, state):
    """Designed circuit with any explicit component overrides applied."""

    given = config.circuit.given
    if set(given) == {"r", "r_n", "l", "c1", "c2"}:
        logger.info("Using component values from the configuration")
        return CircuitParams(
            c1=given["c1"],
            c2=given["c2"],
            l=given["l"],
            g=1.0 / given["r"],
            g_n=1.0 / given["r_n"],
            device=state.poly,
        )

    report = design_circuit(state, config.design)
    if not report.passed:
        logger.warning(f"Design checks failed: {', '.join(report.failed)}")

    changes = {k: given[k] for k in ("l", "c1", "c2") if k in given}
    if "r" in given:
        changes["g"] = 1.0 / given["r"]
    if "r_n" in given:
        changes["g_n"] = 1.0 / given["r_n"]
    if changes:
        logger.info(f"Overriding designed components: {', '.join(sorted(given))}")
    return dataclasses.replace(report.params, **changes)


def output_file(config, name):
    return os.path.join(config.output, config.prefix + name)


# Commands
# ---------------------------------------------------


@click.group()
@click.version_option(__version__, "-v", "--version", is_flag=True)
def main():
    """
    MemChua: Design and simulation of memristor-based Chua's circuits
    """


@main.command()
@run_options
@click.option(
    "--iv",
    help="path to the I-V samples CSV (voltage_V,current_A)",
    type=click.Path(exists=True, dir_okay=False),
    required=False,
)
@click.option("--v-set", help="magnitude of the SET voltage in V", type=float, required=False)
@click.option("--v-stop", help="RESET stop voltage in V", type=float, required=False)
@click.option("--window-min", help="lower edge of the fit window in V", type=float, required=False)
@click.option("--window-max", help="upper edge of the fit window in V", type=float, required=False)
@click.option(
    "--r-prog",
    help="programmed resistance in ohm (default: read at 0.1 V from the fit)",
    type=click.FloatRange(min=0, min_open=True),
    required=False,
)
def fit(config, out, prefix, iv, v_set, v_stop, window_min, window_max, r_prog):
    """Fit the fifth order I-V model and write a device card."""

    def body(cfg):
        iv_file = iv or cfg.device.iv_samples
        if iv_file is None:
            raise ConfigError("No I-V samples given (--iv or device.iv_samples)")

        set_mag = abs(v_set if v_set is not None else cfg.device.v_set)
        stop = v_stop if v_stop is not None else cfg.device.v_stop

        if window_min is not None or window_max is not None:
            window = (
                window_min if window_min is not None else -FIT_SET_MARGIN * set_mag,
                window_max if window_max is not None else stop,
            )
        elif cfg.device.fit_window is not None:
            window = cfg.device.fit_window
        else:
            window = (-FIT_SET_MARGIN * set_mag, stop)
        logger.info(f"Fit window: [{window[0]}, {window[1]}] V")

        samples = read_iv_samples(iv_file)
        poly, report = fit_poly(samples, window)
        poly = poly.with_window(-set_mag, stop)

        try:
            r = r_prog if r_prog is not None else read_resistance(poly)
            state = DeviceState(float(r), set_mag, stop, poly)
        except ValueError as err:
            raise FitError(f"Fitted device is unusable: {err}")

        write_device_card(output_file(cfg, "device_card.csv"), state)
        write_record(
            output_file(cfg, "fit_report.yaml"),
            {
                "r_prog_ohm": state.r_prog,
                "v_set_V": state.v_set_mag,
                "v_stop_V": state.v_stop,
                "window_V": [float(window[0]), float(window[1])],
                "coefficients": [float(c) for c in poly.coeffs],
                "n_samples": report.n_samples,
                "rms_residual_A": report.rms,
                "max_residual_A": report.max_abs,
                "condition": report.condition,
            },
        )
        return EXIT_OK

    execute("fit", config, out, prefix, body)


@main.command()
@run_options
@table_option
@click.option("--v-eq", help="target voltage of P+ in V", type=float, required=False)
@click.option("--c1", help="C1 in F", type=float, required=False)
@click.option("--alpha", help="C2/C1", type=float, required=False)
@click.option("--beta", help="R^2 C2 / L", type=float, required=False)
def design(config, out, prefix, table, v_eq, c1, alpha, beta):
    """Compute R, R_N, L and C2 and validate the design."""

    def body(cfg):
        spec = dataclasses.replace(
            cfg.design,
            **{
                k: v
                for k, v in dict(v_eq=v_eq, c1=c1, alpha=alpha, beta=beta).items()
                if v is not None
            },
        )
        _, state = load_state(cfg, table)
        report = design_circuit(state, spec)

        record = {"r_prog_ohm": state.r_prog}
        record.update(report.as_dict())
        write_record(output_file(cfg, "design_report.yaml"), record)

        if not report.passed:
            logger.error(f"Design checks failed: {', '.join(report.failed)}")
            return EXIT_DESIGN
        return EXIT_OK

    execute("design", config, out, prefix, body)


@main.command()
@run_options
@table_option
def equilibria(config, out, prefix, table):
    """Locate and classify the equilibrium points."""

    def body(cfg):
        _, state = load_state(cfg, table)
        params = build_circuit(cfg, state)
        points = find_equilibria(params)
        for eq in points:
            logger.info(
                f"{eq.label}: v1 = {eq.state.v1:.6g} V, "
                f"{'stable' if eq.stable else 'unstable'}"
                f"{', saddle-focus' if eq.saddle_focus else ''}"
            )
        write_record(
            output_file(cfg, "equilibria.yaml"),
            {
                "r_prog_ohm": state.r_prog,
                "existence": existence_condition(params),
                "equilibria": equilibria_record(points),
            },
        )
        return EXIT_OK

    execute("equilibria", config, out, prefix, body)


@main.command()
@run_options
@table_option
def simulate(config, out, prefix, table):
    """Integrate the circuit and classify the trajectory."""

    def body(cfg):
        _, state = load_state(cfg, table)
        params = build_circuit(cfg, state)
        method = cfg.simulation.method

        traj, cls, points = simulate_and_classify(
            params, cfg.simulation.init, cfg.integration, cfg.analysis, method
        )
        extrema = local_extrema(traj.times, traj.v1) if len(traj) else []

        write_trajectory(cfg.output, cfg.prefix, traj)
        write_extrema(cfg.output, cfg.prefix, extrema)

        record = {"r_prog_ohm": state.r_prog, "method": method}
        record.update(cls.as_dict())
        record.update(
            {
                "n_samples": len(traj),
                "n_steps": traj.n_steps,
                "n_extrema": len(extrema),
                "n_soa_events": len(traj.soa_events),
                "diverged": traj.diverged,
                "stopped": traj.stopped,
                "equilibria_v1_V": [eq.state.v1 for eq in points],
            }
        )
        write_record(output_file(cfg, "classification.yaml"), record)
        logger.info(f"Trajectory class: {cls.label} ({cls.scroll_side})")

        if traj.stopped:
            reason = "diverged" if traj.diverged else "left the safe operating window"
            logger.error(f"Integration stopped early: the trajectory {reason}")
            return EXIT_RUNTIME
        return EXIT_OK

    execute("simulate", config, out, prefix, body)


@main.command("sweep")
@run_options
@table_option
@click.option(
    "--seed",
    help="base seed for per-point variability",
    type=click.IntRange(min=0),
    required=False,
)
@click.option(
    "--mode",
    help="keep the reference components (fixed) or redesign at every point",
    type=click.Choice(["fixed", "redesign"], case_sensitive=False),
    required=False,
)
@click.option("--n-points", help="number of R_PROG values", type=click.IntRange(min=1), required=False)
@click.option("--workers", help="number of worker processes", type=click.IntRange(min=1), required=False)
def sweep_command(config, out, prefix, table, seed, mode, n_points, workers):
    """Bifurcation sweep over the programmed resistance."""

    def body(cfg):
        settings = dataclasses.replace(
            cfg.sweep,
            **{
                k: v
                for k, v in dict(
                    mode=mode.lower() if mode else None, n_points=n_points, workers=workers
                ).items()
                if v is not None
            },
        )
        state_table, _ = load_state(cfg, table)

        points = sweep(
            state_table,
            cfg.design,
            settings,
            cfg.integration,
            cfg.analysis,
            init=cfg.simulation.init,
            seed=cfg.seed,
            r_ref=cfg.device.r_prog,
        )

        write_bifurcation(cfg.output, cfg.prefix, points)
        write_record(
            output_file(cfg, "sweep_summary.yaml"),
            {
                "mode": settings.mode,
                "seed": cfg.seed,
                "points": [
                    {
                        "r_prog_ohm": p.r_prog,
                        "seed": p.seed,
                        "n_extrema": len(p.extrema),
                        "soa": p.soa,
                        **p.cls.as_dict(),
                    }
                    for p in points
                ],
            },
        )

        if all(p.cls.label == INCONCLUSIVE for p in points):
            logger.error("No sweep point produced a conclusive trajectory")
            return EXIT_RUNTIME
        return EXIT_OK

    execute("sweep", config, out, prefix, body, seed=seed)


if __name__ == "__main__":
    main()
