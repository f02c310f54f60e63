#!/usr/bin/env python3

"""analysis.py: Trajectory taxonomy, Lyapunov estimation and R_PROG sweeps.

Trajectories are sorted into fixed point, periodic, single-scroll and
double-scroll attractors (or diverged) from three observations: which
equilibrium neighbourhoods they visit, how many distinct values the local
extrema of v1 take, and the sign of the largest Lyapunov exponent.
"""

import logging
import time

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from numba import njit

from memchua.circuit import CircuitParams, find_equilibria, time_scale
from memchua.design import DesignSpec, design_circuit
from memchua.device import DevicePoly, DeviceState, StateTable, state_at
from memchua.errors import DesignError, LyapunovError, MemChuaError
from memchua.integrate import IntegrationConfig, Trajectory, rk4_advance, run


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

LABELS = ("fixed_point", "periodic", "single_scroll", "double_scroll", "diverged")
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class AnalysisConfig:
    r_vis_fraction: float = 0.3
    cluster_tol: float = 0.01
    max_clusters: int = 8
    lambda_periodic: float = 0.01
    fixed_point_tol: float = 1e-4
    dead_band: float = 0.05
    min_samples: int = 16
    d0: float = 1e-8
    lyapunov: bool = True

    def __post_init__(self):
        for name in ("r_vis_fraction", "cluster_tol", "lambda_periodic", "fixed_point_tol", "d0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.dead_band >= 0:
            raise ValueError(f"dead_band must be non-negative, got {self.dead_band}")
        if self.max_clusters < 1 or self.min_samples < 3:
            raise ValueError(
                "max_clusters must be at least 1 and min_samples at least 3, got "
                f"{self.max_clusters}, {self.min_samples}"
            )


class Extremum(NamedTuple):
    time: float
    value: float
    kind: str


@dataclass(frozen=True)
class TrajectoryClass:
    label: str
    scroll_side: str
    lambda1: Optional[float] = None
    lambda1_scaled: Optional[float] = None
    n_extrema_clusters: int = 0

    def as_dict(self):
        return {
            "label": self.label,
            "scroll_side": self.scroll_side,
            "lambda1_per_s": self.lambda1,
            "lambda1_scaled": self.lambda1_scaled,
            "n_extrema_clusters": self.n_extrema_clusters,
        }


class LyapunovEstimate(NamedTuple):
    per_second: float
    scaled: float


@dataclass(frozen=True)
class SweepSettings:
    mode: str = "fixed"
    n_points: int = 32
    r_factors: Tuple[float, float] = (0.15, 1.5)
    r_range: Optional[Tuple[float, float]] = None
    sigma: float = 0.0
    init_sigma: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("fixed", "redesign"):
            raise ValueError(f"Sweep mode must be fixed or redesign, got {self.mode!r}")
        if self.n_points < 1 or self.workers < 1:
            raise ValueError(
                f"n_points and workers must be at least 1, got {self.n_points}, {self.workers}"
            )
        for name in ("r_factors", "r_range"):
            bounds = getattr(self, name)
            if bounds is not None and not (len(bounds) == 2 and 0 < bounds[0] <= bounds[1]):
                raise ValueError(f"{name} must be an increasing positive pair, got {bounds}")
        if self.sigma < 0 or self.init_sigma < 0:
            raise ValueError(
                f"sigma and init_sigma must be non-negative, got {self.sigma}, {self.init_sigma}"
            )


@dataclass(frozen=True)
class SweepPoint:
    r_prog: float
    extrema: Tuple[float, ...]
    cls: TrajectoryClass
    seed: int
    soa: bool = False


# Local extrema
# ---------------------------------------------------


def local_extrema(times, values) -> list:
    """Strict local maxima and minima, refined by a parabola through three samples.

    Runs of equal samples count once and report the run midpoint.
    """

    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.size < 3:
        return []

    starts = np.concatenate(([0], np.flatnonzero(np.diff(values) != 0.0) + 1))
    ends = np.concatenate((starts[1:] - 1, [values.size - 1]))
    run_values = values[starts]
    if run_values.size < 3:
        return []

    step = np.sign(np.diff(run_values))
    is_max = (step[:-1] > 0) & (step[1:] < 0)
    is_min = (step[:-1] < 0) & (step[1:] > 0)
    idx = np.flatnonzero(is_max | is_min) + 1

    s, e = starts[idx], ends[idx]
    single = s == e

    t_out = 0.5 * (times[s] + times[e])
    v_out = run_values[idx].copy()

    # Newton form of the interpolating parabola around single-sample extrema
    k = s[single]
    t0, t1, t2 = times[k - 1], times[k], times[k + 1]
    y0, y1, y2 = values[k - 1], values[k], values[k + 1]
    f01 = (y1 - y0) / (t1 - t0)
    f12 = (y2 - y1) / (t2 - t1)
    curv = (f12 - f01) / (t2 - t0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_star = 0.5 * (t0 + t1) - f01 / (2.0 * curv)
    ok = np.isfinite(t_star) & (t_star >= t0) & (t_star <= t2)
    t_star = np.where(ok, t_star, t1)
    v_star = np.where(ok, y0 + f01 * (t_star - t0) + curv * (t_star - t0) * (t_star - t1), y1)
    t_out[single] = t_star
    v_out[single] = v_star

    kinds = np.where(is_max[idx - 1], "max", "min")
    return [Extremum(float(t), float(v), str(kd)) for t, v, kd in zip(t_out, v_out, kinds)]


def count_clusters(values, tol) -> int:
    """Leader clustering of sorted values: a new cluster opens beyond `tol`."""
    if len(values) == 0:
        return 0
    ordered = np.sort(np.asarray(values, dtype=np.float64))
    n = 1
    leader = ordered[0]
    for v in ordered[1:]:
        if v - leader > tol:
            n += 1
            leader = v
    return n


# Classification
# ---------------------------------------------------


def _side(positive, negative):
    if positive and negative:
        return "both"
    if positive:
        return "positive"
    if negative:
        return "negative"
    return "none"


def classify(
    traj: Trajectory,
    equilibria,
    cfg: AnalysisConfig,
    lambda1: Optional[float] = None,
    time_unit: Optional[float] = None,
) -> TrajectoryClass:
    """Decide the trajectory type; the transient must already be discarded."""

    scaled = None
    if lambda1 is not None:
        scaled = lambda1 * time_unit if time_unit else lambda1

    def verdict(label, side="none", n_clusters=0):
        return TrajectoryClass(label, side, lambda1, scaled, n_clusters)

    if traj.diverged:
        return verdict("diverged")
    if len(traj) < cfg.min_samples:
        return verdict(INCONCLUSIVE)

    v1 = traj.states[:, 0]
    v2 = traj.states[:, 1]

    # Fixed point: ends next to an equilibrium and keeps approaching it
    distances = [np.hypot(v1 - eq.state.v1, v2 - eq.state.v2) for eq in equilibria]
    nearest = int(np.argmin([d[-1] for d in distances]))
    d = distances[nearest]
    if d[-1] <= cfg.fixed_point_tol:
        q = len(d) // 4
        shrinking = q == 0 or d[-q:].max() <= d[-2 * q : -q].max()
        if shrinking:
            label = equilibria[nearest].label
            side = {"P+": "positive", "P-": "negative"}.get(label, "none")
            return verdict("fixed_point", side)

    outer = [eq for eq in equilibria if eq.label != "P0"]
    visited_pos = visited_neg = False
    if outer:
        r_vis = cfg.r_vis_fraction * max(abs(eq.state.v1) for eq in outer)
        for eq in outer:
            hit = bool(np.any(np.abs(v1 - eq.state.v1) <= r_vis))
            if eq.label == "P+":
                visited_pos = visited_pos or hit
            else:
                visited_neg = visited_neg or hit

    extrema = np.array([e.value for e in local_extrema(traj.times, v1)])
    if extrema.size == 0:
        return verdict(INCONCLUSIVE, _side(visited_pos, visited_neg))

    span = float(v1.max() - v1.min())
    n_clusters = count_clusters(extrema, cfg.cluster_tol * span)
    side = _side(visited_pos, visited_neg)

    regular = scaled is None or scaled < cfg.lambda_periodic
    if n_clusters <= cfg.max_clusters and regular:
        return verdict("periodic", side, n_clusters)

    both_signs = bool(np.any(extrema > cfg.dead_band)) and bool(
        np.any(extrema < -cfg.dead_band)
    )
    if visited_pos and visited_neg and both_signs:
        return verdict("double_scroll", "both", n_clusters)

    if side in ("both", "none"):
        side = "positive" if float(np.mean(v1)) >= 0 else "negative"
    return verdict("single_scroll", side, n_clusters)


# Largest Lyapunov exponent
# ---------------------------------------------------


@njit
def _benettin(coeffs, c1, c2, l, g, g_n, y0, dt, n_steps, n_skip, renorm, d0, i_unit):
    x1, x2, x3 = y0[0], y0[1], y0[2]
    s1, s2, s3 = x1 + d0, x2, x3
    total = 0.0
    count = 0
    for step in range(1, n_steps + 1):
        x1, x2, x3 = rk4_advance(coeffs, c1, c2, l, g, g_n, x1, x2, x3, dt)
        s1, s2, s3 = rk4_advance(coeffs, c1, c2, l, g, g_n, s1, s2, s3, dt)
        if step % renorm == 0:
            e1 = s1 - x1
            e2 = s2 - x2
            e3 = (s3 - x3) / i_unit
            dist = np.sqrt(e1 * e1 + e2 * e2 + e3 * e3)
            if not np.isfinite(dist) or dist == 0.0:
                return np.nan, count
            if step > n_skip:
                total += np.log(dist / d0)
                count += 1
            f = d0 / dist
            s1 = x1 + e1 * f
            s2 = x2 + e2 * f
            s3 = x3 + e3 * f * i_unit
    return total, count


def largest_lyapunov(
    params: CircuitParams, init, cfg: IntegrationConfig, d0: float = 1e-8
) -> LyapunovEstimate:
    """Two-trajectory Benettin estimate, renormalised every R C2."""

    cfg.validate()
    y0 = np.array([float(x) for x in init], dtype=np.float64)

    if params.g > 0:
        tau = time_scale(params)
        i_unit = params.g
    else:
        tau = 1000 * cfg.dt
        i_unit = float(np.sqrt(params.c2 / params.l))
    renorm = max(1, int(round(tau / cfg.dt)))
    tau_r = renorm * cfg.dt

    n_steps = int(round(cfg.t_end / cfg.dt))
    n_skip = int(round(cfg.t_transient / cfg.dt))
    total, count = _benettin(
        *params.kernel_args(),
        y0,
        float(cfg.dt),
        n_steps,
        n_skip,
        renorm,
        float(d0),
        float(i_unit),
    )
    if not np.isfinite(total):
        raise LyapunovError("Shadow trajectory separation became non-finite")
    if count == 0:
        raise LyapunovError(
            f"No renormalisation after the transient (interval {tau_r:.3e} s)"
        )

    per_second = float(total / (count * tau_r))
    scaled = per_second * time_scale(params) if params.g > 0 else per_second * tau_r
    logger.debug(f"Largest Lyapunov exponent {per_second:.6g} 1/s ({scaled:.4g} scaled)")
    return LyapunovEstimate(per_second, scaled)


# Simulation of one operating point
# ---------------------------------------------------


def perturb(poly: DevicePoly, sigma: float, seed) -> DevicePoly:
    """Cycle-to-cycle variability: independent lognormal factor per coefficient."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return poly
    rng = np.random.default_rng(seed)
    factors = rng.lognormal(mean=0.0, sigma=sigma, size=5)
    return DevicePoly.from_coeffs(poly.coeffs * factors, poly.v_min, poly.v_max)


def simulate_and_classify(
    params: CircuitParams,
    init,
    int_cfg: IntegrationConfig,
    an_cfg: AnalysisConfig,
    method: str = "rk4",
):
    """Integrate, estimate the Lyapunov exponent when meaningful, classify."""

    traj = run(params, init, int_cfg, method)
    equilibria = find_equilibria(params)

    lambda1 = None
    unit = time_scale(params) if params.g > 0 else None
    if an_cfg.lyapunov and not traj.diverged and not traj.stopped:
        try:
            estimate = largest_lyapunov(params, init, int_cfg, an_cfg.d0)
            lambda1 = estimate.per_second
        except LyapunovError as err:
            logger.warning(f"Lyapunov estimate unavailable: {err}")

    return traj, classify(traj, equilibria, an_cfg, lambda1, unit), equilibria


def point_seeds(seed: int, n: int):
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]


def _sweep_task(task):
    (r_prog, state, ref_params, spec, settings, init, seed, int_cfg, an_cfg) = task

    poly = perturb(state.poly, settings.sigma, seed)
    try:
        if settings.mode == "fixed":
            params = ref_params.with_device(poly)
        else:
            device = DeviceState(state.r_prog, state.v_set_mag, state.v_stop, poly)
            report = design_circuit(device, spec)
            if not report.passed:
                logger.warning(
                    f"Design at R_PROG = {r_prog:.6g} ohm fails {', '.join(report.failed)}"
                )
            params = report.params
    except (DesignError, ValueError) as err:
        logger.warning(f"Sweep point R_PROG = {r_prog:.6g} ohm is infeasible: {err}")
        return SweepPoint(r_prog, (), TrajectoryClass(INCONCLUSIVE, "none"), seed)

    init = np.asarray(init, dtype=np.float64)
    if settings.init_sigma > 0:
        rng = np.random.default_rng([seed, 1])
        init = init + rng.normal(0.0, settings.init_sigma, size=3) * np.array(
            [1.0, 1.0, params.g]
        )

    try:
        traj, cls, _ = simulate_and_classify(params, init, int_cfg, an_cfg)
    except MemChuaError as err:
        logger.warning(f"Sweep point R_PROG = {r_prog:.6g} ohm failed: {err}")
        return SweepPoint(r_prog, (), TrajectoryClass(INCONCLUSIVE, "none"), seed)

    extrema = tuple(e.value for e in local_extrema(traj.times, traj.v1))
    logger.debug(f"R_PROG = {r_prog:.6g} ohm: {cls.label} ({len(extrema)} extrema)")
    return SweepPoint(r_prog, extrema, cls, seed, soa=len(traj.soa_events) > 0)


def sweep_resistances(r_ref: float, settings: SweepSettings):
    if settings.n_points < 1:
        raise ValueError(f"n_points must be at least 1, got {settings.n_points}")
    if settings.n_points == 1:
        return np.array([r_ref])
    if settings.r_range is not None:
        r_lo, r_hi = settings.r_range
    else:
        r_lo, r_hi = (f * r_ref for f in settings.r_factors)
    if not (0 < r_lo <= r_hi):
        raise ValueError(f"Invalid resistance range [{r_lo}, {r_hi}]")
    return np.geomspace(r_lo, r_hi, settings.n_points)


def sweep(
    table: StateTable,
    spec: DesignSpec,
    settings: SweepSettings,
    int_cfg: IntegrationConfig,
    an_cfg: AnalysisConfig,
    init: Sequence[float] = (0.1, 0.0, 0.0),
    seed: int = 0,
    r_ref: Optional[float] = None,
) -> list:
    """Bifurcation sweep over programmed resistance, ordered by R_PROG.

    In "fixed" mode the components stay at the design for `r_ref` and only
    the memristor is reprogrammed; in "redesign" mode every point gets its
    own design.
    """

    if settings.mode not in ("fixed", "redesign"):
        raise ValueError(f"Sweep mode must be fixed or redesign, got {settings.mode!r}")

    r_ref = table[-1].r_prog if r_ref is None else r_ref
    resistances = sweep_resistances(r_ref, settings)
    ref_params = None
    if settings.mode == "fixed":
        ref_params = design_circuit(state_at(table, r_ref), spec).params

    seeds = point_seeds(seed, len(resistances))
    tasks = [
        (float(r), state_at(table, float(r)), ref_params, spec, settings, tuple(init), s, int_cfg, an_cfg)
        for r, s in zip(resistances, seeds)
    ]

    logger.info(
        f"Sweeping {len(tasks)} points over [{resistances[0]:.6g}, {resistances[-1]:.6g}] ohm "
        f"in {settings.mode} mode with {settings.workers} worker(s)"
    )
    start_time = time.time()

    if settings.workers > 1:
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            points = list(pool.map(_sweep_task, tasks))
    else:
        points = [_sweep_task(task) for task in tasks]

    logger.info(f"Sweep finished in {time.time() - start_time:.2f} seconds")
    for label in LABELS + (INCONCLUSIVE,):
        n = sum(p.cls.label == label for p in points)
        if n:
            logger.info(f"{label}: {n} point(s)")

    return points
