#!/usr/bin/env python3

"""integrate.py: Time integration of the circuit state equations.

Two schemes are provided: a compiled fixed-step classical Runge-Kutta loop and
an adaptive Dormand-Prince 4(5) stepper. Both watch the device safe operating
window (SOA) and a divergence bound after every accepted step.
"""

import logging
import math

from dataclasses import dataclass, field as dc_field
from typing import List, NamedTuple

import numpy as np

from numba import njit
from scipy.integrate import RK45

from memchua.circuit import CircuitParams, StateVector, field
from memchua.errors import DivergenceError, IntegrationConfigError, StiffnessError


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

DIVERGENCE_FACTOR = 1e3
MIN_STEP = 1e-15

EVENT_KINDS = ("soa_low", "soa_high", "diverged")

STATUS_DONE, STATUS_ABORTED, STATUS_DIVERGED = 0, 1, 2


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float = 1e-6
    t_end: float = 0.5
    t_transient: float = 0.1
    record_stride: int = 1
    soa_policy: str = "warn"
    abs_tol: float = 1e-9
    rel_tol: float = 1e-6
    max_events: int = 100000

    def validate(self, adaptive=False):
        if adaptive:
            if not (self.abs_tol > 0 and self.rel_tol > 0):
                raise IntegrationConfigError(
                    f"abs_tol and rel_tol must be positive, got {self.abs_tol}, {self.rel_tol}"
                )
        elif not self.dt > 0:
            raise IntegrationConfigError(f"dt must be positive, got {self.dt}")
        if not (0 <= self.t_transient < self.t_end):
            raise IntegrationConfigError(
                f"Need 0 <= t_transient < t_end, got {self.t_transient}, {self.t_end}"
            )
        if self.record_stride < 1:
            raise IntegrationConfigError(
                f"record_stride must be at least 1, got {self.record_stride}"
            )
        if self.soa_policy not in ("warn", "abort"):
            raise IntegrationConfigError(
                f"soa_policy must be warn or abort, got {self.soa_policy!r}"
            )


class Event(NamedTuple):
    time: float
    kind: str
    value: float


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    events: List[Event] = dc_field(default_factory=list)
    n_steps: int = 0
    stopped: bool = False

    def __len__(self):
        return len(self.times)

    @property
    def v1(self):
        return self.states[:, 0]

    @property
    def diverged(self):
        return any(e.kind == "diverged" for e in self.events)

    @property
    def soa_events(self):
        return [e for e in self.events if e.kind != "diverged"]


def natural_scales(params: CircuitParams):
    """Voltage and current magnitudes beyond which the run counts as diverged."""
    v_min, v_max = params.device.window
    v_scale = max(abs(v_min), abs(v_max))
    # Current scale from G, or from the LC tank when G = 0
    admittance = params.g if params.g > 0 else float(np.sqrt(params.c2 / params.l))
    return DIVERGENCE_FACTOR * v_scale, DIVERGENCE_FACTOR * v_scale * admittance


# Compiled fixed-step scheme
# ---------------------------------------------------


@njit
def rk4_advance(coeffs, c1, c2, l, g, g_n, v1, v2, il, dt):
    h = 0.5 * dt
    k1a, k1b, k1c = field(coeffs, c1, c2, l, g, g_n, v1, v2, il)
    k2a, k2b, k2c = field(
        coeffs, c1, c2, l, g, g_n, v1 + h * k1a, v2 + h * k1b, il + h * k1c
    )
    k3a, k3b, k3c = field(
        coeffs, c1, c2, l, g, g_n, v1 + h * k2a, v2 + h * k2b, il + h * k2c
    )
    k4a, k4b, k4c = field(
        coeffs, c1, c2, l, g, g_n, v1 + dt * k3a, v2 + dt * k3b, il + dt * k3c
    )
    w = dt / 6.0
    return (
        v1 + w * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        v2 + w * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
        il + w * (k1c + 2.0 * k2c + 2.0 * k3c + k4c),
    )


@njit
def _in_bounds(v1, v2, il, v_cap, i_cap):
    if not (math.isfinite(v1) and math.isfinite(v2) and math.isfinite(il)):
        return False
    return abs(v1) <= v_cap and abs(v2) <= v_cap and abs(il) <= i_cap


@njit
def _run_rk4(
    coeffs, c1, c2, l, g, g_n, y0, dt, n_steps, n_skip, stride,
    v_min, v_max, v_cap, i_cap, abort, max_events,
):
    n_rec = (n_steps - n_skip) // stride + 2
    times = np.empty(n_rec)
    states = np.empty((n_rec, 3))
    ev_t = np.empty(max_events)
    ev_k = np.empty(max_events, np.int64)
    ev_v = np.empty(max_events)
    n = 0
    n_ev = 0
    status = 0

    v1, v2, il = y0[0], y0[1], y0[2]
    if n_skip == 0:
        times[0] = 0.0
        states[0, 0], states[0, 1], states[0, 2] = v1, v2, il
        n = 1

    outside = False
    last = 0
    for step in range(1, n_steps + 1):
        v1, v2, il = rk4_advance(coeffs, c1, c2, l, g, g_n, v1, v2, il, dt)
        t = step * dt
        last = step

        if not _in_bounds(v1, v2, il, v_cap, i_cap):
            if n_ev < max_events:
                ev_t[n_ev], ev_k[n_ev], ev_v[n_ev] = t, 2, v1
                n_ev += 1
            status = 2
            break

        now_outside = v1 < v_min or v1 > v_max
        if now_outside and not outside:
            if n_ev < max_events:
                ev_t[n_ev] = t
                ev_k[n_ev] = 0 if v1 < v_min else 1
                ev_v[n_ev] = v1
                n_ev += 1
            if abort:
                status = 1
        outside = now_outside

        if step >= n_skip and ((step - n_skip) % stride == 0 or status == 1):
            times[n] = t
            states[n, 0], states[n, 1], states[n, 2] = v1, v2, il
            n += 1
        if status == 1:
            break

    return times[:n], states[:n], ev_t[:n_ev], ev_k[:n_ev], ev_v[:n_ev], status, last


def step_rk4(params: CircuitParams, s: StateVector, dt: float) -> StateVector:
    if not dt > 0:
        raise IntegrationConfigError(f"dt must be positive, got {dt}")
    v1, v2, il = (float(x) for x in s)
    out = rk4_advance(*params.kernel_args(), v1, v2, il, float(dt))
    if not all(np.isfinite(out)):
        raise DivergenceError(None, out)
    return StateVector(*out)


def _check_init(init):
    init = np.array([float(x) for x in init], dtype=np.float64)
    if init.shape != (3,) or not np.all(np.isfinite(init)):
        raise IntegrationConfigError(f"Initial state must be three finite values, got {init}")
    return init


def _events(ev_t, ev_k, ev_v):
    return [
        Event(float(t), EVENT_KINDS[int(k)], float(v)) for t, k, v in zip(ev_t, ev_k, ev_v)
    ]


def _log_outcome(traj, cfg):
    for event in traj.events:
        if event.kind == "diverged":
            logger.warning(f"Trajectory diverged at t = {event.time:.6e} s")
            break
    n_soa = len(traj.soa_events)
    if n_soa:
        logger.warning(
            f"{n_soa} SOA event(s); first at t = {traj.soa_events[0].time:.6e} s "
            f"with v1 = {traj.soa_events[0].value:.4f} V (policy {cfg.soa_policy})"
        )
    logger.debug(f"{traj.n_steps} steps taken, {len(traj)} samples recorded")


def integrate(params: CircuitParams, init, cfg: IntegrationConfig) -> Trajectory:
    """Fixed-step RK4 integration from `init` to `cfg.t_end`."""
    cfg.validate()
    y0 = _check_init(init)

    n_steps = int(round(cfg.t_end / cfg.dt))
    n_skip = int(round(cfg.t_transient / cfg.dt))
    v_min, v_max = params.device.window
    v_cap, i_cap = natural_scales(params)

    times, states, ev_t, ev_k, ev_v, status, last = _run_rk4(
        *params.kernel_args(),
        y0,
        float(cfg.dt),
        n_steps,
        n_skip,
        int(cfg.record_stride),
        float(v_min),
        float(v_max),
        float(v_cap),
        float(i_cap),
        cfg.soa_policy == "abort",
        int(cfg.max_events),
    )

    traj = Trajectory(
        times=times.copy(),
        states=states.copy(),
        events=_events(ev_t, ev_k, ev_v),
        n_steps=int(last),
        stopped=status != STATUS_DONE,
    )
    if len(ev_t) == cfg.max_events:
        logger.warning(f"Event log saturated at {cfg.max_events} entries")
    _log_outcome(traj, cfg)
    return traj


# Adaptive scheme
# ---------------------------------------------------


class _EventMonitor:
    """Same SOA and divergence rules as the compiled loop."""

    def __init__(self, params, abort, max_events):
        self.v_min, self.v_max = params.device.window
        self.v_cap, self.i_cap = natural_scales(params)
        self.abort = abort
        self.max_events = max_events
        self.events = []
        self.outside = False

    def _add(self, event):
        if len(self.events) < self.max_events:
            self.events.append(event)

    def check(self, t, y):
        v1, v2, il = y
        finite = np.all(np.isfinite(y))
        if not (finite and abs(v1) <= self.v_cap and abs(v2) <= self.v_cap and abs(il) <= self.i_cap):
            self._add(Event(float(t), "diverged", float(v1)))
            return STATUS_DIVERGED

        now_outside = v1 < self.v_min or v1 > self.v_max
        status = STATUS_DONE
        if now_outside and not self.outside:
            kind = "soa_low" if v1 < self.v_min else "soa_high"
            self._add(Event(float(t), kind, float(v1)))
            if self.abort:
                status = STATUS_ABORTED
        self.outside = now_outside
        return status


def integrate_adaptive(params: CircuitParams, init, cfg: IntegrationConfig) -> Trajectory:
    """Dormand-Prince 4(5) integration with the standard step-size controller."""
    cfg.validate(adaptive=True)
    y0 = _check_init(init)
    args = params.kernel_args()

    def rhs(t, y):
        return np.array(field(*args, y[0], y[1], y[2]))

    solver = RK45(rhs, 0.0, y0, cfg.t_end, rtol=cfg.rel_tol, atol=cfg.abs_tol)
    monitor = _EventMonitor(params, cfg.soa_policy == "abort", cfg.max_events)

    times, states = [], []
    if cfg.t_transient == 0:
        times.append(0.0)
        states.append(y0.copy())

    n_steps = 0
    n_after = 0
    status = STATUS_DONE
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            logger.debug(message)
            raise StiffnessError(solver.t, solver.step_size or 0.0)
        n_steps += 1
        if solver.status == "running" and solver.step_size < MIN_STEP:
            raise StiffnessError(solver.t, solver.step_size)

        t, y = solver.t, solver.y
        status = monitor.check(t, y)
        if status == STATUS_DIVERGED:
            break
        if t >= cfg.t_transient:
            n_after += 1
            if n_after % cfg.record_stride == 0 or status == STATUS_ABORTED:
                times.append(float(t))
                states.append(y.copy())
        if status == STATUS_ABORTED:
            break

    traj = Trajectory(
        times=np.array(times, dtype=np.float64),
        states=np.array(states, dtype=np.float64).reshape(-1, 3),
        events=monitor.events,
        n_steps=n_steps,
        stopped=status != STATUS_DONE,
    )
    _log_outcome(traj, cfg)
    return traj


def run(params: CircuitParams, init, cfg: IntegrationConfig, method="rk4") -> Trajectory:
    if method == "rk4":
        return integrate(params, init, cfg)
    if method == "adaptive":
        return integrate_adaptive(params, init, cfg)
    raise IntegrationConfigError(f"Unknown integration method {method!r}")
