#!/usr/bin/env python3

"""device.py: Static I-V model of a programmed memristor.

The memristor is used as a static nonlinearity, described by a fifth order
polynomial without constant term and valid inside the voltage window bounded
by -|V_SET| and V_STOP. A programmed high resistance state is identified by
its resistance R_PROG measured at 0.1 V; a StateTable holds several of them.
"""

import logging

from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from numba import njit

from memchua.errors import SingularFitError, UnderdeterminedFitError


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

N_COEFFS = 5

# Voltage at which R_PROG is read
READ_VOLTAGE = 0.1

# Fit windows stop short of the SET edge
FIT_SET_MARGIN = 0.9

# Reference HfO2 device programmed with V_STOP = 2.6 V
REFERENCE_COEFFS = (1.91e-6, 3.11e-7, 1.91e-5, -5.20e-6, 1.77e-6)
REFERENCE_V_SET = 1.2
REFERENCE_V_STOP = 2.6


@njit
def horner_current(coeffs, v):
    """i = p1 v + p2 v^2 + ... + p5 v^5 in nested form."""
    acc = 0.0
    for k in range(coeffs.shape[0] - 1, -1, -1):
        acc = (acc + coeffs[k]) * v
    return acc


@njit
def horner_conductance(coeffs, v):
    """di/dv = p1 + 2 p2 v + ... + 5 p5 v^4."""
    acc = 0.0
    for k in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * v + (k + 1) * coeffs[k]
    return acc


@dataclass(frozen=True)
class DevicePoly:
    p1: float
    p2: float
    p3: float
    p4: float
    p5: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not (self.v_min < 0.0 < self.v_max):
            raise ValueError(
                f"Device window must satisfy v_min < 0 < v_max, got [{self.v_min}, {self.v_max}]"
            )

    @classmethod
    def from_coeffs(cls, coeffs, v_min, v_max):
        p1, p2, p3, p4, p5 = (float(c) for c in coeffs)
        return cls(p1, p2, p3, p4, p5, float(v_min), float(v_max))

    @property
    def coeffs(self):
        return np.array([self.p1, self.p2, self.p3, self.p4, self.p5], dtype=np.float64)

    @property
    def window(self):
        return self.v_min, self.v_max

    def scaled(self, factor):
        return DevicePoly.from_coeffs(self.coeffs * factor, self.v_min, self.v_max)

    def with_window(self, v_min, v_max):
        return replace(self, v_min=float(v_min), v_max=float(v_max))


@dataclass(frozen=True)
class DeviceState:
    r_prog: float
    v_set_mag: float
    v_stop: float
    poly: DevicePoly

    def __post_init__(self):
        if self.r_prog <= 0 or self.v_set_mag <= 0 or self.v_stop <= 0:
            raise ValueError(
                "r_prog, v_set_mag and v_stop must be positive, got "
                f"{self.r_prog}, {self.v_set_mag}, {self.v_stop}"
            )
        if self.poly.v_min != -self.v_set_mag or self.poly.v_max != self.v_stop:
            raise ValueError(
                "Device window must be [-v_set_mag, v_stop], got "
                f"[{self.poly.v_min}, {self.poly.v_max}]"
            )

    @classmethod
    def from_coeffs(cls, r_prog, v_set_mag, v_stop, coeffs):
        poly = DevicePoly.from_coeffs(coeffs, -float(v_set_mag), float(v_stop))
        return cls(float(r_prog), float(v_set_mag), float(v_stop), poly)


class IVSample(NamedTuple):
    v: float
    i: float


@dataclass(frozen=True)
class FitReport:
    rms: float
    max_abs: float
    condition: float
    n_samples: int


class StateTable:
    """Programmed states sorted by strictly increasing R_PROG."""

    def __init__(self, states: Sequence[DeviceState]):
        states = sorted(states, key=lambda s: s.r_prog)
        if len(states) == 0:
            raise ValueError("A state table needs at least one entry")
        r = np.array([s.r_prog for s in states])
        if np.any(np.diff(r) <= 0):
            raise ValueError("State table resistances must be strictly increasing")
        self.states = tuple(states)
        self._log_r = np.log(r)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, idx):
        return self.states[idx]

    @property
    def r_range(self):
        return self.states[0].r_prog, self.states[-1].r_prog


# I-V model
# ---------------------------------------------------


def eval_current(poly: DevicePoly, v: float) -> float:
    return float(horner_current(poly.coeffs, float(v)))


def eval_conductance(poly: DevicePoly, v: float) -> float:
    return float(horner_conductance(poly.coeffs, float(v)))


def small_signal_conductance(poly: DevicePoly) -> float:
    # p1 dominates the response at low bias
    return poly.p1


def read_resistance(poly: DevicePoly, v_read=READ_VOLTAGE) -> float:
    """R_PROG as measured at the read voltage."""
    i = eval_current(poly, v_read)
    if i <= 0:
        raise ValueError(f"Device passes no positive current at {v_read} V")
    return v_read / i


def fit_poly(
    samples: Sequence[IVSample], window: Tuple[float, float]
) -> Tuple[DevicePoly, FitReport]:
    """Least-squares fit of the fifth order model, no intercept, inside `window`."""

    v_min, v_max = window
    v = np.array([s.v for s in samples], dtype=np.float64)
    i = np.array([s.i for s in samples], dtype=np.float64)

    inside = (v >= v_min) & (v <= v_max)
    if not np.all(inside):
        logger.debug(
            f"Ignoring {int(np.sum(~inside))} samples outside [{v_min}, {v_max}] V"
        )
    v, i = v[inside], i[inside]

    n_distinct = len(np.unique(v[v != 0.0]))
    if n_distinct < N_COEFFS:
        raise UnderdeterminedFitError(n_distinct, N_COEFFS)

    basis = np.column_stack([v ** (k + 1) for k in range(N_COEFFS)])

    # Column scaling keeps the Vandermonde system well conditioned
    norms = np.linalg.norm(basis, axis=0)
    scaled = basis / norms
    solution, _, rank, sv = np.linalg.lstsq(scaled, i, rcond=None)
    condition = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    if rank < N_COEFFS:
        raise SingularFitError(condition)

    coeffs = solution / norms
    residual = i - basis @ coeffs
    report = FitReport(
        rms=float(np.sqrt(np.mean(residual**2))),
        max_abs=float(np.max(np.abs(residual))),
        condition=condition,
        n_samples=int(v.size),
    )

    logger.info(
        f"Fitted {report.n_samples} samples: RMS residual {report.rms:.3e} A, "
        f"max residual {report.max_abs:.3e} A, condition {condition:.3e}"
    )

    return DevicePoly.from_coeffs(coeffs, v_min, v_max), report


# Programmed states
# ---------------------------------------------------


def reference_state() -> DeviceState:
    """Reference programmed state (V_STOP = 2.6 V, |V_SET| taken as 1.2 V)."""
    poly = DevicePoly.from_coeffs(REFERENCE_COEFFS, -REFERENCE_V_SET, REFERENCE_V_STOP)
    return DeviceState(read_resistance(poly), REFERENCE_V_SET, REFERENCE_V_STOP, poly)


def scaling_table(reference: DeviceState = None) -> StateTable:
    """Single-entry table; other states follow the 1/R scaling law."""
    return StateTable([reference if reference is not None else reference_state()])


def state_at(table: StateTable, r_prog: float) -> DeviceState:
    if not r_prog > 0:
        raise ValueError(f"r_prog must be positive, got {r_prog}")

    r_lo, r_hi = table.r_range
    for state in table:
        if state.r_prog == r_prog:
            return state

    if r_prog < r_lo or r_prog > r_hi:
        ref = table[0] if r_prog < r_lo else table[-1]
        coeffs = ref.poly.coeffs * (ref.r_prog / r_prog)
        return DeviceState.from_coeffs(r_prog, ref.v_set_mag, ref.v_stop, coeffs)

    x = np.log(r_prog)
    xp = table._log_r
    v_set = float(np.interp(x, xp, [s.v_set_mag for s in table]))
    v_stop = float(np.interp(x, xp, [s.v_stop for s in table]))
    coeffs = [
        float(np.interp(x, xp, [s.poly.coeffs[k] for s in table]))
        for k in range(N_COEFFS)
    ]
    return DeviceState.from_coeffs(r_prog, v_set, v_stop, coeffs)
