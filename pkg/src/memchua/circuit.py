#!/usr/bin/env python3

"""circuit.py: The memristor-based Chua's circuit as a dynamical system.

State variables are the capacitor voltages v1, v2 and the inductor current iL.
The nonlinear block is the memristor in parallel with an ideal negative
conductance -G_N, so that i_R(v) = i_M(v) - G_N v.
"""

import logging

from dataclasses import dataclass, replace
from typing import NamedTuple, Tuple

import numpy as np

from numba import njit
from scipy.optimize import brentq

from memchua.device import DevicePoly, horner_conductance, horner_current


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

SCAN_POINTS = 4096
ROOT_XTOL = 1e-14
WINDOW_MARGIN = 0.1
ORIGIN_MERGE = 1e-9
STABILITY_RTOL = 1e-9


@dataclass(frozen=True)
class CircuitParams:
    c1: float
    c2: float
    l: float
    g: float
    g_n: float
    device: DevicePoly

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0 or self.l <= 0:
            raise ValueError(
                f"c1, c2 and l must be positive, got {self.c1}, {self.c2}, {self.l}"
            )
        if self.g < 0 or self.g_n < 0:
            raise ValueError(f"g and g_n must be non-negative, got {self.g}, {self.g_n}")

    def with_device(self, device):
        return replace(self, device=device)

    def kernel_args(self):
        """Flat argument tuple for the compiled kernels."""
        return (self.device.coeffs, self.c1, self.c2, self.l, self.g, self.g_n)


class StateVector(NamedTuple):
    v1: float
    v2: float
    i_l: float


class StabilityVerdict(NamedTuple):
    stable: bool
    saddle_focus: bool


@dataclass(frozen=True)
class EquilibriumPoint:
    state: StateVector
    label: str
    eigenvalues: Tuple[complex, complex, complex]
    stable: bool
    saddle_focus: bool
    in_window: bool


# Compiled right-hand side
# ---------------------------------------------------


@njit
def block_current(coeffs, g_n, v):
    return horner_current(coeffs, v) - g_n * v


@njit
def field(coeffs, c1, c2, l, g, g_n, v1, v2, il):
    dv1 = ((v2 - v1) * g - block_current(coeffs, g_n, v1)) / c1
    dv2 = ((v1 - v2) * g + il) / c2
    dil = -v2 / l
    return dv1, dv2, dil


# Public surface
# ---------------------------------------------------


def nonlinear_current(params: CircuitParams, v: float) -> float:
    return float(block_current(params.device.coeffs, params.g_n, float(v)))


def nonlinear_slope(params: CircuitParams, v: float) -> float:
    """di_R/dv; equals p1 - G_N at the origin."""
    return float(horner_conductance(params.device.coeffs, float(v))) - params.g_n


def existence_condition(params: CircuitParams) -> bool:
    """P+ and P- exist only when the block slope at the origin is below -G."""
    return params.device.p1 - params.g_n < -params.g


def vector_field(params: CircuitParams, s: StateVector) -> StateVector:
    v1, v2, il = (float(x) for x in s)
    return StateVector(*field(*params.kernel_args(), v1, v2, il))


def jacobian(params: CircuitParams, s: StateVector) -> np.ndarray:
    g, c1, c2, l = params.g, params.c1, params.c2, params.l
    return np.array(
        [
            [(-g - nonlinear_slope(params, s.v1)) / c1, g / c1, 0.0],
            [g / c2, -g / c2, 1.0 / c2],
            [0.0, -1.0 / l, 0.0],
        ]
    )


def alpha_beta(params: CircuitParams) -> Tuple[float, float]:
    """Dimensionless alpha = C2/C1 and beta = R^2 C2 / L."""
    return params.c2 / params.c1, params.c2 / (params.l * params.g**2)


def time_scale(params: CircuitParams) -> float:
    """R C2, the time unit of the dimensionless Chua equations."""
    return params.c2 / params.g


def classify_stability(eq: EquilibriumPoint) -> StabilityVerdict:
    return _stability(np.asarray(eq.eigenvalues))


def _stability(eigenvalues):
    radius = float(np.max(np.abs(eigenvalues)))
    tol = STABILITY_RTOL * radius
    stable = not bool(np.any(eigenvalues.real > tol))

    is_complex = np.abs(eigenvalues.imag) > tol
    saddle_focus = False
    if np.count_nonzero(is_complex) == 2:
        real_root = eigenvalues[~is_complex][0].real
        pair_real = eigenvalues[is_complex][0].real
        saddle_focus = bool(real_root * pair_real < 0)

    return StabilityVerdict(stable, saddle_focus)


def _make_point(params, v1, label):
    state = StateVector(v1, 0.0, -params.g * v1)
    eigenvalues = np.linalg.eigvals(jacobian(params, state))
    eigenvalues = np.array(sorted(eigenvalues, key=lambda z: (z.real, z.imag)))
    verdict = _stability(eigenvalues)
    v_min, v_max = params.device.window
    return EquilibriumPoint(
        state=state,
        label=label,
        eigenvalues=tuple(complex(z) for z in eigenvalues),
        stable=verdict.stable,
        saddle_focus=verdict.saddle_focus,
        in_window=bool(v_min <= v1 <= v_max),
    )


def find_equilibria(params: CircuitParams):
    """Solve i_R(v) + G v = 0 for P0, P+ and P-.

    Nonzero roots are the real roots of the quartic q(v) obtained by dividing
    out v. They are bracketed by a sign-change scan over the padded device
    window, refined by bracketing bisection and polished with one Newton step.
    """

    p = params.device
    q_coeffs = [p.p5, p.p4, p.p3, p.p2, p.p1 + params.g - params.g_n]

    def q(v):
        return np.polyval(q_coeffs, v)

    def h(v):
        return nonlinear_current(params, v) + params.g * v

    v_min, v_max = p.window
    margin = WINDOW_MARGIN * (v_max - v_min)
    grid = np.linspace(v_min - margin, v_max + margin, SCAN_POINTS)
    qv = q(grid)

    roots = []
    for k in range(SCAN_POINTS - 1):
        a, b = grid[k], grid[k + 1]
        if qv[k] == 0.0:
            roots.append(a)
        elif qv[k] * qv[k + 1] < 0.0:
            root = brentq(q, a, b, xtol=ROOT_XTOL)
            slope = nonlinear_slope(params, root) + params.g
            if slope != 0.0:
                polished = root - h(root) / slope
                if a <= polished <= b and abs(h(polished)) <= abs(h(root)):
                    root = polished
            roots.append(root)
            logger.debug(f"Equilibrium root refined at v1 = {root:.15g} V")
    if qv[-1] == 0.0:
        roots.append(grid[-1])

    points = [_make_point(params, 0.0, "P0")]
    for root in sorted(set(roots)):
        if abs(root) < ORIGIN_MERGE:
            continue
        point = _make_point(params, float(root), "P+" if root > 0 else "P-")
        if not point.in_window:
            logger.warning(
                f"Equilibrium {point.label} at v1 = {root:.4f} V lies outside the "
                f"device window [{v_min}, {v_max}] V"
            )
        points.append(point)

    return points
