#!/usr/bin/env python3

"""design.py: Component values for a double-scroll memristor Chua's circuit.

G_N forces the trace of the Jacobian at P0 to zero, G places P+ at the target
voltage v_eq and C2, L follow from the dimensionless alpha and beta. The
resulting circuit is validated numerically before it is reported.
"""

import logging

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from memchua.circuit import (
    CircuitParams,
    StateVector,
    alpha_beta,
    existence_condition,
    find_equilibria,
    jacobian,
)
from memchua.device import DevicePoly, DeviceState, horner_current
from memchua.errors import InfeasibleDesignError, SafeWindowError


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

TRACE_RTOL = 1e-9
V_EQ_TOL = 1e-6


@dataclass(frozen=True)
class DesignSpec:
    v_eq: float = 0.9
    c1: float = 10e-9
    alpha: float = 10.0
    beta: float = 14.22

    def __post_init__(self):
        for name in ("v_eq", "c1", "alpha", "beta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class DesignCheck:
    name: str
    passed: bool
    value: float
    detail: str


@dataclass
class DesignReport:
    params: CircuitParams
    r: float
    r_n: float
    alpha: float
    beta: float
    checks: List[DesignCheck] = field(default_factory=list)
    equilibria: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failed(self):
        return [check.name for check in self.checks if not check.passed]

    def as_dict(self):
        p = self.params
        return {
            "R_ohm": self.r,
            "R_N_ohm": self.r_n,
            "L_H": p.l,
            "C1_F": p.c1,
            "C2_F": p.c2,
            "G_S": p.g,
            "G_N_S": p.g_n,
            "alpha": self.alpha,
            "beta": self.beta,
            "equilibria_v1_V": [eq.state.v1 for eq in self.equilibria],
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "value": c.value,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


def design_g(poly: DevicePoly, spec: DesignSpec) -> float:
    """G = (C2/C1) (i_M(v_eq)/v_eq - p1), using the memristor current i_M.

    (i_M(v)/v - p1) is evaluated as p2 v + p3 v^2 + p4 v^3 + p5 v^4 so that a
    purely linear device gives exactly zero.
    """
    excess = float(horner_current(poly.coeffs[1:], float(spec.v_eq)))
    g = spec.alpha * excess
    if not g > 0:
        raise InfeasibleDesignError(
            f"G = {g:.4e} S at v_eq = {spec.v_eq} V; the device is not "
            "superlinear enough to place P+ there"
        )
    return g


def design_gn(g: float, c1: float, c2: float, p1: float) -> float:
    """G_N zeroing the Jacobian trace at P0."""
    return g + (c1 / c2) * g + p1


def design_reactive(c1: float, g: float, spec: DesignSpec) -> Tuple[float, float]:
    c2 = spec.alpha * c1
    l = c2 / (spec.beta * g**2)
    return c2, l


def design_circuit(state: DeviceState, spec: DesignSpec) -> DesignReport:
    if spec.v_eq >= state.v_set_mag:
        raise SafeWindowError(
            f"v_eq = {spec.v_eq} V is not below |V_SET| = {state.v_set_mag} V"
        )

    poly = state.poly
    logger.info(
        f"Designing circuit for R_PROG = {state.r_prog:.6g} ohm, v_eq = {spec.v_eq} V"
    )

    g = design_g(poly, spec)
    c2, l = design_reactive(spec.c1, g, spec)
    g_n = design_gn(g, spec.c1, c2, poly.p1)
    params = CircuitParams(c1=spec.c1, c2=c2, l=l, g=g, g_n=g_n, device=poly)
    alpha, beta = alpha_beta(params)

    checks = []

    lhs = poly.p1 - g_n
    checks.append(
        DesignCheck("existence", existence_condition(params), lhs, f"p1 - G_N < -G = {-g:.6e}")
    )

    trace = float(np.trace(jacobian(params, StateVector(0.0, 0.0, 0.0))))
    trace_tol = TRACE_RTOL * g / spec.c1
    checks.append(
        DesignCheck("trace-zero", abs(trace) <= trace_tol, trace, f"|tr J(P0)| <= {trace_tol:.3e}")
    )

    equilibria = find_equilibria(params)
    checks.append(
        DesignCheck(
            "three-equilibria",
            len(equilibria) == 3,
            float(len(equilibria)),
            "P0, P+ and P- present",
        )
    )
    checks.append(
        DesignCheck(
            "all-unstable",
            len(equilibria) == 3 and not any(eq.stable for eq in equilibria),
            float(sum(eq.stable for eq in equilibria)),
            "number of stable equilibria must be 0",
        )
    )
    outer = [eq for eq in equilibria if eq.label != "P0"]
    checks.append(
        DesignCheck(
            "in-window",
            len(outer) > 0 and all(eq.in_window for eq in outer),
            float(sum(not eq.in_window for eq in outer)),
            f"P+ and P- inside [{poly.v_min}, {poly.v_max}] V",
        )
    )
    positive = [eq.state.v1 for eq in outer if eq.label == "P+"]
    offset = min((abs(v - spec.v_eq) for v in positive), default=float("inf"))
    checks.append(
        DesignCheck("p-plus-at-v-eq", offset < V_EQ_TOL, offset, f"|P+ - v_eq| < {V_EQ_TOL}")
    )

    report = DesignReport(
        params=params,
        r=1.0 / g,
        r_n=1.0 / g_n,
        alpha=alpha,
        beta=beta,
        checks=checks,
        equilibria=equilibria,
    )

    logger.info(
        f"R = {report.r:.6g} ohm, R_N = {report.r_n:.6g} ohm, "
        f"L = {l:.6g} H, C2 = {c2:.6g} F"
    )
    for check in checks:
        if not check.passed:
            logger.warning(f"Design check {check.name} failed ({check.detail}, value {check.value:.6g})")

    return report
