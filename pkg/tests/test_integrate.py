import math

import numpy as np
import pytest

from memchua.circuit import CircuitParams, StateVector
from memchua.design import DesignSpec, design_circuit
from memchua.device import DevicePoly, reference_state
from memchua.errors import DivergenceError, IntegrationConfigError
from memchua.integrate import (
    IntegrationConfig,
    integrate,
    integrate_adaptive,
    natural_scales,
    run,
    step_rk4,
)


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Development"


C2 = 100e-9
L = 0.4
OMEGA = 1.0 / math.sqrt(L * C2)
PERIOD = 2 * math.pi / OMEGA


@pytest.fixture(scope="module")
def designed():
    return design_circuit(reference_state(), DesignSpec()).params


@pytest.fixture(scope="module")
def lc():
    """Lossless LC tank: zero device, no coupling resistor."""
    zero = DevicePoly(0.0, 0.0, 0.0, 0.0, 0.0, -1.2, 2.6)
    return CircuitParams(c1=10e-9, c2=C2, l=L, g=0.0, g_n=0.0, device=zero)


def lc_error(traj, t):
    """Distance to the analytic solution started at (0, 1, 0)."""
    v2, il = traj.states[-1, 1], traj.states[-1, 2]
    scale = math.sqrt(L / C2)
    return math.hypot(v2 - math.cos(OMEGA * t), il * scale + math.sin(OMEGA * t))


def lc_run(lc, n_per_period, periods=1):
    cfg = IntegrationConfig(
        dt=PERIOD / n_per_period, t_end=periods * PERIOD, t_transient=0.0
    )
    return integrate(lc, (0.0, 1.0, 0.0), cfg)


def test_config_validation():
    with pytest.raises(IntegrationConfigError):
        IntegrationConfig(dt=0.0).validate()
    with pytest.raises(IntegrationConfigError):
        IntegrationConfig(t_transient=1.0, t_end=0.5).validate()
    with pytest.raises(IntegrationConfigError):
        IntegrationConfig(soa_policy="ignore").validate()
    with pytest.raises(IntegrationConfigError):
        IntegrationConfig(rel_tol=0.0).validate(adaptive=True)


def test_step_keeps_origin(designed):
    origin = StateVector(0.0, 0.0, 0.0)
    for dt in (1e-9, 1e-6, 1e-3):
        assert step_rk4(designed, origin, dt) == origin


def test_step_rejects_bad_dt(designed):
    with pytest.raises(IntegrationConfigError):
        step_rk4(designed, StateVector(0.1, 0.0, 0.0), 0.0)


def test_lc_one_period(lc):
    traj = lc_run(lc, 1000)
    assert traj.states[-1, 1] == pytest.approx(1.0, rel=1e-8)
    assert traj.times[-1] == pytest.approx(PERIOD, rel=1e-12)
    assert not traj.events


def test_rk4_is_fourth_order(lc):
    coarse = lc_error(lc_run(lc, 100), PERIOD)
    fine = lc_error(lc_run(lc, 200), PERIOD)
    assert 12.0 <= coarse / fine <= 20.0


def test_lc_energy_drift(lc):
    traj = lc_run(lc, 1000, periods=100)
    v2, il = traj.states[:, 1], traj.states[:, 2]
    energy = 0.5 * C2 * v2**2 + 0.5 * L * il**2
    assert np.max(np.abs(energy / energy[0] - 1.0)) < 1e-8


def test_transient_and_stride(lc):
    cfg = IntegrationConfig(
        dt=PERIOD / 100, t_end=PERIOD, t_transient=PERIOD / 2, record_stride=5
    )
    traj = integrate(lc, (0.0, 1.0, 0.0), cfg)
    assert traj.times[0] >= PERIOD / 2 - 1e-15
    assert np.allclose(np.diff(traj.times), 5 * PERIOD / 100)


def test_equilibrium_start_stays_put(designed):
    cfg = IntegrationConfig(t_end=0.01, t_transient=0.0)
    traj = integrate(designed, (0.0, 0.0, 0.0), cfg)
    assert np.max(np.abs(traj.states[:, :2])) < 1e-9
    assert not traj.events


def test_runaway_is_caught_by_soa_monitor(designed):
    runaway = CircuitParams(
        c1=designed.c1,
        c2=designed.c2,
        l=designed.l,
        g=designed.g,
        g_n=10 * designed.g_n,
        device=designed.device,
    )
    cfg = IntegrationConfig(t_end=0.05, t_transient=0.0, soa_policy="abort")
    traj = integrate(runaway, (0.1, 0.0, 0.0), cfg)
    assert traj.stopped
    assert not traj.diverged
    assert len(traj.soa_events) == 1
    assert traj.soa_events[0].kind in ("soa_low", "soa_high")
    assert traj.times[-1] < cfg.t_end

    warned = integrate(runaway, (0.1, 0.0, 0.0), IntegrationConfig(t_end=0.05, t_transient=0.0))
    assert warned.soa_events


def test_adaptive_lc_converges(lc):
    errors = []
    for rel_tol in (1e-6, 1e-8, 1e-10):
        cfg = IntegrationConfig(
            t_end=10 * PERIOD, t_transient=0.0, rel_tol=rel_tol, abs_tol=1e-14
        )
        traj = integrate_adaptive(lc, (0.0, 1.0, 0.0), cfg)
        assert traj.times[-1] == pytest.approx(10 * PERIOD, rel=1e-12)
        errors.append(lc_error(traj, traj.times[-1]))
    assert errors[0] > errors[1] > errors[2]


def test_adaptive_equilibrium_takes_large_steps(designed):
    cfg = IntegrationConfig(t_end=0.5, t_transient=0.0)
    traj = integrate_adaptive(designed, (0.0, 0.0, 0.0), cfg)
    assert traj.n_steps <= 200
    assert not traj.stopped


def test_adaptive_agrees_with_fixed_step(designed):
    t_end = 5e-3
    fixed = run(
        designed,
        (0.1, 0.0, 0.0),
        IntegrationConfig(dt=1e-7, t_end=t_end, t_transient=0.0),
        method="rk4",
    )
    adaptive = run(
        designed,
        (0.1, 0.0, 0.0),
        IntegrationConfig(t_end=t_end, t_transient=0.0, rel_tol=1e-10, abs_tol=1e-13),
        method="adaptive",
    )
    assert abs(fixed.states[-1, 0] - adaptive.states[-1, 0]) < 1e-3


def test_unknown_method(designed):
    with pytest.raises(IntegrationConfigError):
        run(designed, (0.1, 0.0, 0.0), IntegrationConfig(), method="euler")


@pytest.mark.slow
def test_designed_circuit_stays_in_window(designed):
    traj = integrate(designed, (0.1, 0.0, 0.0), IntegrationConfig(record_stride=10))
    assert not traj.stopped
    assert not traj.soa_events
    assert traj.v1.min() >= -1.2
    assert traj.v1.max() <= 1.2


def test_divergence_bounds(designed, lc):
    v_cap, i_cap = natural_scales(designed)
    assert v_cap == pytest.approx(1e3 * 2.6)
    assert i_cap == pytest.approx(1e3 * designed.g * 2.6)
    _, lc_cap = natural_scales(lc)
    assert lc_cap == pytest.approx(1e3 * 2.6 * math.sqrt(C2 / L))


def test_step_reports_non_finite_state(designed):
    with pytest.raises(DivergenceError) as err:
        step_rk4(designed, StateVector(1e80, 0.0, 0.0), 1e-6)
    assert err.value.time is None
    assert "t =" not in str(err.value)
