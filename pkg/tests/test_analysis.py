import numpy as np
import pytest

from memchua.analysis import (
    INCONCLUSIVE,
    LABELS,
    AnalysisConfig,
    SweepSettings,
    classify,
    count_clusters,
    largest_lyapunov,
    local_extrema,
    perturb,
    point_seeds,
    simulate_and_classify,
    sweep,
    sweep_resistances,
)
from memchua.circuit import CircuitParams, find_equilibria
from memchua.design import DesignSpec, design_circuit
from memchua.device import DevicePoly, reference_state, scaling_table, state_at
from memchua.integrate import IntegrationConfig, Trajectory


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Development"


SHORT = IntegrationConfig(t_end=0.05, t_transient=0.01, record_stride=10)
NO_LYAPUNOV = AnalysisConfig(lyapunov=False)


@pytest.fixture(scope="module")
def designed():
    return design_circuit(reference_state(), DesignSpec()).params


def with_gn(params, g_n, device=None):
    return CircuitParams(
        c1=params.c1,
        c2=params.c2,
        l=params.l,
        g=params.g,
        g_n=g_n,
        device=params.device if device is None else device,
    )


def synthetic(times, v1, v2):
    states = np.column_stack([v1, v2, np.zeros_like(v1)])
    return Trajectory(times=times, states=states, events=[], n_steps=len(times))


def test_extrema_of_sine():
    t = np.linspace(0.0, 3 * 2 * np.pi, 1000)
    extrema = local_extrema(t, np.sin(t))
    maxima = [e for e in extrema if e.kind == "max"]
    minima = [e for e in extrema if e.kind == "min"]
    assert len(maxima) == 3
    assert len(minima) == 3
    assert all(abs(e.value - 1.0) < 1e-4 for e in maxima)
    assert all(abs(e.value + 1.0) < 1e-4 for e in minima)
    expected = np.pi / 2 + 2 * np.pi * np.arange(3)
    assert np.allclose([e.time for e in maxima], expected, atol=1e-3)


def test_extrema_of_constant():
    t = np.linspace(0.0, 1.0, 100)
    assert local_extrema(t, np.full(100, 0.3)) == []
    assert local_extrema(t[:2], np.array([0.0, 1.0])) == []


def test_extrema_plateau_counts_once():
    t = np.arange(7.0)
    extrema = local_extrema(t, np.array([0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.0]))
    assert len(extrema) == 1
    assert extrema[0].time == 3.0
    assert extrema[0].value == 2.0


def test_count_clusters():
    assert count_clusters([], 0.1) == 0
    assert count_clusters([1.0, 1.01, 1.02, 2.0, 2.05], 0.1) == 2
    assert count_clusters(np.linspace(0.0, 1.0, 101), 0.105) == 10


def test_synthetic_limit_cycle_is_periodic(designed):
    equilibria = find_equilibria(designed)
    t = np.linspace(0.0, 0.01, 5000)
    phase = 2 * np.pi * 500 * t
    traj = synthetic(t, 0.9 + 0.1 * np.sin(phase), 0.05 * np.cos(phase))
    cls = classify(traj, equilibria, AnalysisConfig())
    assert cls.label == "periodic"
    assert cls.scroll_side == "positive"
    assert cls.n_extrema_clusters == 2


def test_classify_is_deterministic(designed):
    equilibria = find_equilibria(designed)
    t = np.linspace(0.0, 0.01, 5000)
    traj = synthetic(t, 0.9 + 0.1 * np.sin(3e3 * t), 0.05 * np.cos(3e3 * t))
    first = classify(traj, equilibria, AnalysisConfig(), lambda1=0.0, time_unit=1e-3)
    assert classify(traj, equilibria, AnalysisConfig(), lambda1=0.0, time_unit=1e-3) == first


def test_short_record_is_inconclusive(designed):
    t = np.linspace(0.0, 1e-3, 5)
    traj = synthetic(t, np.full(5, 0.5), np.zeros(5))
    cls = classify(traj, find_equilibria(designed), AnalysisConfig())
    assert cls.label == INCONCLUSIVE


def test_stable_variant_settles_to_fixed_point(designed):
    # Without the negative conductor only P0 remains, and it is stable
    passive = with_gn(designed, 0.0)
    (p0,) = find_equilibria(passive)
    assert p0.stable

    cfg = IntegrationConfig(t_end=0.4, t_transient=0.2, record_stride=10)
    traj, cls, _ = simulate_and_classify(passive, (0.9, 0.0, -0.9 * passive.g), cfg, NO_LYAPUNOV)
    assert not traj.stopped
    assert cls.label == "fixed_point"
    assert cls.scroll_side == "none"


def test_lyapunov_of_linear_rlc(designed):
    zero = DevicePoly(0.0, 0.0, 0.0, 0.0, 0.0, -1.2, 2.6)
    rlc = with_gn(designed, 0.0, device=zero)
    (p0,) = find_equilibria(rlc)
    expected = max(z.real for z in p0.eigenvalues)

    cfg = IntegrationConfig(t_end=1.0, t_transient=0.1)
    estimate = largest_lyapunov(rlc, (0.1, 0.0, 0.0), cfg)
    assert estimate.per_second < 0
    assert estimate.per_second == pytest.approx(expected, rel=0.05)


def test_perturb_zero_sigma_is_identity():
    poly = reference_state().poly
    assert perturb(poly, 0.0, 1) is poly


def test_perturb_is_reproducible():
    poly = reference_state().poly
    assert perturb(poly, 0.05, 42) == perturb(poly, 0.05, 42)
    assert perturb(poly, 0.05, 42) != perturb(poly, 0.05, 43)


def test_perturb_median_factor():
    poly = reference_state().poly
    factors = [perturb(poly, 0.05, seed).p3 / poly.p3 for seed in range(1000)]
    assert np.median(factors) == pytest.approx(1.0, abs=0.02)


def test_perturb_rejects_negative_sigma():
    with pytest.raises(ValueError):
        perturb(reference_state().poly, -0.1, 0)


def test_point_seeds_are_stable():
    assert point_seeds(3, 4) == point_seeds(3, 4)
    assert len(set(point_seeds(3, 4))) == 4


def test_sweep_resistances():
    r = sweep_resistances(1000.0, SweepSettings(n_points=5))
    assert r[0] == pytest.approx(150.0)
    assert r[-1] == pytest.approx(1500.0)
    assert np.all(np.diff(r) > 0)
    assert list(sweep_resistances(1000.0, SweepSettings(n_points=1))) == [1000.0]
    with pytest.raises(ValueError):
        sweep_resistances(1000.0, SweepSettings(n_points=0))


def test_single_point_sweep_matches_direct_run(designed):
    table = scaling_table()
    (point,) = sweep(table, DesignSpec(), SweepSettings(n_points=1), SHORT, NO_LYAPUNOV)
    assert point.r_prog == table[-1].r_prog

    traj, cls, _ = simulate_and_classify(designed, (0.1, 0.0, 0.0), SHORT, NO_LYAPUNOV)
    assert point.cls == cls
    assert point.extrema == tuple(e.value for e in local_extrema(traj.times, traj.v1))


def test_sweep_is_deterministic():
    settings = SweepSettings(n_points=3, sigma=0.05, init_sigma=0.01)
    first = sweep(scaling_table(), DesignSpec(), settings, SHORT, NO_LYAPUNOV, seed=11)
    second = sweep(scaling_table(), DesignSpec(), settings, SHORT, NO_LYAPUNOV, seed=11)
    assert first == second
    assert [p.r_prog for p in first] == sorted(p.r_prog for p in first)


def test_sweep_rejects_unknown_mode():
    with pytest.raises(ValueError):
        sweep(scaling_table(), DesignSpec(), SweepSettings(mode="other"), SHORT, NO_LYAPUNOV)


@pytest.mark.slow
def test_designed_circuit_is_double_scroll(designed):
    cfg = IntegrationConfig(record_stride=10)
    traj, cls, _ = simulate_and_classify(designed, (0.1, 0.0, 0.0), cfg, AnalysisConfig())
    assert cls.label == "double_scroll"
    assert cls.scroll_side == "both"
    assert cls.lambda1_scaled > 0.01
    extrema = np.array([e.value for e in local_extrema(traj.times, traj.v1)])
    assert np.any(extrema > 0) and np.any(extrema < 0)


@pytest.mark.slow
def test_redesign_sweep_covers_range():
    settings = SweepSettings(mode="redesign", n_points=32, workers=2)
    points = sweep(scaling_table(), DesignSpec(), settings, SHORT, NO_LYAPUNOV)
    r_ref = scaling_table()[-1].r_prog
    assert len(points) == 32
    assert points[0].r_prog == pytest.approx(0.15 * r_ref)
    assert points[-1].r_prog == pytest.approx(1.5 * r_ref)
    assert all(p.cls.label in LABELS + (INCONCLUSIVE,) for p in points)


def extrema_span(point):
    return max(point.extrema) - min(point.extrema) if point.extrema else 0.0


@pytest.mark.slow
def test_fixed_sweep_goes_from_periodic_to_double_scroll():
    settings = SweepSettings(n_points=32, workers=4)
    cfg = IntegrationConfig(record_stride=10)
    points = sweep(scaling_table(), DesignSpec(), settings, cfg, AnalysisConfig())

    third = len(points) // 3
    low, high = points[:third], points[-third:]
    assert any(p.cls.label == "periodic" for p in low)
    assert any(p.cls.label == "double_scroll" for p in high)
    assert np.median([extrema_span(p) for p in low]) < np.median(
        [extrema_span(p) for p in high]
    )


@pytest.mark.slow
def test_low_resistance_point_is_periodic(designed):
    table = scaling_table()
    state = state_at(table, 0.2 * table[-1].r_prog)
    params = designed.with_device(state.poly)

    cfg = IntegrationConfig(record_stride=10)
    _, cls, _ = simulate_and_classify(params, (0.1, 0.0, 0.0), cfg, AnalysisConfig())
    assert cls.label == "periodic"
    assert abs(cls.lambda1_scaled) < 0.01
