import math

import numpy as np
import pytest

from oscnet.errors import ConfigError, NumericalFailure
from oscnet.graph import paper_network
from oscnet.integrate import (IntegratorConfig, find_limit_cycle, find_periodic_orbit,
                              hermite_interpolate, integrate, rk4_step)
from oscnet.models import CouplingSpec, NetworkField, VdpParams, kappa_at
from oscnet.sync import initial_states


def harmonic(t, x):
    return np.array([x[1], -x[0]])


def rk4_global_error(dt):
    traj = integrate(lambda t, x: x, [1.0], IntegratorConfig(dt=dt, t_end=1.0))
    return abs(traj.states[-1, 0] - math.e)


def test_rk4_constant_field():
    assert rk4_step(lambda t, x: np.zeros(1), np.array([1.0]), 0.0, 0.1)[0] == 1.0


def test_rk4_exponential_one_step():
    assert abs(rk4_step(lambda t, x: x, np.array([1.0]), 0.0, 0.1)[0] - math.exp(0.1)) < 1e-7


def test_rk4_rejects_bad_step():
    with pytest.raises(ConfigError):
        rk4_step(harmonic, np.array([1.0, 0.0]), 0.0, 0.0)


def test_rk4_harmonic_energy_drift():
    traj = integrate(harmonic, [1.0, 0.0], IntegratorConfig(dt=1e-3, t_end=10.0, record_stride=100))
    energy = (traj.states ** 2).sum(axis=1)
    assert np.max(np.abs(energy - 1.0)) / 10.0 < 1e-8


def test_rk4_global_order():
    dts = np.array([1e-2, 5e-3, 2.5e-3])
    errs = np.array([rk4_global_error(dt) for dt in dts])
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.2)


def test_zero_field_constant_trajectory():
    traj = integrate(lambda t, x: np.zeros_like(x), [0.3, -1.0],
                     IntegratorConfig(dt=0.1, t_end=2.0))
    assert np.all(traj.states == [0.3, -1.0])


def test_record_stride_times():
    cfg = IntegratorConfig(dt=1e-3, t_end=1.0, record_stride=50)
    traj = integrate(harmonic, [1.0, 0.0], cfg)
    assert len(traj) == 21
    np.testing.assert_allclose(traj.times, np.arange(21) * 0.05, rtol=0, atol=1e-15)
    assert np.all(np.diff(traj.times) > 0)


@pytest.mark.parametrize("kwargs", [dict(dt=0.0), dict(dt=-1.0), dict(t_end=0.0),
                                    dict(record_stride=0), dict(record_stride=1.5)])
def test_integrator_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        IntegratorConfig(**kwargs)


def test_blow_up_reports_time():
    with pytest.raises(NumericalFailure, match=r"t=0\.99|t=1\.0"):
        integrate(lambda t, x: x * x, [1.0], IntegratorConfig(dt=1e-2, t_end=2.0))


def test_determinism_bitwise():
    g = paper_network()
    f = NetworkField(g, CouplingSpec.step(1.0, 0.5), VdpParams(1.0))
    cfg = IntegratorConfig(dt=1e-3, t_end=3.0, record_stride=7)
    x0 = initial_states(8, 4)
    a = integrate(f, x0, cfg, breakpoints=(1.0,))
    b = integrate(f, x0, cfg, breakpoints=(1.0,))
    assert np.array_equal(a.states, b.states) and np.array_equal(a.times, b.times)


@pytest.mark.parametrize("t_switch", [15.0, 0.01234, 2.0005])
def test_piecewise_constant_field_integrates_exactly(t_switch):
    # x' = kappa(t) is integrated exactly only if no stage straddles the switch
    c = CouplingSpec.step(t_switch, 0.5)
    traj = integrate(lambda t, x: np.array([kappa_at(c, t)]), [0.0],
                     IntegratorConfig(dt=1e-3, t_end=t_switch + 5.0, record_stride=1000),
                     breakpoints=c.switch_times)
    assert traj.states[-1, 0] == pytest.approx(0.5 * (traj.times[-1] - t_switch), abs=1e-9)


def test_vdp_settles_on_limit_cycle_amplitude():
    p = VdpParams(1.0)
    f = lambda t, x: np.array([x[1], p.mu * (1 - x[0] ** 2) * x[1] - x[0]])
    traj = integrate(f, [2.0, 0.0], IntegratorConfig(dt=1e-3, t_end=100.0, record_stride=1))
    last = traj.states[traj.times > 100.0 - 7.0, 0]
    assert np.max(np.abs(last)) == pytest.approx(2.0, abs=0.01)
    # Poincare oracle: successive crossings of x1 = 0 upward agree in x2
    up = np.nonzero((traj.states[:-1, 0] < 0) & (traj.states[1:, 0] >= 0))[0]
    x2_at = traj.states[up[-3:], 1]
    assert np.ptp(x2_at) < 1e-2


def test_uncoupled_network_stays_distinct():
    g = paper_network()
    f = NetworkField(g, CouplingSpec.constant(0.0), VdpParams(1.0))
    traj = integrate(f, initial_states(8, 1), IntegratorConfig(dt=1e-3, t_end=15.0, record_stride=100))
    nodes = traj.states[-1].reshape(8, 2)
    gaps = [np.max(np.abs(nodes[i] - nodes[j])) for i in range(8) for j in range(i + 1, 8)]
    assert min(gaps) > 1e-2


def test_hermite_reproduces_cubic():
    f = lambda t: 1 - 2 * t + 0.5 * t ** 2 + 3 * t ** 3
    df = lambda t: -2 + t + 9 * t ** 2
    h = 0.4
    for s in np.linspace(0, 1, 7):
        assert hermite_interpolate(f(0), f(h), df(0), df(h), h, s) == pytest.approx(f(s * h), abs=1e-14)


def test_harmonic_period_via_section():
    lc = find_periodic_orbit(harmonic, [1.0, 0.0], burn_in=1.0, m=16, dt=1e-3)
    assert lc.period_T == pytest.approx(2 * math.pi, abs=1e-6)
    assert abs(lc.anchor[0]) < 1e-8 and lc.anchor[1] > 0


def test_vdp_period(orbit):
    assert orbit.period_T == pytest.approx(6.663, abs=0.005)
    assert orbit.m == 64
    np.testing.assert_array_equal(orbit.samples[0], orbit.anchor)


def test_vdp_period_stable_across_crossings(orbit):
    a, b = orbit.crossing_periods[-2:]
    assert abs(a - b) / b < 1e-6


def test_vdp_period_two_resolutions(vdp, orbit):
    half = find_limit_cycle(vdp, dt=5e-4)
    assert abs(half.period_T - orbit.period_T) < 5e-4


def test_vdp_closure_fine(orbit_fine):
    assert orbit_fine.closure_error < 1e-6


def test_no_crossing_is_numerical_failure():
    # origin is a fixed point of Van der Pol; no section crossing ever occurs
    with pytest.raises(NumericalFailure, match="no section crossing"):
        find_periodic_orbit(lambda t, x: np.array([x[1], (1 - x[0] ** 2) * x[1] - x[0]]),
                            [0.0, 0.0], burn_in=1.0, dt=1e-2, max_time=20.0)


def test_closure_tolerance_violation():
    with pytest.raises(NumericalFailure, match="closure"):
        find_limit_cycle(VdpParams(1.0), tol=1e-16, dt=1e-2, burn_in=30.0)
