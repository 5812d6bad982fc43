import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscnet.errors import ConfigError
from oscnet.floquet import stability_verdict
from oscnet.graph import paper_network
from oscnet.integrate import IntegratorConfig, Trajectory, integrate
from oscnet.models import CouplingSpec, NetworkField, VdpParams
from oscnet.sync import (ErrorSeries, initial_states, run_remote_sync_experiment, sync_error,
                         sync_time)


def traj_of(*node_states, t=0.0):
    return Trajectory(np.array([t]), np.array([np.concatenate(node_states)], dtype=float))


def test_identical_nodes_zero_error():
    e = sync_error(traj_of([0.3, -1.2], [0.3, -1.2], [0.3, -1.2]))
    assert e.values[0] == 0.0


def test_two_node_error():
    assert sync_error(traj_of([1, 0], [-1, 0])).values[0] == 1.0


def test_sync_error_needs_two_nodes():
    with pytest.raises(ConfigError):
        sync_error(traj_of([1, 0]))


@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=2, max_size=9),
       st.randoms(use_true_random=False))
def test_sync_error_relabel_invariant(nodes, rnd):
    perm = list(range(len(nodes)))
    rnd.shuffle(perm)
    a = sync_error(traj_of(*nodes)).values[0]
    b = sync_error(traj_of(*[nodes[i] for i in perm])).values[0]
    assert a == pytest.approx(b, abs=1e-15)
    assert a >= 0


def test_sync_time_zero_series():
    s = ErrorSeries(np.array([0.5, 1.0, 1.5]), np.zeros(3))
    assert sync_time(s, 1e-2) == 0.5


def test_sync_time_after_last_exceedance():
    s = ErrorSeries(np.arange(6.0), np.array([1.0, 1e-3, 1e-3, 0.5, 1e-3, 1e-4]))
    assert sync_time(s, 1e-2) == 4.0


def test_sync_time_absent():
    s = ErrorSeries(np.arange(4.0), np.array([1.0, 1e-3, 1e-3, 0.5]))
    assert sync_time(s, 1e-2) is None


def test_sync_time_respects_t_end():
    s = ErrorSeries(np.arange(4.0), np.array([1.0, 1e-3, 1e-3, 0.5]))
    assert sync_time(s, 1e-2, t_end=2.0) == 1.0


def test_sync_time_threshold_check():
    with pytest.raises(ConfigError):
        sync_time(ErrorSeries(np.zeros(1), np.zeros(1)), 0.0)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 3.0])
def test_sync_manifold_preserved(kappa):
    g = paper_network()
    f = NetworkField(g, CouplingSpec.constant(kappa), VdpParams(1.0))
    traj = integrate(f, np.tile([1.3, -0.4], 8), IntegratorConfig(dt=1e-3, t_end=10.0, record_stride=10))
    assert np.max(sync_error(traj).values) < 1e-9


def test_initial_states_reproducible():
    a, b = initial_states(8, 3), initial_states(8, 3)
    assert np.array_equal(a, b)
    assert a.shape == (16,) and np.all(np.abs(a) <= 2)
    assert not np.array_equal(a, initial_states(8, 4))


def test_experiment_rejects_bad_times():
    with pytest.raises(ConfigError):
        run_remote_sync_experiment(0.5, 60.0, 60.0, 1)


@pytest.fixture(scope="module")
def run_seed1():
    return run_remote_sync_experiment(0.5, 15.0, 60.0, seed=1)


def test_experiment_seed1_synchronizes(run_seed1):
    traj, rep = run_seed1
    assert rep.sync_time is not None and rep.sync_time >= 15.0
    assert set(rep.pair_errors) == {("x1", "y1"), ("x1", "x3"), ("y1", "y3")}
    assert rep.pair_errors[("x1", "x3")] < 1e-3
    assert rep.pair_errors[("y1", "y3")] < 1e-3
    e = rep.error_series
    before = e.values[(e.times > 10) & (e.times <= 15)].mean()
    after = e.values[e.times > 55].mean()
    assert after < before / 100


def test_experiment_seed2_synchronizes():
    _, rep = run_remote_sync_experiment(0.5, 15.0, 60.0, seed=2)
    assert rep.sync_time is not None


def test_experiment_without_coupling_never_syncs():
    _, rep = run_remote_sync_experiment(0.0, 15.0, 60.0, seed=1)
    assert rep.sync_time is None
    assert rep.error_series.values[-1] > 0.1


def test_experiment_strong_gain_meets_tight_targets():
    _, rep = run_remote_sync_experiment(1.5, 15.0, 60.0, seed=1)
    assert rep.sync_time is not None and rep.sync_time <= 40.0
    assert all(err < 1e-3 for err in rep.pair_errors.values())


@pytest.mark.slow
def test_positive_verdict_implies_sync_for_all_seeds(vdp, orbit):
    kappa = 1.0
    assert stability_verdict(paper_network(), vdp, kappa, orbit).stable
    for seed in range(1, 6):
        _, rep = run_remote_sync_experiment(kappa, 15.0, 60.0, seed=seed)
        assert rep.sync_time is not None, seed
