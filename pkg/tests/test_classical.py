import pytest
import numpy as np

from kdiv.dynamics import (
    KolmogorovGenerator, StochasticTrajectory, classical_integrate, kolmogorov_check, classical_propagator,
    is_stochastic, check_stochastic, kolmogorov_from_config, two_state, birth_death, trajectory_h5, Piecewise,
)
from kdiv.discrimination import classical_monotonicity_trace, deterministic_channels
from kdiv.utilities.errors import ValidationError

from .conftest import uniform_grid

swap = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_two_state_closed_form():
    a, b = 1.0, 2.0
    grid = uniform_grid(2.0, 0.1)
    traj = classical_integrate(two_state(a, b), grid)
    stationary = np.outer([b / (a + b), a / (a + b)], np.ones(2))
    for t, matrix in zip(grid, traj.matrices):
        expected = stationary + np.exp(-(a + b) * t) * (np.eye(2) - stationary)
        assert np.allclose(matrix, expected, atol=1e-9)
    assert np.all(traj.stochastic)
    assert np.max(traj.drift) < 1e-10


def test_kolmogorov_check():
    window = two_state(1.0, Piecewise([0.3, 0.6], [1.0, -1.5, 1.0]))
    assert kolmogorov_check(window, 0.0)
    assert not kolmogorov_check(window, 0.4)
    assert kolmogorov_check(window, 0.7)
    assert kolmogorov_check(np.array([[-1.0, 2.0], [1.0, -2.0]]), 0.0)
    assert not kolmogorov_check(np.array([[-1.0, 2.0], [1.0, -1.0]]), 0.0)


def test_classical_propagators_compose(rng):
    traj = classical_integrate(birth_death(4, 1.0, 0.5), uniform_grid(1.0, 0.05))
    for _ in range(10):
        i, j = sorted(rng.integers(0, len(traj), size=2))
        s, t = traj.grid[i], traj.grid[j]
        step = classical_propagator(traj, s, t)
        assert is_stochastic(step)
        assert np.allclose(step @ traj[i], traj[j], atol=1e-10)
        # Time-independent rates make the propagator depend only on t - s
        assert np.allclose(step, traj[j - i], atol=1e-9)
    with pytest.raises(ValidationError):
        classical_propagator(traj, 0.5, 0.25)
    with pytest.raises(ValidationError):
        traj.index(0.123)


def test_birth_death_is_stochastic():
    traj = classical_integrate(birth_death(5, 2.0, 0.5), uniform_grid(1.0, 0.1))
    assert traj.dim == 5
    assert np.all(traj.stochastic)
    assert np.allclose(traj[0], np.eye(5))
    assert kolmogorov_check(birth_death(5), 1.0)


def test_deterministic_channels():
    channels = deterministic_channels(3)
    assert len(channels) == 27
    assert all(is_stochastic(s) and set(np.unique(s)) <= {0.0, 1.0} for s in channels)
    assert len({s.tobytes() for s in channels}) == 27


def test_semigroup_never_increases_distinguishability():
    traj = classical_integrate(birth_death(3, 1.0, 2.0), uniform_grid(1.0, 0.05))
    channels = deterministic_channels(3)
    for s1 in channels:
        for s2 in channels:
            trace = classical_monotonicity_trace(traj, s1, s2, 0.5)
            assert not trace.has_violation
            assert all(isinstance(w, int) for w in trace.witnesses)


def test_negative_rate_window_increases_distinguishability():
    grid = uniform_grid(1.0, 0.05)
    window = two_state(1.0, Piecewise([0.3, 0.6], [1.0, -1.5, 1.0]))
    traj = classical_integrate(window, grid)
    trace = classical_monotonicity_trace(traj, np.eye(2), swap, 0.5)
    integral = np.where(grid < 0.3, 2 * grid, np.where(grid < 0.6, 0.6 - 0.5 * (grid - 0.3), 0.45 + 2 * (grid - 0.6)))
    assert np.allclose(trace.values, np.exp(-integral), rtol=2e-3)
    assert trace.has_violation
    assert len(trace.violations) >= 5
    assert all(0.3 - 0.05 <= t <= 0.6 + 0.05 for t, _ in trace.violations)
    assert trace.largest_increase > 1e-3


def leaky_birth_death(window=0.3, rate=-1.5):
    """Three-state chain plus a `0 → 2` rate that is negative before `window`"""
    leak = np.zeros((3, 3))
    leak[2, 0], leak[0, 0] = 1.0, -1.0
    return KolmogorovGenerator(3, birth_death(3, 1.0, 1.0).terms + [(leak, Piecewise([window], [rate, 0.0]))])


def test_negative_rate_in_three_states_shows_up_in_the_vertex_search():
    K = leaky_birth_death()
    assert not kolmogorov_check(K, 0.1)
    assert kolmogorov_check(K, 0.5)
    traj = classical_integrate(K, uniform_grid(1.0, 0.05))
    assert not np.all(traj.stochastic)
    channels = deterministic_channels(3)
    increasing = []
    for n1, s1 in enumerate(channels):
        for n2, s2 in enumerate(channels):
            trace = classical_monotonicity_trace(traj, s1, s2, 0.5)
            if trace.has_violation:
                increasing.append((n1, n2))
                assert all(t < 0.3 for t, _ in trace.violations)
    assert increasing
    # Sending state 0 to 2 separates the pair exactly where the negative rate acts
    trace = classical_monotonicity_trace(traj, np.eye(3), np.eye(3)[:, [2, 1, 2]], 0.5)
    assert np.isclose(trace.values[0], 1.0)
    assert trace.has_violation
    assert trace.largest_increase > 1e-3


def test_check_stochastic():
    assert np.array_equal(check_stochastic(np.eye(2, dtype=complex)), np.eye(2))
    with pytest.raises(ValidationError):
        check_stochastic(np.array([[1.2, 0.0], [-0.2, 1.0]]))
    with pytest.raises(ValidationError):
        check_stochastic(np.array([0.5, 0.5]))
    with pytest.raises(ValidationError):
        check_stochastic(np.array([[1.0, 0.5j], [0.0, 1.0]]))
    with pytest.raises(ValidationError):
        check_stochastic(np.full((2, 2), 0.4))
    with pytest.raises(ValidationError):
        StochasticTrajectory([0.0, 0.1], np.eye(2))


def test_kolmogorov_from_config():
    K = kolmogorov_from_config({"kind": "classical", "preset": "two-state", "params": {"a": 1.0, "b": 0.5}})
    assert np.allclose(K(0.0), [[-1.0, 0.5], [1.0, -0.5]])
    assert kolmogorov_from_config(K.to_config()).to_config() == K.to_config()
    K = kolmogorov_from_config({"kind": "classical", "preset": "BirthDeath", "params": {"n": 4}})
    assert K.dim == 4
    block = {
        "kind": "classical",
        "terms": [{"matrix": [[-1, 1], [1, -1]], "coefficient": {"kind": "tanh", "params": {"amplitude": 2.0}}}],
    }
    K = kolmogorov_from_config(block)
    assert np.allclose(K(1.0), 2 * np.tanh(1.0) * np.array([[-1, 1], [1, -1]]))
    assert kolmogorov_from_config(K.to_config()).terms[0][1](1.0) == K.terms[0][1](1.0)


@pytest.mark.parametrize(
    "block",
    (
        [1, 2],
        {"kind": "classical", "preset": "three_state"},
        {"kind": "classical", "preset": "two_state", "params": {"c": 1.0}},
        {"kind": "classical", "terms": []},
        {"kind": "classical", "terms": [{"coefficient": 1.0}]},
        {"kind": "classical", "dim": 3, "terms": [{"matrix": [[-1, 1], [1, -1]]}]},
    ),
)
def test_kolmogorov_from_config_errors(block):
    with pytest.raises(ValidationError):
        kolmogorov_from_config(block)


def test_generator_rejects_complex_rates():
    with pytest.raises(ValidationError):
        KolmogorovGenerator(2, [(np.array([[-1, 1j], [1, -1]]), 1.0)])


def test_classical_trajectory_h5_round_trip(tmp_path):
    traj = classical_integrate(two_state(1.0, 0.25), uniform_grid(0.5, 0.05))
    path = tmp_path / "trajectory.h5"
    trajectory_h5.save(traj, path)
    loaded = trajectory_h5.load(path)
    assert isinstance(loaded, StochasticTrajectory)
    assert np.array_equal(loaded.grid, traj.grid)
    assert np.array_equal(loaded.matrices, traj.matrices)
    assert loaded.source.to_config() == traj.source.to_config()
