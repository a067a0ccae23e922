import pytest
import numpy as np

from kdiv.channels import maps
from kdiv.dynamics import GKSLGenerator, Constant, integrate, semigroup
from kdiv.discrimination import (
    MonotonicityTrace, monotonicity_trace, witness_search, inverse_dynamics_pair, classical_monotonicity_trace,
)
from kdiv.discrimination import monotonicity
from kdiv.utilities.errors import ValidationError

from .conftest import uniform_grid


def test_trace_attributes():
    times = [0.0, 0.1, 0.2, 0.3, 0.4]
    values = [0.5, 0.4, 0.4 + 1e-6, 0.4 + 1e-6 + 1e-9, 0.3]
    trace = MonotonicityTrace(times, values, [0, 1, 0, 1, 1], 0.5)
    assert np.allclose(trace.derivatives[:4], np.diff(values) / 0.1)
    assert np.array_equal(trace.flags[:4], [False, True, False, False])
    assert trace.violations == [(0.1, pytest.approx(1e-6))]
    assert [t for t, _ in trace.inconclusive] == [0.2]
    assert trace.has_violation
    assert trace.largest_increase == pytest.approx(1e-6)
    assert np.allclose(trace.min_entropy, -np.log2((1 + np.array(values)) / 2))

    frame = trace.to_frame()
    assert list(frame.columns) == ["time", "D", "dD_dt", "H_min", "violation_flag"]
    assert frame["violation_flag"].tolist()[:4] == [0, 1, 0, 0]
    block = trace.to_config()
    assert block["trace"][1]["violation_flag"] and block["trace"][1]["witness"] == 1
    assert block["violations"] == [{"time": 0.1, "increase": pytest.approx(1e-6)}]


def test_empty_and_flat_traces():
    trace = MonotonicityTrace([], [], [], 0.5)
    assert trace.largest_increase == 0.0
    assert not trace.has_violation
    assert trace.to_frame().empty
    flat = MonotonicityTrace([0.0, 1.0], [0.2, 0.2], [0, 0], 0.5)
    assert not flat.has_violation and not flat.inconclusive


@pytest.mark.parametrize("k", (1, 2))
def test_semigroup_traces_never_increase(semigroup_trajectory, k):
    pairs = [
        (maps.identity(2), maps.completely_depolarizing(2)),
        (maps.amplitude_damping(0.3), maps.random_channel(2, seed=5)),
        (maps.random_pauli(seed=6), maps.random_pauli(seed=7)),
    ]
    for n, (phi1, phi2) in enumerate(pairs):
        trace = monotonicity_trace(semigroup_trajectory, phi1, phi2, 0.5, k, restarts=4, seed=n)
        assert not trace.has_violation
        assert trace.times.size == len(semigroup_trajectory)
        assert np.all(np.diff(trace.min_entropy) >= -1e-7)
        assert all(w.rank_bound <= k for w in trace.witnesses)


@pytest.mark.slow
@pytest.mark.parametrize("k", (1, 2))
def test_semigroup_traces_never_increase_for_random_pairs(semigroup_trajectory, k):
    for n in range(25):
        rng = np.random.default_rng([81, n])
        phi1 = maps.random_channel(2, seed=[82, n])
        phi2 = maps.random_channel(2, seed=[83, n])
        trace = monotonicity_trace(semigroup_trajectory, phi1, phi2, rng.uniform(), k, restarts=4, seed=n)
        assert not trace.has_violation


def test_identity_versus_depolarization_starts_from_the_hierarchy_values(semigroup_trajectory):
    trace = monotonicity_trace(
        semigroup_trajectory, maps.identity(2), maps.completely_depolarizing(2), 0.5, 2, restarts=4, seed=1, indices=[0, 4]
    )
    assert np.allclose(trace.times, semigroup_trajectory.grid[[0, 4]])
    assert abs(trace.values[0] - 0.75) <= 1e-6
    assert trace.values[1] < trace.values[0]


def test_inverse_dynamics_pair(short_eternal_trajectory):
    phi1, phi2, p = inverse_dynamics_pair(short_eternal_trajectory, 4)
    assert phi1.is_cptp and phi2.is_cptp
    assert 0 < p < 0.5
    difference = (1 - p) * phi1.as_map() - p * phi2.as_map()
    evolved = maps.compose(short_eternal_trajectory[4], difference)
    assert np.allclose(evolved.superop, (1 - 2 * p) * np.eye(4), atol=1e-10)


def test_inverse_pair_witnesses_non_cp_propagator(short_eternal_trajectory):
    traj = short_eternal_trajectory
    phi1, phi2, p = inverse_dynamics_pair(traj, 4)
    trace = monotonicity_trace(traj, phi1, phi2, p, 2, restarts=4, seed=2)
    assert abs(trace.values[4] - (1 - 2 * p)) <= 1e-9
    assert trace.flags[4]
    assert trace.values[5] - trace.values[4] > 1e-3
    assert trace.has_violation
    assert trace.min_entropy[5] < trace.min_entropy[4]
    witness = trace.witnesses[5]
    assert witness.numerical_rank() == 2


def test_inverse_pair_is_not_a_witness_for_p_divisible_dynamics(short_eternal_trajectory):
    traj = short_eternal_trajectory
    phi1, phi2, p = inverse_dynamics_pair(traj, 4)
    trace = monotonicity_trace(traj, phi1, phi2, p, 1, restarts=4, seed=2)
    assert not trace.has_violation
    assert np.allclose(trace.values[4:], 1 - 2 * p, atol=1e-9)


def test_cold_start_and_threshold(short_eternal_trajectory):
    traj = short_eternal_trajectory
    phi1, phi2, p = inverse_dynamics_pair(traj, 4)
    cold = monotonicity_trace(traj, phi1, phi2, p, 2, restarts=4, seed=2, cold_start=True, indices=[3, 4, 5])
    assert cold.flags[1]
    lenient = monotonicity_trace(traj, phi1, phi2, p, 2, restarts=4, seed=2, indices=[3, 4, 5], threshold=1.0)
    assert not lenient.has_violation
    assert [t for t, _ in lenient.inconclusive] == [traj.grid[4]]


def test_monotonicity_trace_errors(semigroup_trajectory):
    phi = maps.identity(2)
    with pytest.raises(ValidationError):
        monotonicity_trace(semigroup_trajectory, phi, phi, 0.5, 3)
    with pytest.raises(ValidationError):
        monotonicity_trace(semigroup_trajectory, phi, phi, 0.5, 1, indices=[2, 1])
    with pytest.raises(ValidationError):
        monotonicity_trace(semigroup_trajectory, phi, phi, 2.0, 1)


def test_classical_trace_witnesses_are_vertices():
    from kdiv.dynamics import classical_integrate, two_state
    traj = classical_integrate(two_state(1.0, 0.5), uniform_grid(0.5, 0.1))
    trace = classical_monotonicity_trace(traj, np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]]), 0.5)
    assert trace.k is None
    assert all(isinstance(w, int) for w in trace.witnesses)
    assert all(isinstance(entry["witness"], int) for entry in trace.to_config()["trace"])


def test_witness_search_errors(semigroup_trajectory):
    with pytest.raises(ValidationError):
        witness_search(semigroup_trajectory, 2, budget=0)
    with pytest.raises(ValidationError):
        witness_search(integrate(semigroup(), [0.0]), 2, budget=4)
    with pytest.raises(ValidationError):
        witness_search(semigroup_trajectory, 2, families=[])
    with pytest.raises(ValidationError):
        witness_search(semigroup_trajectory, 2, families=["inverse", "clifford"])
    qutrit = integrate(
        GKSLGenerator(3, dissipators=[(np.diag([1.0, 0.0, -1.0]), Constant(0.5))]), uniform_grid(0.1, 0.05)
    )
    with pytest.raises(ValidationError):
        witness_search(qutrit, 2, families=["pauli"], budget=1, seed=0)


def test_witness_search_finds_the_inverse_pair(short_eternal_trajectory):
    result = witness_search(short_eternal_trajectory, 2, families=["inverse"], budget=8, seed=3, restarts=2)
    assert result.found
    assert result.increase > 1e-4
    assert result.family == "inverse"
    assert result.candidates == 8
    assert result.time in short_eternal_trajectory.grid
    assert result.trace.has_violation
    block = result.to_config()
    assert block["found"] and block["family"] == "inverse"
    assert maps.map_from_config(block["phi1"]).is_cptp


def test_witness_search_is_deterministic(short_eternal_trajectory):
    first = witness_search(short_eternal_trajectory, 2, families=["inverse", "pauli"], budget=4, seed=4, restarts=1)
    second = witness_search(short_eternal_trajectory, 2, families=["inverse", "pauli"], budget=4, seed=4, restarts=1, threads=2)
    assert first.increase == second.increase
    assert first.time == second.time


def test_witness_search_reports_nothing_for_semigroups(semigroup_trajectory):
    result = witness_search(semigroup_trajectory, 2, families=["kraus", "unitary"], budget=4, seed=5, restarts=2)
    assert not result.found
    assert result.candidates == 4
    assert "phi1" not in result.to_config()


@pytest.mark.slow
def test_witness_search_on_the_eternal_model(eternal_trajectory):
    result = witness_search(eternal_trajectory, 2, seed=6)
    assert result.found
    assert result.increase > 1e-4


@pytest.mark.slow
def test_witness_search_finds_nothing_for_positive_propagators(eternal_trajectory):
    assert not witness_search(eternal_trajectory, 1, seed=6).found


def test_search_families():
    assert monotonicity.witness_families == ("inverse", "kraus", "pauli", "unitary")
