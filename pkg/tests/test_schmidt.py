import pytest
import numpy as np
from hypothesis import given, settings
from hypothesis.strategies import integers

from kdiv import linops
from kdiv.channels import schmidt, maps
from kdiv.channels.schmidt import SchmidtVector, extremize_schmidt_k
from kdiv.utilities.errors import ValidationError

seeds = integers(min_value=0, max_value=2**32 - 1)
swap = np.eye(4)[[0, 2, 1, 3]]


@given(integers(min_value=1, max_value=3), integers(min_value=1, max_value=4), seeds)
@settings(max_examples=40, deadline=None)
def test_schmidt_decompose(dim_a, dim_b, seed):
    psi = linops.random_pure_state(dim_a * dim_b, seed=seed)
    vector, coefficients = schmidt.schmidt_decompose(psi, dim_a, dim_b)
    assert np.isclose(np.sum(coefficients**2), 1.0)
    assert np.all(np.diff(coefficients) <= 1e-15)
    assert np.allclose(vector.state, psi, atol=1e-12)
    assert np.allclose(vector.coefficients(), coefficients, atol=1e-12)
    assert np.allclose(SchmidtVector.from_state(psi, dim_a, dim_b).state, psi, atol=1e-12)


def test_schmidt_rank():
    product = np.kron(linops.random_pure_state(2, seed=1), linops.random_pure_state(3, seed=2))
    assert schmidt.schmidt_rank(product, 2, 3) == 1
    assert schmidt.schmidt_rank(linops.maximally_entangled(2), 2, 2) == 2
    assert schmidt.schmidt_rank(linops.maximally_entangled(2, 3), 2, 3) == 2
    with pytest.raises(ValidationError):
        schmidt.schmidt_decompose(np.ones(4), 2, 2)
    with pytest.raises(ValidationError):
        schmidt.schmidt_decompose(linops.maximally_entangled(2), 2, 3)


def test_truncation_and_padding():
    psi = linops.random_pure_state(9, seed=3)
    truncated = SchmidtVector.from_state(psi, 3, 3, k=1)
    assert truncated.rank_bound == 1
    assert truncated.numerical_rank() == 1
    assert np.isclose(np.linalg.norm(truncated.state), 1.0)
    padded = truncated.padded(3)
    assert padded.rank_bound == 3
    assert np.allclose(padded.state, truncated.state)
    with pytest.raises(ValidationError):
        padded.padded(2)


def test_embedding():
    vector = SchmidtVector.from_state(linops.maximally_entangled(2), 2, 2)
    embedded = vector.embedded(3)
    assert (embedded.dim_a, embedded.dim_b) == (3, 2)
    assert np.allclose(embedded.state.reshape(3, 2)[:2], vector.state.reshape(2, 2))
    assert np.allclose(embedded.state.reshape(3, 2)[2], 0)
    with pytest.raises(ValidationError):
        embedded.embedded(2)


def test_config_round_trip():
    vector = SchmidtVector.from_state(linops.random_pure_state(6, seed=4), 2, 3, k=2)
    block = vector.to_config()
    assert block["k"] == 2 and block["dims"] == [2, 3]
    restored = SchmidtVector.from_config(block)
    assert np.allclose(restored.state, vector.state)
    with pytest.raises(ValidationError):
        SchmidtVector.from_config({"left": block["left"]})
    with pytest.raises(ValidationError):
        SchmidtVector.from_config(dict(block, dims=[3, 2]))


def test_schmidt_vector_validation():
    with pytest.raises(ValidationError):
        SchmidtVector(np.ones((2, 1)), np.ones((2, 2)))
    with pytest.raises(ValidationError):
        SchmidtVector(np.zeros((2, 1)), np.ones((2, 1)))


@given(integers(min_value=2, max_value=3), seeds)
@settings(max_examples=20, deadline=None)
def test_full_rank_is_an_eigenvalue_problem(dim, seed):
    h = linops.random_hermitian(dim * dim, seed=seed)
    values = linops.eigvals_hermitian(h)
    low, witness = extremize_schmidt_k(h, dim, dim, dim, direction="min", restarts=0)
    high, _ = extremize_schmidt_k(h, dim, dim, dim, direction="max", restarts=0)
    assert np.isclose(low, values[0], atol=1e-12)
    assert np.isclose(high, values[-1], atol=1e-12)
    assert np.isclose(witness.expectation(h), low, atol=1e-12)


def test_swap_operator_over_product_states():
    # ⟨ab|SWAP|ab⟩ = |⟨a|b⟩|², so product states reach neither -1 nor beyond 1
    low, witness = extremize_schmidt_k(swap, 2, 2, 1, direction="min", restarts=8, seed=1)
    assert abs(low) < 1e-9
    assert witness.numerical_rank() == 1
    high, _ = extremize_schmidt_k(swap, 2, 2, 1, direction="max", restarts=8, seed=1)
    assert np.isclose(high, 1.0, atol=1e-9)
    singlet, witness = extremize_schmidt_k(swap, 2, 2, 2, direction="min", restarts=8, seed=1)
    assert np.isclose(singlet, -1.0, atol=1e-12)
    assert witness.numerical_rank() == 2


def test_extremal_eigenpair_follows_the_direction():
    h = np.diag([-2.0, 0.5, 3.0])
    assert schmidt._extremal_vector(h, 1)[0] == 3.0
    assert schmidt._extremal_vector(h, -1)[0] == -2.0
    value, vector = schmidt._extremal_vector(h, -1)
    assert np.isclose(abs(vector[0]), 1.0)


def test_product_minimum_lies_between_the_extremes():
    h = maps.random_channel(2, seed=8).choi - 0.4 * np.eye(4)
    values = linops.eigvals_hermitian(h)
    low, witness = extremize_schmidt_k(h, 2, 2, 1, direction="min", restarts=8, seed=3)
    high, _ = extremize_schmidt_k(h, 2, 2, 1, direction="max", restarts=8, seed=3)
    assert values[0] - 1e-12 <= low <= high <= values[-1] + 1e-12
    assert np.isclose(witness.expectation(h), low, atol=1e-12)


def test_rank_bound_between_product_and_full():
    # The projector onto Σᵢ|ii⟩/√3 has maximum k/3 over Schmidt rank k
    h = linops.projector(linops.maximally_entangled(3))
    for k in (1, 2, 3):
        value, witness = extremize_schmidt_k(h, 3, 3, k, direction="max", restarts=8, seed=2)
        assert np.isclose(value, k / 3, atol=1e-8)
        assert witness.numerical_rank() <= k


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_seesaw_is_monotone(seed):
    h = maps.random_channel(3, seed=seed).choi - 0.5 * np.eye(9)
    rng = np.random.default_rng(seed)
    left = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    right = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    start = SchmidtVector(left, right).expectation(h)
    witness, iterations, history = schmidt._seesaw(h, 3, 3, left, right, -1, 1e-12, 200)
    assert iterations >= 1
    assert np.all(np.diff(history) >= -1e-9)
    assert witness.expectation(h) <= start + 1e-12


def test_determinism_and_thread_independence():
    h = maps.random_channel(3, seed=5).choi
    v1, w1 = extremize_schmidt_k(h, 3, 3, 2, restarts=6, seed=11, threads=1)
    v2, w2 = extremize_schmidt_k(h, 3, 3, 2, restarts=6, seed=11, threads=3)
    assert v1 == v2
    assert np.array_equal(w1.state, w2.state)


def test_warm_start_alone():
    h = -linops.projector(linops.maximally_entangled(3))
    initial = SchmidtVector.from_state(linops.maximally_entangled(3), 3, 3, k=1)
    value, witness = extremize_schmidt_k(h, 3, 3, 1, restarts=0, initial=initial)
    assert value <= initial.expectation(h) + 1e-12
    assert np.isclose(value, -1 / 3, atol=1e-8)


@pytest.mark.parametrize(
    ("kwargs", "field"),
    (
        ({"k": 0}, "k"),
        ({"k": 3}, "k"),
        ({"direction": "sideways"}, "direction"),
        ({"restarts": -1}, "restarts"),
        ({"restarts": 0}, "restarts"),
        ({"patience": 0}, "patience"),
    ),
)
def test_extremize_errors(kwargs, field):
    arguments = dict(h=swap, dim_a=2, dim_b=2, k=1, seed=0)
    arguments.update(kwargs)
    with pytest.raises(ValidationError) as excinfo:
        extremize_schmidt_k(**arguments)
    assert excinfo.value.field == field


def test_extremize_rejects_bad_warm_start():
    bad = SchmidtVector.from_state(linops.maximally_entangled(3), 3, 3)
    with pytest.raises(ValidationError):
        extremize_schmidt_k(np.eye(9), 3, 3, 1, initial=[bad])


def test_stop_beyond_ends_the_search_early():
    h = swap - 0.5 * np.eye(4)
    value, witness, used = extremize_schmidt_k(h, 2, 2, 1, restarts=16, seed=4, stop_beyond=0.0, full_output=True)
    assert used == 1
    assert value < 0
    assert np.isclose(witness.expectation(h), value, atol=1e-12)
    _, _, used = extremize_schmidt_k(h, 2, 2, 1, restarts=16, seed=4, full_output=True)
    assert used == 16


def test_patience_is_thread_independent():
    h = maps.random_channel(3, seed=9).choi
    one = extremize_schmidt_k(h, 3, 3, 2, restarts=20, seed=12, patience=3, full_output=True)
    many = extremize_schmidt_k(h, 3, 3, 2, restarts=20, seed=12, patience=3, threads=4, full_output=True)
    assert one[0] == many[0]
    assert one[2] == many[2]
    assert 4 <= one[2] <= 20
    assert np.array_equal(one[1].state, many[1].state)


def test_full_rank_reports_no_starts():
    value, _, used = extremize_schmidt_k(swap, 2, 2, 2, full_output=True)
    assert np.isclose(value, -1.0)
    assert used == 0
