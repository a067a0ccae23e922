import pytest
import numpy as np
from hypothesis import given, settings
from hypothesis.strategies import integers

from kdiv import linops
from kdiv.channels import maps
from kdiv.utilities.errors import ValidationError, SingularMapError

seeds = integers(min_value=0, max_value=2**32 - 1)


@given(integers(min_value=1, max_value=3), integers(min_value=1, max_value=3), seeds)
@settings(max_examples=30, deadline=None)
def test_choi_superop_reshuffles(dim_in, dim_out, seed):
    rng = np.random.default_rng(seed)
    superop = rng.standard_normal((dim_out**2, dim_in**2)) + 1j * rng.standard_normal((dim_out**2, dim_in**2))
    choi = maps.superop_to_choi(superop, dim_in, dim_out)
    assert np.array_equal(maps.choi_to_superop(choi, dim_in, dim_out), superop)


def test_identity_choi_is_unnormalized_bell_projector():
    omega = np.sqrt(2) * linops.maximally_entangled(2)
    assert np.allclose(maps.identity(2).choi, linops.projector(omega))
    assert np.allclose(maps.transpose(2).choi, np.eye(4)[[0, 2, 1, 3]])


@given(integers(min_value=1, max_value=3), integers(min_value=1, max_value=4), seeds)
@settings(max_examples=30, deadline=None)
def test_kraus_round_trip(dim, kraus_rank, seed):
    channel = maps.random_channel(dim, kraus_rank=kraus_rank, seed=seed)
    assert channel.is_cptp
    operators = maps.to_kraus(channel)
    assert len(operators) <= min(kraus_rank, dim * dim)
    assert np.allclose(sum(a.conj().T @ a for a in operators), np.eye(dim), atol=1e-10)
    assert np.allclose(maps.from_kraus(operators).superop, channel.superop, atol=1e-10)


def test_to_kraus_rejects_non_cp_maps():
    with pytest.raises(ValidationError):
        maps.to_kraus(maps.transpose(2))


def test_from_kraus_errors():
    with pytest.raises(ValidationError):
        maps.from_kraus([])
    with pytest.raises(ValidationError):
        maps.from_kraus([np.eye(2), np.eye(3)])


def test_presets_are_cptp():
    for channel in [
        maps.identity(3),
        maps.pauli([0.1, 0.2, 0.3, 0.4]),
        maps.depolarizing(0.3, dim=3),
        maps.completely_depolarizing(2),
        maps.dephasing(0.25),
        maps.amplitude_damping(0.6),
        maps.replacement(np.diag([0.25, 0.75])),
        maps.unitary(linops.random_unitary(3, seed=1)),
        maps.random_pauli(seed=2),
    ]:
        assert channel.cp_certified and channel.tp_certified, channel
    assert not maps.transpose(2).is_cp()
    assert maps.transpose(2).is_tp()


@pytest.mark.parametrize("gamma", (0.0, 0.3, 1.0))
def test_amplitude_damping_action(gamma):
    rho = maps.amplitude_damping(gamma)(np.diag([0.0, 1.0]))
    assert np.allclose(rho, np.diag([gamma, 1 - gamma]))
    plus = np.full((2, 2), 0.5)
    assert np.isclose(maps.amplitude_damping(gamma)(plus)[0, 1], 0.5 * np.sqrt(1 - gamma))


def test_dephasing_and_completely_depolarizing_action():
    plus = np.full((2, 2), 0.5)
    assert np.isclose(maps.dephasing(0.2)(plus)[0, 1], 0.5 * (1 - 2 * 0.2))
    assert np.allclose(maps.completely_depolarizing(2)(plus), np.eye(2) / 2)
    sigma = np.diag([0.1, 0.9])
    assert np.allclose(maps.replacement(sigma)(plus), sigma)


def test_preset_errors():
    with pytest.raises(ValidationError):
        maps.pauli([0.5, 0.5, 0.5, -0.5])
    with pytest.raises(ValidationError):
        maps.dephasing(1.5)
    with pytest.raises(ValidationError):
        maps.amplitude_damping(-0.1)
    with pytest.raises(ValidationError):
        maps.random_channel(2, kraus_rank=0)


def test_apply_shape_error():
    with pytest.raises(ValidationError):
        maps.apply(maps.identity(2), np.eye(3))


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_compose_matches_sequential_application(seed):
    phi1 = maps.random_channel(2, seed=[seed, 0])
    phi2 = maps.random_channel(2, seed=[seed, 1])
    rho = linops.random_density(2, seed=[seed, 2])
    composed = maps.compose(phi2, phi1)
    assert isinstance(composed, maps.Channel) and composed.is_cptp
    assert np.allclose(composed(rho), phi2(phi1(rho)), atol=1e-12)
    mixed = maps.compose(maps.transpose(2), phi1)
    assert not isinstance(mixed, maps.Channel)


def test_compose_dimension_mismatch():
    with pytest.raises(ValidationError):
        maps.compose(maps.identity(2), maps.identity(3))


def test_invert():
    channel = maps.depolarizing(0.5)
    inverse = maps.invert(channel)
    assert np.allclose(maps.compose(inverse, channel).superop, np.eye(4), atol=1e-12)
    assert not inverse.is_cp()
    assert inverse.is_tp()
    with pytest.raises(SingularMapError) as excinfo:
        maps.invert(maps.completely_depolarizing(2), time=0.25)
    assert excinfo.value.time == 0.25
    assert excinfo.value.cond > 1e10


@given(seeds)
@settings(max_examples=20, deadline=None)
def test_adjoint(seed):
    channel = maps.random_channel(2, seed=[seed, 0])
    a = linops.random_hermitian(2, seed=[seed, 1])
    b = linops.random_hermitian(2, seed=[seed, 2])
    assert np.isclose(np.trace(a @ channel(b)), np.trace(channel.adjoint()(a) @ b), atol=1e-12)
    assert np.allclose(channel.adjoint()(np.eye(2)), np.eye(2), atol=1e-12)


@pytest.mark.parametrize("k", (1, 2, 3))
def test_tensor_with_identity_matches_apply_extended(k):
    channel = maps.random_channel(2, seed=k)
    x = linops.random_hermitian(2 * k, seed=10 + k)
    extended = maps.tensor_with_identity(channel, k)
    assert extended.dims == (2 * k, 2 * k)
    assert np.allclose(extended(x), maps.apply_extended(channel, k, x), atol=1e-12)
    assert isinstance(extended, maps.Channel) and extended.is_cptp
    with pytest.raises(ValidationError):
        maps.tensor_with_identity(channel, 0)


def test_apply_extended_on_product():
    channel = maps.amplitude_damping(0.4)
    a = linops.random_density(3, seed=1)
    rho = linops.random_density(2, seed=2)
    assert np.allclose(maps.apply_extended(channel, 3, np.kron(a, rho)), np.kron(a, channel(rho)), atol=1e-12)


def test_linear_combinations():
    phi1, phi2 = maps.identity(2), maps.completely_depolarizing(2)
    difference = 0.5 * phi1 - 0.5 * phi2
    assert type(difference) is maps.HermitianMap
    plus = np.full((2, 2), 0.5)
    assert np.allclose(difference(plus), 0.5 * plus - 0.25 * np.eye(2))
    assert np.allclose((-phi1).superop, -np.eye(4))
    assert np.allclose((phi1 + phi2 - phi2).superop, phi1.superop)
    with pytest.raises(ValidationError):
        phi1 + maps.identity(3)


def test_hermitian_map_validation():
    with pytest.raises(ValidationError):
        maps.HermitianMap(np.eye(4), 3)
    with pytest.raises(ValidationError):
        maps.HermitianMap(np.eye(4), 0, 2)
    # X ↦ σ₊ X is not Hermiticity preserving
    with pytest.raises(ValidationError):
        maps.HermitianMap(np.kron(linops.sigma_minus.T, np.eye(2)), 2)
    with pytest.raises(ValidationError):
        maps.HermitianMap.from_choi(np.eye(3), 2)


def test_channel_flags():
    channel = maps.Channel.from_map(2 * maps.identity(2))
    assert channel.cp_certified and not channel.tp_certified
    assert not channel.is_cptp
    assert "tp_certified=False" in repr(channel)


def test_map_config_round_trip():
    channel = maps.amplitude_damping(0.3)
    block = maps.map_to_config(channel)
    restored = maps.map_from_config(block)
    assert isinstance(restored, maps.Channel)
    assert np.allclose(restored.superop, channel.superop)
    transposition = maps.map_from_config(maps.map_to_config(maps.transpose(2)))
    assert not isinstance(transposition, maps.Channel)


def test_map_from_config_kinds():
    assert np.allclose(
        maps.map_from_config({"kind": "preset", "name": "amplitudeDamping", "params": {"gamma": 0.5}}).superop,
        maps.amplitude_damping(0.5).superop,
    )
    kraus = maps.map_from_config({"kind": "kraus", "matrices": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]})
    assert np.allclose(kraus(np.full((2, 2), 0.5)), np.eye(2) / 2)
    flip = maps.map_from_config({"kind": "unitary", "matrices": [[[0, 1], [1, 0]]], "dims": [2, 2]})
    assert np.allclose(flip(np.diag([1.0, 0.0])), np.diag([0.0, 1.0]))


@pytest.mark.parametrize(
    "block",
    (
        "identity",
        {"kind": "preset", "name": "teleporter"},
        {"kind": "preset", "name": "dephasing", "params": {"strength": 0.1}},
        {"kind": "preset", "name": "dephasing", "params": [0.1]},
        {"kind": "kraus"},
        {"kind": "kraus", "matrices": [[[1, 0], [0]]]},
        {"kind": "kraus", "matrices": [[[1, 0], [0, "one"]]]},
        {"kind": "choi", "matrices": [np.eye(4).tolist()]},
        {"kind": "choi", "matrices": [np.eye(4).tolist()], "dims": [2, 3]},
        {"kind": "kraus", "matrices": [np.eye(2).tolist()], "dims": [3, 3]},
        {"kind": "stinespring", "matrices": [np.eye(2).tolist()]},
    ),
)
def test_map_from_config_errors(block):
    with pytest.raises(ValidationError):
        maps.map_from_config(block, name="channels.phi1")


def test_cptp_maps_contract_trace_norm():
    for i in range(20):
        channel = maps.random_channel(2, kraus_rank=1 + i % 4, seed=[5, i])
        for j in range(20):
            x = linops.random_hermitian(2, seed=[6, i, j])
            assert linops.trace_norm(channel(x)) <= linops.trace_norm(x) + 1e-9


@pytest.mark.slow
def test_cptp_maps_contract_trace_norm_exhaustive():
    for i in range(100):
        dim = 2 + i % 2
        channel = maps.random_channel(dim, seed=[7, i])
        for j in range(100):
            x = linops.random_hermitian(dim, seed=[8, i, j])
            assert linops.trace_norm(channel(x)) <= linops.trace_norm(x) + 1e-9
            y = linops.random_hermitian(2 * dim, seed=[9, i, j])
            assert linops.trace_norm(maps.apply_extended(channel, 2, y)) <= linops.trace_norm(y) + 1e-9


def test_positive_maps_contract_trace_norm():
    transposition = maps.transpose(2)
    for j in range(50):
        x = linops.random_hermitian(2, seed=[10, j])
        assert np.isclose(linops.trace_norm(transposition(x)), linops.trace_norm(x))
