"""Time-local GKSL generators with time-dependent rates

The generator acts as

    L_t[ρ] = -i[H(t), ρ] + Σ_α γ_α(t) (A_α ρ A_α† - ½{A_α† A_α, ρ}),

with `H(t) = Σ_j f_j(t) H_j`.  Operators are fixed; all time dependence sits in
the scalar coefficients, so the superoperator is a fixed linear combination of
precomputed matrices.

"""

import logging
import numpy as np
import inflection

from .. import linops
from ..utilities.errors import ValidationError, NonCanonicalGeneratorError
from .rates import Constant, Tanh, rate_from_config

logger = logging.getLogger(__name__)

rate_sign_tolerance = 1e-12
canonical_tolerance = 1e-10


def hamiltonian_superop(h):
    """Superoperator of `ρ ↦ -i[h, ρ]`"""
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


def dissipator_superop(a):
    """Superoperator of `ρ ↦ a ρ a† - ½{a†a, ρ}`"""
    eye = np.eye(a.shape[0])
    ada = a.conj().T @ a
    return np.kron(a, a.conj()) - 0.5 * (np.kron(ada, eye) + np.kron(eye, ada.T))


class GKSLGenerator(object):
    """Time-dependent GKSL generator on a `dim`-dimensional system

    Parameters
    ----------
    dim : int
    hamiltonian : list of (operator, RateFunction) pairs, optional
        Terms `f_j(t) H_j` of the Hamiltonian.
    dissipators : list of (operator, RateFunction) pairs, optional
        Noise operators `A_α` with rates `γ_α(t)`.
    canonical : bool, optional
        Declares the dissipators traceless and mutually orthogonal, so that the
        signs of the rates decide complete positivity.  Checked when used.
    config : dict, optional
        Serialized form echoed into reports; built from the operators when absent.

    """

    def __init__(self, dim, hamiltonian=(), dissipators=(), canonical=False, config=None):
        self.dim = int(dim)
        if self.dim < 1:
            raise ValidationError(f"must be positive, not {dim}", field="dim")
        self.hamiltonian_terms = tuple(
            (linops.check_hermitian(h, name=f"hamiltonian[{j}]"), rate_from_config(f, name=f"hamiltonian[{j}]"))
            for j, (h, f) in enumerate(hamiltonian)
        )
        self.dissipators = tuple(
            (linops.as_matrix(a, name=f"dissipators[{α}]"), rate_from_config(γ, name=f"dissipators[{α}]"))
            for α, (a, γ) in enumerate(dissipators)
        )
        for name, terms in (("hamiltonian", self.hamiltonian_terms), ("dissipators", self.dissipators)):
            for j, (operator, _) in enumerate(terms):
                if operator.shape != (self.dim, self.dim):
                    raise ValidationError(f"shape {operator.shape} does not match dim = {self.dim}", field=f"{name}[{j}]")
        self.canonical = bool(canonical)
        self._terms = [hamiltonian_superop(h) for h, _ in self.hamiltonian_terms]
        self._terms += [dissipator_superop(a) for a, _ in self.dissipators]
        self._coefficients = [f for _, f in self.hamiltonian_terms] + [γ for _, γ in self.dissipators]
        self._config = config

    @property
    def rate_functions(self):
        return tuple(γ for _, γ in self.dissipators)

    @property
    def term_superops(self):
        """Array of shape `(n_terms, d², d²)`: Hamiltonian terms first, then dissipators"""
        if not self._terms:
            return np.zeros((0, self.dim**2, self.dim**2), dtype=complex)
        return np.array(self._terms)

    def coefficients(self, times):
        """Array of shape `(len(times), n_terms)` of the scalar coefficients"""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if not self._coefficients:
            return np.zeros((times.size, 0))
        return np.stack([np.atleast_1d(f(times)) for f in self._coefficients], axis=1)

    def hamiltonian(self, t):
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for operator, f in self.hamiltonian_terms:
            h += f(t) * operator
        return h

    def rates(self, t):
        """Rates `γ_α(t)`, one row per time when `t` is an array"""
        t = np.asarray(t, dtype=float)
        return np.array([γ(t) for γ in self.rate_functions]).T

    def superop(self, t):
        return generator_superop(self, t)

    def trace_annihilation_error(self, t):
        """Largest `|tr L_t[E_ij]|` over matrix units"""
        return float(np.max(np.abs(np.eye(self.dim).reshape(-1) @ generator_superop(self, t)), initial=0.0))

    def to_config(self):
        if self._config is not None:
            return self._config
        return {
            "dim": self.dim,
            "hamiltonian": [
                {"matrix": linops.matrix_to_json(h), "coefficient": f.to_config()} for h, f in self.hamiltonian_terms
            ],
            "dissipators": [{"matrix": linops.matrix_to_json(a), "rate": γ.to_config()} for a, γ in self.dissipators],
            "canonical": self.canonical,
        }

    def __repr__(self):
        return (
            f"GKSLGenerator(dim={self.dim}, hamiltonian_terms={len(self.hamiltonian_terms)}, "
            f"dissipators={len(self.dissipators)}, canonical={self.canonical})"
        )


def generator_superop(g, t):
    """Superoperator of `L_t`, acting on row-major vectorized operators"""
    superop = np.zeros((g.dim**2, g.dim**2), dtype=complex)
    for term, f in zip(g._terms, g._coefficients):
        superop += f(float(t)) * term
    return superop


def check_canonical(g, tolerance=canonical_tolerance):
    """Raise unless the dissipators are traceless and mutually Hilbert–Schmidt orthogonal

    Raises
    ------
    NonCanonicalGeneratorError

    """
    if not g.canonical:
        raise NonCanonicalGeneratorError(
            "rates are not basis-invariant unless the generator is declared canonical", field="canonical"
        )
    operators = [a for a, _ in g.dissipators]
    for α, a in enumerate(operators):
        if abs(np.trace(a)) > tolerance:
            raise NonCanonicalGeneratorError(f"dissipator {α} has trace {np.trace(a):.3g}", field="dissipators")
        for β in range(α):
            overlap = np.vdot(operators[β], a)
            if abs(overlap) > tolerance:
                raise NonCanonicalGeneratorError(
                    f"dissipators {β} and {α} overlap: tr(A†B) = {overlap:.3g}", field="dissipators"
                )


def rates_cp_check(g, times, tolerance=rate_sign_tolerance):
    """Whether every rate is nonnegative at each of `times`

    For a canonical generator this is the condition for every short-time
    propagator to be completely positive.

    Returns
    -------
    ok : ndarray of bool, one entry per time

    Raises
    ------
    NonCanonicalGeneratorError
        If the generator is not declared canonical or its dissipators are not
        traceless and orthogonal.

    """
    check_canonical(g)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not g.dissipators:
        return np.ones(times.size, dtype=bool)
    rates = np.reshape(g.rates(times), (times.size, len(g.dissipators)))
    return np.all(rates >= -tolerance, axis=1)


def qubit_pauli(gamma1, gamma2, gamma3):
    """Qubit Pauli dynamics `Σᵢ γᵢ(t) (σᵢ ρ σᵢ - ρ)`

    Each rate may be a number, a `RateFunction`, or a `{"kind", "params"}` block.

    """
    gammas = [rate_from_config(γ, name=f"gamma{i+1}") for i, γ in enumerate((gamma1, gamma2, gamma3))]
    config = {"preset": "qubit_pauli", "params": {f"gamma{i+1}": γ.to_config() for i, γ in enumerate(gammas)}}
    return GKSLGenerator(2, dissipators=zip(linops.pauli_matrices[1:], gammas), canonical=True, config=config)


def eternal():
    """Pauli dynamics with rates (1, 1, -tanh t): P-divisible, but not CP-divisible for any t > 0"""
    g = qubit_pauli(1.0, 1.0, Tanh(amplitude=-1.0))
    g._config = {"preset": "eternal", "params": {}}
    return g


def semigroup(gamma1=0.5, gamma2=0.3, gamma3=0.2):
    """Pauli dynamics with constant rates"""
    for i, γ in enumerate((gamma1, gamma2, gamma3)):
        if not isinstance(γ, (int, float)):
            raise ValidationError(f"semigroup rates must be constants, got {γ!r}", field=f"gamma{i+1}")
    g = qubit_pauli(gamma1, gamma2, gamma3)
    g._config = {"preset": "semigroup", "params": {"gamma1": gamma1, "gamma2": gamma2, "gamma3": gamma3}}
    return g


def dephasing(gamma=1.0):
    """Pure dephasing `γ(t) (σ_z ρ σ_z - ρ)`; coherences decay as `exp(-2∫γ)`"""
    γ = rate_from_config(gamma, name="gamma")
    config = {"preset": "dephasing", "params": {"gamma": γ.to_config()}}
    return GKSLGenerator(2, dissipators=[(linops.pauli_matrices[3], γ)], canonical=True, config=config)


def amplitude_damping(gamma=1.0):
    """Decay of |1⟩ to |0⟩ at rate `γ(t)`"""
    γ = rate_from_config(gamma, name="gamma")
    config = {"preset": "amplitude_damping", "params": {"gamma": γ.to_config()}}
    return GKSLGenerator(2, dissipators=[(linops.sigma_minus, γ)], canonical=True, config=config)


def hamiltonian_drift(omega=1.0):
    """Closed qubit evolution under `H = ω σ_z / 2`"""
    ω = rate_from_config(omega, name="omega")
    config = {"preset": "hamiltonian_drift", "params": {"omega": ω.to_config()}}
    return GKSLGenerator(2, hamiltonian=[(linops.pauli_matrices[3] / 2, ω)], canonical=True, config=config)


def zero(dim=2):
    return GKSLGenerator(dim, canonical=True, config={"preset": "zero", "params": {"dim": dim}})


presets = {
    "qubit_pauli": qubit_pauli,
    "eternal": eternal,
    "semigroup": semigroup,
    "dephasing": dephasing,
    "amplitude_damping": amplitude_damping,
    "hamiltonian_drift": hamiltonian_drift,
    "zero": zero,
}


def generator_from_config(block, name="generator"):
    """Build a generator from a preset block or an explicit operator block

    Preset blocks look like `{"preset": "eternal", "params": {...}}`.  Explicit
    blocks give `dim`, a `hamiltonian` (a single matrix, or a list of
    `{"matrix", "coefficient"}` terms), and `dissipators` as a list of
    `{"matrix", "rate"}` entries, plus an optional `canonical` flag.

    """
    if not isinstance(block, dict):
        raise ValidationError("expected an object", field=name)
    if "preset" in block:
        preset = inflection.underscore(str(block["preset"])).replace("-", "_")
        if preset not in presets:
            raise ValidationError(f"unknown preset {block['preset']!r}; choose from {sorted(presets)}", field=name)
        params = block.get("params", {})
        if not isinstance(params, dict):
            raise ValidationError("params must be an object", field=f"{name}.params")
        try:
            return presets[preset](**params)
        except TypeError as e:
            raise ValidationError(f"bad params for preset {preset!r}: {e}", field=f"{name}.params") from e

    hamiltonian = block.get("hamiltonian", [])
    if isinstance(hamiltonian, list) and hamiltonian and isinstance(hamiltonian[0], dict):
        terms = [
            (linops.matrix_from_json(term.get("matrix"), name=f"{name}.hamiltonian[{j}]"), term.get("coefficient", 1.0))
            for j, term in enumerate(hamiltonian)
        ]
    elif hamiltonian:
        terms = [(linops.matrix_from_json(hamiltonian, name=f"{name}.hamiltonian"), Constant(1.0))]
    else:
        terms = []
    dissipators = block.get("dissipators", [])
    if not isinstance(dissipators, list):
        raise ValidationError("must be a list", field=f"{name}.dissipators")
    noise = []
    for α, entry in enumerate(dissipators):
        if not isinstance(entry, dict) or "matrix" not in entry or "rate" not in entry:
            raise ValidationError("expected an object with 'matrix' and 'rate'", field=f"{name}.dissipators[{α}]")
        noise.append((linops.matrix_from_json(entry["matrix"], name=f"{name}.dissipators[{α}]"), entry["rate"]))
    dims = {operator.shape[0] for operator, _ in terms + noise}
    dim = block.get("dim", dims.pop() if len(dims) == 1 else None)
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ValidationError("give an integer 'dim' or at least one operator", field=f"{name}.dim")
    return GKSLGenerator(dim, terms, noise, canonical=block.get("canonical", False))
