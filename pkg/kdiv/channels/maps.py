"""Hermiticity-preserving maps and quantum channels

A map is stored through its superoperator `S`, acting on row-major vectorized
operators, `vec(Φ(X)) = S @ vec(X)`.  The Choi matrix is the unnormalized

    C = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|),

with the input copy as the first factor, so that `C[(i, a), (j, b)] = S[(a, b), (i, j)]`.
With this convention a map is completely positive iff `C ≥ 0` and trace
preserving iff `tr_out C = I`, with no normalization factors.

"""

import logging
import numpy as np
import scipy.linalg

from .. import linops
from ..utilities.errors import ValidationError, SingularMapError

logger = logging.getLogger(__name__)

cp_tolerance = 1e-9
tp_tolerance = 1e-8
default_cond_threshold = 1e10


def superop_to_choi(superop, dim_in, dim_out):
    """Reshuffle a superoperator into the Choi matrix"""
    s4 = np.asarray(superop, dtype=complex).reshape(dim_out, dim_out, dim_in, dim_in)
    return s4.transpose(2, 0, 3, 1).reshape(dim_in * dim_out, dim_in * dim_out)


def choi_to_superop(choi, dim_in, dim_out):
    """Inverse of `superop_to_choi`"""
    c4 = np.asarray(choi, dtype=complex).reshape(dim_in, dim_out, dim_in, dim_out)
    return c4.transpose(1, 3, 0, 2).reshape(dim_out * dim_out, dim_in * dim_in)


class HermitianMap(object):
    """Linear map taking Hermitian operators on `dim_in` to Hermitian operators on `dim_out`

    Instances are immutable.  Linear combinations are supported directly, so
    that the weighted difference of two channels is written `(1-p)*phi1 - p*phi2`.

    Parameters
    ----------
    superop : (dim_out², dim_in²) array_like
    dim_in, dim_out : int
    check : bool, optional
        Verify that the Choi matrix is Hermitian.  Defaults to True.

    """

    def __init__(self, superop, dim_in, dim_out=None, check=True):
        dim_out = dim_in if dim_out is None else dim_out
        if int(dim_in) < 1 or int(dim_out) < 1:
            raise ValidationError(f"dimensions must be positive, got ({dim_in}, {dim_out})", field="dims")
        superop = linops.as_matrix(superop, name="superop")
        if superop.shape != (dim_out**2, dim_in**2):
            raise ValidationError(
                f"shape {superop.shape} does not match dims ({dim_in}, {dim_out})", field="superop"
            )
        self._dim_in, self._dim_out = int(dim_in), int(dim_out)
        choi = superop_to_choi(superop, self._dim_in, self._dim_out)
        if check:
            scale = max(1.0, float(np.max(np.abs(choi))))
            choi = linops.check_hermitian(choi, tolerance=linops.hermiticity_tolerance * scale, name="choi")
            superop = choi_to_superop(choi, self._dim_in, self._dim_out)
        else:
            choi = (choi + choi.conj().T) / 2
        self._superop = np.array(superop)
        self._choi = np.array(choi)
        self._superop.setflags(write=False)
        self._choi.setflags(write=False)

    @classmethod
    def from_choi(cls, choi, dim_in, dim_out=None):
        dim_out = dim_in if dim_out is None else dim_out
        choi = linops.as_matrix(choi, name="choi")
        if choi.shape != (dim_in * dim_out, dim_in * dim_out):
            raise ValidationError(f"shape {choi.shape} does not match dims ({dim_in}, {dim_out})", field="choi")
        return cls(choi_to_superop(choi, dim_in, dim_out), dim_in, dim_out)

    @classmethod
    def from_superop(cls, superop, dim_in, dim_out=None):
        return cls(superop, dim_in, dim_out)

    @property
    def dim_in(self):
        return self._dim_in

    @property
    def dim_out(self):
        return self._dim_out

    @property
    def dims(self):
        return (self._dim_in, self._dim_out)

    @property
    def superop(self):
        """Matrix acting on row-major vectorized operators"""
        return self._superop

    @property
    def choi(self):
        """Unnormalized Choi matrix, input factor first"""
        return self._choi

    def as_map(self):
        """This map as a plain HermitianMap, dropping any channel certificates"""
        return HermitianMap(self._superop, self._dim_in, self._dim_out, check=False)

    def __call__(self, x):
        return apply(self, x)

    def adjoint(self):
        """The Hilbert–Schmidt adjoint Φ†, with `tr(A Φ(B)) = tr(Φ†(A) B)` for Hermitian `A`"""
        return HermitianMap(self._superop.conj().T, self._dim_out, self._dim_in)

    def is_cp(self, tolerance=cp_tolerance):
        return bool(linops.eigvals_hermitian(self._choi)[0] >= -tolerance)

    def is_tp(self, tolerance=tp_tolerance):
        return trace_preservation_error(self) <= tolerance

    def _combine(self, other, a, b):
        if not isinstance(other, HermitianMap):
            return NotImplemented
        if other.dims != self.dims:
            raise ValidationError(f"cannot combine maps with dims {self.dims} and {other.dims}", field="dims")
        return HermitianMap(a * self._superop + b * other._superop, self._dim_in, self._dim_out, check=False)

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, scalar):
        if not np.isscalar(scalar) or np.iscomplexobj(scalar):
            return NotImplemented
        return HermitianMap(float(scalar) * self._superop, self._dim_in, self._dim_out, check=False)

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def __repr__(self):
        return f"{type(self).__name__}(dim_in={self._dim_in}, dim_out={self._dim_out})"


class Channel(HermitianMap):
    """Hermitian map carrying certificates of complete positivity and trace preservation

    The flags are computed on construction: `cp_certified` when the smallest
    Choi eigenvalue is at least -1e-9, `tp_certified` when the partial trace of
    the Choi matrix over the output is the identity to within 1e-8.

    """

    def __init__(self, superop, dim_in, dim_out=None, check=True, cp_tolerance=cp_tolerance, tp_tolerance=tp_tolerance):
        super().__init__(superop, dim_in, dim_out, check=check)
        self._cp_certified = self.is_cp(cp_tolerance)
        self._tp_certified = self.is_tp(tp_tolerance)

    @classmethod
    def from_map(cls, m):
        return cls(m.superop, m.dim_in, m.dim_out, check=False)

    @property
    def cp_certified(self):
        return self._cp_certified

    @property
    def tp_certified(self):
        return self._tp_certified

    @property
    def is_cptp(self):
        return self._cp_certified and self._tp_certified

    def __repr__(self):
        return (
            f"{type(self).__name__}(dim_in={self.dim_in}, dim_out={self.dim_out}, "
            f"cp_certified={self.cp_certified}, tp_certified={self.tp_certified})"
        )


def trace_preservation_error(m):
    """Largest entry of `|tr_out(C) - I|` for the Choi matrix `C` of `m`"""
    reduced = linops.partial_trace(m.choi, m.dim_in, m.dim_out, "second")
    return float(np.max(np.abs(reduced - np.eye(m.dim_in))))


def from_kraus(operators):
    """Channel with the given Kraus operators, `Φ(X) = Σ A X A†`

    Raises
    ------
    ValidationError
        If the list is empty or the operators do not share a shape.

    """
    operators = [linops.as_matrix(a, name="kraus") for a in operators]
    if not operators:
        raise ValidationError("need at least one Kraus operator", field="kraus")
    shape = operators[0].shape
    if any(a.shape != shape for a in operators):
        raise ValidationError(f"Kraus operators must share a shape; found {[a.shape for a in operators]}", field="kraus")
    dim_out, dim_in = shape
    superop = sum(np.kron(a, a.conj()) for a in operators)
    return Channel(superop, dim_in, dim_out)


def to_kraus(channel, tolerance=linops.psd_tolerance):
    """Kraus operators from the eigendecomposition of the Choi matrix

    Eigenvalues below `tolerance` are dropped; the remaining operators are
    ordered by decreasing eigenvalue.

    Raises
    ------
    ValidationError
        If the map is not certified completely positive.

    """
    certified = channel.cp_certified if isinstance(channel, Channel) else channel.is_cp()
    if not certified:
        raise ValidationError("map is not completely positive", field="channel")
    eigenvalues, eigenvectors = linops.eig_hermitian(channel.choi)
    operators = []
    for value, vector in zip(eigenvalues[::-1], eigenvectors.T[::-1]):
        if value < tolerance:
            break
        operators.append((np.sqrt(value) * vector).reshape(channel.dim_in, channel.dim_out).T)
    return operators


def apply(m, x):
    """Image `m(x)` of an operator on the input space"""
    x = linops.as_matrix(x, name="x")
    if x.shape != (m.dim_in, m.dim_in):
        raise ValidationError(f"shape {x.shape} does not match dim_in = {m.dim_in}", field="x")
    return (m.superop @ x.reshape(-1)).reshape(m.dim_out, m.dim_out)


def compose(outer, inner):
    """The map `outer ∘ inner`; a Channel when both arguments are"""
    if inner.dim_out != outer.dim_in:
        raise ValidationError(
            f"inner.dim_out = {inner.dim_out} does not match outer.dim_in = {outer.dim_in}", field="compose"
        )
    superop = outer.superop @ inner.superop
    if isinstance(outer, Channel) and isinstance(inner, Channel):
        return Channel(superop, inner.dim_in, outer.dim_out, check=False)
    return HermitianMap(superop, inner.dim_in, outer.dim_out, check=False)


def invert(m, cond_threshold=default_cond_threshold, time=None):
    """Inverse map, generally not completely positive

    Raises
    ------
    SingularMapError
        If the superoperator's 2-norm condition number exceeds `cond_threshold`.

    """
    if m.dim_in != m.dim_out:
        raise ValidationError(f"only square maps can be inverted, got dims {m.dims}", field="invert")
    cond = float(np.linalg.cond(m.superop))
    if not np.isfinite(cond) or cond > cond_threshold:
        raise SingularMapError(
            f"superoperator condition number {cond:.3e} exceeds {cond_threshold:.1e}", cond=cond, time=time
        )
    if cond > cond_threshold**0.5:
        logger.debug("Inverting a poorly conditioned map (cond = %.3e)", cond)
    return HermitianMap(scipy.linalg.inv(m.superop), m.dim_in, m.dim_out, check=False)


def tensor_with_identity(m, k):
    """The map `id_k ⊗ m`, with the k-dimensional ancilla as the first factor"""
    if int(k) < 1:
        raise ValidationError(f"must be at least 1, not {k}", field="k")
    k = int(k)
    if k == 1:
        return m
    eye = np.eye(k)
    s4 = m.superop.reshape(m.dim_out, m.dim_out, m.dim_in, m.dim_in)
    superop = np.einsum("pP,qQ,abij->paqbPiQj", eye, eye, s4).reshape((k * m.dim_out) ** 2, (k * m.dim_in) ** 2)
    if isinstance(m, Channel):
        return Channel(superop, k * m.dim_in, k * m.dim_out, check=False)
    return HermitianMap(superop, k * m.dim_in, k * m.dim_out, check=False)


def apply_extended(m, k, x):
    """Evaluate `(id_k ⊗ m)(x)` without building the extended superoperator"""
    x = linops.as_matrix(x, name="x")
    if x.shape != (k * m.dim_in, k * m.dim_in):
        raise ValidationError(f"shape {x.shape} does not match k * dim_in = {k * m.dim_in}", field="x")
    s4 = m.superop.reshape(m.dim_out, m.dim_out, m.dim_in, m.dim_in)
    x4 = x.reshape(k, m.dim_in, k, m.dim_in)
    return np.einsum("abij,piqj->paqb", s4, x4).reshape(k * m.dim_out, k * m.dim_out)


def identity(dim):
    return Channel(np.eye(dim * dim), dim, dim)


def unitary(u):
    """Unitary channel `X ↦ U X U†`"""
    return from_kraus([u])


def pauli(probabilities):
    """Qubit Pauli channel `Σ pᵢ σᵢ X σᵢ` with weights for (I, X, Y, Z)"""
    probabilities = np.asarray(probabilities, dtype=float)
    if probabilities.shape != (4,) or np.any(probabilities < 0) or abs(probabilities.sum() - 1) > 1e-12:
        raise ValidationError(f"expected four nonnegative weights summing to 1, got {probabilities}", field="probabilities")
    return from_kraus([np.sqrt(q) * s for q, s in zip(probabilities, linops.pauli_matrices)])


def depolarizing(strength, dim=2):
    """`X ↦ (1-λ) X + λ tr(X) I/d`; completely positive for `-1/(d²-1) ≤ λ ≤ 1 + 1/(d²-1)`"""
    choi = (1 - strength) * linops.projector(np.sqrt(dim) * linops.maximally_entangled(dim)) + strength * np.eye(dim * dim) / dim
    return Channel.from_choi(choi, dim, dim)


def completely_depolarizing(dim=2):
    return depolarizing(1.0, dim)


def dephasing(probability):
    """Qubit dephasing `(1-p) X + p σ_z X σ_z`; coherences shrink by `1 - 2p`"""
    if not 0 <= probability <= 1:
        raise ValidationError(f"must lie in [0, 1], not {probability}", field="probability")
    return from_kraus([np.sqrt(1 - probability) * linops.pauli_matrices[0], np.sqrt(probability) * linops.pauli_matrices[3]])


def amplitude_damping(gamma):
    """Qubit amplitude damping, taking |1⟩ to |0⟩ with probability `gamma`"""
    if not 0 <= gamma <= 1:
        raise ValidationError(f"must lie in [0, 1], not {gamma}", field="gamma")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.sqrt(gamma) * linops.sigma_minus
    return from_kraus([k0, k1])


def replacement(sigma):
    """`X ↦ tr(X) σ` for a fixed density operator σ"""
    sigma = linops.check_density(sigma, name="sigma")
    dim = sigma.shape[0]
    return Channel.from_choi(np.kron(np.eye(dim), sigma), dim, dim)


def transpose(dim=2):
    """Transposition `X ↦ Xᵀ`, positive but not 2-positive; its Choi matrix is the swap"""
    superop = np.eye(dim * dim).reshape(dim, dim, dim, dim).transpose(1, 0, 2, 3).reshape(dim * dim, dim * dim)
    return HermitianMap(superop, dim, dim)


def random_channel(dim, kraus_rank=None, seed=None):
    """Random channel from a Ginibre isometry `V: dim → dim·r`, with Kraus operators the blocks of `V`"""
    kraus_rank = dim * dim if kraus_rank is None else int(kraus_rank)
    if kraus_rank < 1:
        raise ValidationError(f"must be at least 1, not {kraus_rank}", field="kraus_rank")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim * kraus_rank, dim)) + 1j * rng.standard_normal((dim * kraus_rank, dim))
    v, _ = scipy.linalg.qr(g, mode="economic")
    return from_kraus([v[a * dim:(a + 1) * dim, :] for a in range(kraus_rank)])


def random_pauli(seed=None):
    """Pauli channel with Dirichlet-distributed weights"""
    rng = np.random.default_rng(seed)
    return pauli(rng.dirichlet(np.ones(4)))


presets = {
    "identity": identity,
    "pauli": pauli,
    "depolarizing": depolarizing,
    "completely_depolarizing": completely_depolarizing,
    "dephasing": dephasing,
    "amplitude_damping": amplitude_damping,
    "transpose": transpose,
}


def map_to_config(m):
    """Serialize as a `{"kind": "choi", "dims": [...], "matrices": [...]}` block"""
    return {"kind": "choi", "dims": [m.dim_in, m.dim_out], "matrices": [linops.matrix_to_json(m.choi)]}


def map_from_config(block, name="channel"):
    """Build a map from a configuration block

    Recognized kinds are "kraus" (a list of matrices), "choi" (a single matrix),
    "preset" (a `name` from `presets` plus optional `params`), and "unitary"
    (a single matrix).  Kraus, unitary and completely positive presets produce a
    `Channel`; Choi blocks produce a `Channel` when the matrix is positive
    semidefinite and a plain `HermitianMap` otherwise.

    """
    import inflection
    if not isinstance(block, dict):
        raise ValidationError("expected an object with a 'kind' member", field=name)
    kind = block.get("kind")
    if kind == "preset":
        preset_name = inflection.underscore(str(block.get("name", ""))).replace("-", "_")
        if preset_name not in presets:
            raise ValidationError(f"unknown preset {block.get('name')!r}; choose from {sorted(presets)}", field=name)
        params = block.get("params", {})
        if not isinstance(params, dict):
            raise ValidationError("preset params must be an object", field=name)
        try:
            return presets[preset_name](**params)
        except TypeError as e:
            raise ValidationError(f"bad params for preset {preset_name!r}: {e}", field=name) from e
    matrices = block.get("matrices")
    if not isinstance(matrices, list) or not matrices:
        raise ValidationError("expected a non-empty 'matrices' list", field=name)
    matrices = [linops.matrix_from_json(m, name=f"{name}.matrices[{i}]") for i, m in enumerate(matrices)]
    dims = block.get("dims")
    if kind == "kraus":
        channel = from_kraus(matrices)
    elif kind == "unitary":
        channel = unitary(matrices[0])
    elif kind == "choi":
        if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) for x in dims)):
            raise ValidationError("choi blocks need integer 'dims': [dim_in, dim_out]", field=name)
        m = HermitianMap.from_choi(matrices[0], *dims)
        channel = Channel.from_map(m) if m.is_cp() else m
    else:
        raise ValidationError(f"unknown kind {kind!r}", field=name)
    if dims is not None and list(dims) != [channel.dim_in, channel.dim_out]:
        raise ValidationError(f"dims {dims} disagree with the matrices' dims {list(channel.dims)}", field=name)
    return channel
