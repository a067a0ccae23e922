"""Dense complex linear algebra with the tensor-product conventions used throughout kdiv

Operators are plain `numpy.ndarray` objects of dtype `complex128`; the helpers
`check_hermitian`, `check_density`, and `check_pure` enforce the invariants that
the rest of the package relies on, symmetrizing within tolerance and rejecting
anything further off.

Composite spaces are always ordered ancilla ⊗ system, so that for an operator
on a `dim_a * dim_b` space the row index is `i * dim_b + r`, with `i` labelling
the ancilla (first) factor and `r` the system (second) factor.  Vectorization
of operators is row-major: `vec(X)[i * n + j] = X[i, j]`, which is just
`X.reshape(-1)`.

"""

import logging
import numpy as np
import scipy.linalg

from .utilities.errors import ValidationError, EigenConvergenceError

logger = logging.getLogger(__name__)

hermiticity_tolerance = 1e-10
psd_tolerance = 1e-9
trace_tolerance = 1e-9
normalization_tolerance = 1e-12


def as_matrix(m, name="matrix"):
    """Convert to a finite 2-d complex array

    Raises
    ------
    ValidationError
        If the input is not two-dimensional or contains NaN or Inf.

    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"expected a 2-d array, got shape {m.shape}", field=name)
    if not np.all(np.isfinite(m)):
        raise ValidationError("entries must be finite", field=name)
    return m


def check_hermitian(h, tolerance=hermiticity_tolerance, name="operator"):
    """Return the symmetrized `(h + h†)/2`, rejecting inputs that are not Hermitian

    Parameters
    ----------
    h : array_like
        Square complex matrix.
    tolerance : float, optional
        Largest allowed entry of `|h - h†|`.  Defaults to 1e-10.

    """
    h = as_matrix(h, name=name)
    if h.shape[0] != h.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {h.shape}", field=name)
    deviation = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if deviation > tolerance:
        raise ValidationError(f"not Hermitian: max |h - h†| = {deviation:.3e} > {tolerance:.1e}", field=name)
    return (h + h.conj().T) / 2


def check_density(rho, tolerance=psd_tolerance, name="state"):
    """Return `rho` as a validated density operator

    The operator must be Hermitian, have eigenvalues no smaller than
    `-tolerance`, and have unit trace to within 1e-9.

    """
    rho = check_hermitian(rho, name=name)
    trace = np.trace(rho).real
    if abs(trace - 1) > trace_tolerance:
        raise ValidationError(f"trace is {trace!r}, not 1", field=name)
    smallest = eig_hermitian(rho)[0][0]
    if smallest < -tolerance:
        raise ValidationError(f"not positive semidefinite: smallest eigenvalue {smallest:.3e}", field=name)
    return rho


def check_pure(psi, name="state"):
    """Return `psi` as a validated unit vector"""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValidationError(f"expected a 1-d amplitude vector, got shape {psi.shape}", field=name)
    if not np.all(np.isfinite(psi)):
        raise ValidationError("amplitudes must be finite", field=name)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > normalization_tolerance:
        raise ValidationError(f"norm is {norm!r}, not 1", field=name)
    return psi


def kron(a, b):
    """Kronecker product `a ⊗ b`, with `a` as the first (ancilla) factor"""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, dim_a, dim_b, traced_factor="first"):
    """Trace out one factor of an operator on a `dim_a * dim_b` space

    Parameters
    ----------
    m : (dim_a*dim_b, dim_a*dim_b) array_like
    dim_a, dim_b : int
        Dimensions of the first and second factors.
    traced_factor : {"first", "second"}
        Which factor to remove.

    Returns
    -------
    reduced : ndarray
        Operator on the remaining factor.  Its trace equals the trace of `m`.

    """
    m = as_matrix(m)
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValidationError(
            f"shape {m.shape} does not match dim_a * dim_b = {dim_a} * {dim_b}", field="partial_trace"
        )
    m4 = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if traced_factor == "first":
        return np.einsum("irjr->ij", m4.transpose(1, 0, 3, 2))
    elif traced_factor == "second":
        return np.einsum("irjr->ij", m4)
    raise ValidationError(f"must be 'first' or 'second', not {traced_factor!r}", field="traced_factor")


def eig_hermitian(h):
    """Eigen-decomposition of a Hermitian operator

    The input is symmetrized before decomposition.  Eigenvalues are returned in
    ascending order and eigenvectors as the columns of a unitary matrix, so that
    `h = V @ diag(λ) @ V†`.  LAPACK's `heevr` driver is deterministic for a fixed
    input, which keeps every optimizer built on top of this reproducible.

    Raises
    ------
    EigenConvergenceError
        If LAPACK reports failure to converge.

    """
    h = check_hermitian(h)
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(h, driver="evr", check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenConvergenceError(f"Hermitian eigensolver failed on a {h.shape[0]}-dimensional input") from e
    return eigenvalues, eigenvectors


def eigvals_hermitian(h):
    """Ascending eigenvalues of a Hermitian operator"""
    h = check_hermitian(h)
    try:
        return scipy.linalg.eigh(h, eigvals_only=True, driver="evr", check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenConvergenceError(f"Hermitian eigensolver failed on a {h.shape[0]}-dimensional input") from e


def trace_norm(h):
    """Trace norm `‖h‖₁ = Σ|λᵢ|` of a Hermitian operator"""
    return float(np.sum(np.abs(eigvals_hermitian(h))))


def _phase_fixed(v):
    """Rotate the global phase so the first non-negligible amplitude is real and positive"""
    index = int(np.argmax(np.abs(v) > 1e-14 * np.max(np.abs(v))))
    phase = v[index] / abs(v[index])
    return v / phase


def random_pure_state(dim, seed=None):
    """Haar-random pure state of dimension `dim`

    A complex Gaussian vector is normalized; its global phase is fixed so that the
    first nonzero amplitude is positive, which leaves the induced distribution of
    states unchanged.  The result is deterministic for a given seed.

    """
    if dim < 1:
        raise ValidationError(f"must be at least 1, not {dim}", field="dim")
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi /= np.linalg.norm(psi)
    return _phase_fixed(psi)


def random_density(dim, rank=None, seed=None):
    """Random density operator of the given rank

    Draws a `dim × rank` complex Ginibre matrix `G` and returns `G G† / tr(G G†)`,
    the induced measure from Haar-random purifications.

    """
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValidationError(f"must satisfy 1 <= rank <= dim = {dim}, not {rank}", field="rank")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return (rho + rho.conj().T) / 2


def random_hermitian(dim, seed=None, scale=1.0):
    """Random Hermitian matrix from the Gaussian unitary ensemble"""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (g + g.conj().T) / 2


def random_unitary(dim, seed=None):
    """Haar-random unitary via QR of a Ginibre matrix with the diagonal phases fixed"""
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = scipy.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def maximally_entangled(k, d=None):
    """Normalized `Σ_{i<k} |i⟩|i⟩ / √k` on `k ⊗ d`, ancilla first"""
    d = k if d is None else d
    if k > d:
        raise ValidationError(f"k = {k} exceeds d = {d}", field="k")
    psi = np.zeros(k * d, dtype=complex)
    for i in range(k):
        psi[i * d + i] = 1
    return psi / np.sqrt(k)


def projector(psi):
    """Rank-one projector `|ψ⟩⟨ψ|`"""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


pauli_matrices = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
"""The identity followed by σ_x, σ_y, σ_z"""

sigma_minus = np.array([[0, 1], [0, 0]], dtype=complex)
"""Lowering operator |0⟩⟨1|, taking the excited state |1⟩ to the ground state |0⟩"""


def matrix_to_json(m):
    """Nested lists of `[re, im]` pairs, row-major, for JSON documents"""
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in m]
    return [matrix_to_json(row) for row in m]


def matrix_from_json(data, name="matrix"):
    """Inverse of `matrix_to_json`, accepting bare real numbers as entries too

    Raises
    ------
    ValidationError
        If the nesting is ragged or an entry is neither a number nor a pair.

    """
    def entry(z):
        if isinstance(z, (int, float)) and not isinstance(z, bool):
            return complex(z)
        if isinstance(z, (list, tuple)) and len(z) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in z
        ):
            return complex(z[0], z[1])
        raise ValidationError(f"entries must be numbers or [re, im] pairs, found {z!r}", field=name)

    if not isinstance(data, (list, tuple)) or len(data) == 0:
        raise ValidationError("expected a non-empty nested list", field=name)
    rows = []
    for row in data:
        if not isinstance(row, (list, tuple)) or len(row) == 0:
            raise ValidationError("expected a list of rows", field=name)
        rows.append([entry(z) for z in row])
    if len({len(row) for row in rows}) != 1:
        raise ValidationError("rows have unequal lengths", field=name)
    return as_matrix(np.array(rows, dtype=complex), name=name)
