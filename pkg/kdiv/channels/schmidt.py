"""Schmidt-rank-constrained pure states and the seesaw optimizer over them

A state of Schmidt rank at most `k` on `dim_a ⊗ dim_b` is parametrized as
`φ = vec(L R†)` with `L` of shape `(dim_a, k)` and `R` of shape `(dim_b, k)`.
With either factor fixed, `⟨φ|h|φ⟩` is a Hermitian quadratic form in the other,
so its extremum over unit vectors is an eigenvalue problem solved exactly.
Alternating the two exact steps gives a monotone sequence of achieved values.

"""

import logging
import numpy as np
import scipy.linalg

from .. import linops
from ..utilities import map_ordered
from ..utilities.errors import ValidationError, NumericalError

logger = logging.getLogger(__name__)

rank_tolerance = 1e-9
seesaw_tolerance = 1e-10
seesaw_max_iterations = 500
default_restarts = 32


class SchmidtVector(object):
    """Unit vector `vec(L R†)` of Schmidt rank at most `k`

    The factors are rescaled on construction so that the state is normalized.

    Parameters
    ----------
    left : (dim_a, k) array_like
    right : (dim_b, k) array_like

    """

    def __init__(self, left, right):
        left = np.array(left, dtype=complex)
        right = np.array(right, dtype=complex)
        if left.ndim != 2 or right.ndim != 2 or left.shape[1] != right.shape[1]:
            raise ValidationError(
                f"factors must be 2-d with equal column counts, got {left.shape} and {right.shape}", field="schmidt"
            )
        norm = np.linalg.norm(left @ right.conj().T)
        if not np.isfinite(norm) or norm == 0:
            raise ValidationError("factors produce the zero vector", field="schmidt")
        left /= norm
        left.setflags(write=False)
        right.setflags(write=False)
        self._left, self._right = left, right

    @classmethod
    def from_state(cls, psi, dim_a, dim_b, k=None):
        """Truncated Schmidt decomposition of `psi` keeping at most `k` terms

        With `k` at least the Schmidt rank of `psi` this reproduces `psi` exactly.

        """
        psi = np.asarray(psi, dtype=complex)
        if psi.shape != (dim_a * dim_b,):
            raise ValidationError(f"length {psi.shape} does not match {dim_a} * {dim_b}", field="psi")
        k = min(dim_a, dim_b) if k is None else int(k)
        u, s, vh = scipy.linalg.svd(psi.reshape(dim_a, dim_b), full_matrices=False)
        return cls(u[:, :k] * s[:k], vh[:k].conj().T)

    @property
    def rank_bound(self):
        return self._left.shape[1]

    k = rank_bound

    @property
    def dim_a(self):
        return self._left.shape[0]

    @property
    def dim_b(self):
        return self._right.shape[0]

    @property
    def left_factor(self):
        return self._left

    @property
    def right_factor(self):
        return self._right

    @property
    def state(self):
        """The normalized vector, ancilla (first factor) index major"""
        return (self._left @ self._right.conj().T).reshape(-1)

    def expectation(self, h):
        """`⟨φ|h|φ⟩` for a Hermitian operator on `dim_a ⊗ dim_b`"""
        psi = self.state
        return float(np.real(psi.conj() @ (np.asarray(h) @ psi)))

    def coefficients(self):
        """Nonincreasing Schmidt coefficients of the state"""
        return scipy.linalg.svd(self.state.reshape(self.dim_a, self.dim_b), compute_uv=False)

    def numerical_rank(self, tolerance=rank_tolerance):
        """Number of Schmidt coefficients above `tolerance`"""
        return int(np.sum(self.coefficients() > tolerance))

    def padded(self, k):
        """The same state with rank bound raised to `k` by zero columns"""
        extra = k - self.rank_bound
        if extra < 0:
            raise ValidationError(f"cannot pad rank bound {self.rank_bound} down to {k}", field="k")
        return SchmidtVector(
            np.hstack([self._left, np.zeros((self.dim_a, extra))]),
            np.hstack([self._right, np.zeros((self.dim_b, extra))]),
        )

    def embedded(self, dim_a):
        """The same state with the first factor embedded in a larger space of dimension `dim_a`"""
        extra = dim_a - self.dim_a
        if extra < 0:
            raise ValidationError(f"cannot embed dimension {self.dim_a} into {dim_a}", field="dim_a")
        return SchmidtVector(np.vstack([self._left, np.zeros((extra, self.rank_bound))]), self._right)

    def to_config(self):
        return {
            "k": self.rank_bound,
            "dims": [self.dim_a, self.dim_b],
            "left": linops.matrix_to_json(self._left),
            "right": linops.matrix_to_json(self._right),
        }

    @classmethod
    def from_config(cls, block, name="witness"):
        if not isinstance(block, dict) or "left" not in block or "right" not in block:
            raise ValidationError("expected an object with 'left' and 'right' factors", field=name)
        left = linops.matrix_from_json(block["left"], name=f"{name}.left")
        right = linops.matrix_from_json(block["right"], name=f"{name}.right")
        vector = cls(left, right)
        if "dims" in block and list(block["dims"]) != [vector.dim_a, vector.dim_b]:
            raise ValidationError(f"dims {block['dims']} disagree with the factors", field=name)
        return vector

    def __repr__(self):
        return f"SchmidtVector(k={self.rank_bound}, dims=({self.dim_a}, {self.dim_b}))"


def schmidt_decompose(psi, dim_a, dim_b):
    """Full Schmidt decomposition of a pure state

    Returns
    -------
    vector : SchmidtVector
        Rank bound `min(dim_a, dim_b)`, with `left = U·diag(λ)` and `right = V`.
    coefficients : ndarray
        Nonincreasing, nonnegative, with squares summing to 1.

    """
    psi = linops.check_pure(psi, name="psi")
    if psi.size != dim_a * dim_b:
        raise ValidationError(f"length {psi.size} does not match {dim_a} * {dim_b}", field="psi")
    u, s, vh = scipy.linalg.svd(psi.reshape(dim_a, dim_b), full_matrices=False)
    return SchmidtVector(u * s, vh.conj().T), s


def schmidt_rank(psi, dim_a, dim_b, tolerance=rank_tolerance):
    """Number of Schmidt coefficients above `tolerance`"""
    return int(np.sum(schmidt_decompose(psi, dim_a, dim_b)[1] > tolerance))


def _extremal_vector(h, sign):
    """Eigenpair of `h` maximizing `sign * λ`"""
    values, vectors = linops.eig_hermitian(-sign * h)
    return -sign * values[0], vectors[:, 0]


def _seesaw(h, dim_a, dim_b, left, right, sign, tolerance, max_iterations):
    """Alternate exact updates of the two factors from a starting point

    Each half-step orthonormalizes the fixed factor `Q` and optimizes over
    `vec(X Q†)` (or `vec(Q X)`), a subspace that contains the current point, so
    the value can only improve.

    """
    eye_a, eye_b = np.eye(dim_a), np.eye(dim_b)
    k = left.shape[1]
    value = sign * SchmidtVector(left, right).expectation(h)
    history = [value]
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        q, _ = scipy.linalg.qr(right, mode="economic")
        b = np.kron(eye_a, q.conj())
        _, x = _extremal_vector(b.conj().T @ h @ b, sign)
        left, right = x.reshape(dim_a, k), q

        q, _ = scipy.linalg.qr(left, mode="economic")
        c = np.kron(q, eye_b)
        reduced, x = _extremal_vector(c.conj().T @ h @ c, sign)
        left, right = q, x.reshape(k, dim_b).conj().T

        new_value = sign * reduced
        history.append(new_value)
        if new_value < value - 1e-9 * (1 + abs(value)):
            raise NumericalError(
                f"seesaw objective worsened from {sign * value!r} to {sign * new_value!r} at iteration {iterations}"
            )
        change = abs(new_value - value) / max(1.0, abs(new_value))
        value = new_value
        if change < tolerance:
            break
    return SchmidtVector(left, right), iterations, history


def extremize_schmidt_k(
    h, dim_a, dim_b, k, direction="min", restarts=default_restarts, seed=None, initial=None, threads=1,
    tolerance=seesaw_tolerance, max_iterations=seesaw_max_iterations, stop_beyond=None, patience=None,
    full_output=False,
):
    """Extremize `⟨φ|h|φ⟩` over unit vectors of Schmidt rank at most `k`

    Parameters
    ----------
    h : Hermitian operator on `dim_a ⊗ dim_b`
    dim_a, dim_b : int
    k : int
        Rank bound, `1 ≤ k ≤ min(dim_a, dim_b)`.  At the upper limit the problem
        is an ordinary eigenvalue problem and is solved directly.
    direction : {"min", "max"}
    restarts : int, optional
        Number of random starting points.  Defaults to 32.
    seed : int, optional
        Master seed; restart `i` uses `numpy.random.default_rng([seed, i])`.
    initial : SchmidtVector or sequence of them, optional
        Warm starts, run before the random restarts.
    threads : int, optional
        Restarts are spread over this many threads; the result does not depend on it.
    stop_beyond : float, optional
        Stop at the first start whose value lies beyond this one in the search
        direction (below it for "min").
    patience : int, optional
        Stop once this many consecutive starts fail to improve on the best value.
    full_output : bool, optional
        Also return the number of starts that were run.

    Returns
    -------
    value : float
        The objective at `witness`, always an achieved value.
    witness : SchmidtVector
    starts_used : int
        Only with `full_output=True`.

    """
    h = linops.check_hermitian(h, tolerance=linops.hermiticity_tolerance * max(1.0, float(np.max(np.abs(h)))), name="h")
    if h.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValidationError(f"shape {h.shape} does not match {dim_a} * {dim_b}", field="h")
    if not 1 <= k <= min(dim_a, dim_b):
        raise ValidationError(f"must satisfy 1 <= k <= min({dim_a}, {dim_b}), not {k}", field="k")
    if direction not in ("min", "max"):
        raise ValidationError(f"must be 'min' or 'max', not {direction!r}", field="direction")
    if int(restarts) < 0:
        raise ValidationError(f"must be nonnegative, not {restarts}", field="restarts")
    if patience is not None and int(patience) < 1:
        raise ValidationError(f"must be at least 1, not {patience}", field="patience")
    sign = 1 if direction == "max" else -1

    if k == min(dim_a, dim_b):
        _, vector = _extremal_vector(h, sign)
        witness = SchmidtVector.from_state(vector, dim_a, dim_b, k)
        value = witness.expectation(h)
        return (value, witness, 0) if full_output else (value, witness)

    if initial is None:
        initial = []
    elif isinstance(initial, SchmidtVector):
        initial = [initial]
    starts = []
    for vector in initial:
        if vector.rank_bound > k or (vector.dim_a, vector.dim_b) != (dim_a, dim_b):
            raise ValidationError(f"warm start {vector!r} does not fit k={k} on ({dim_a}, {dim_b})", field="initial")
        vector = vector.padded(k)
        starts.append((vector.left_factor, vector.right_factor))
    if seed is None:
        seed = np.random.SeedSequence().entropy
    for index in range(int(restarts)):
        rng = np.random.default_rng([seed, index])
        left = rng.standard_normal((dim_a, k)) + 1j * rng.standard_normal((dim_a, k))
        right = rng.standard_normal((dim_b, k)) + 1j * rng.standard_normal((dim_b, k))
        starts.append((left, right))
    if not starts:
        raise ValidationError("need at least one restart or warm start", field="restarts")

    def run(start):
        return _seesaw(h, dim_a, dim_b, start[0], start[1], sign, tolerance, max_iterations)

    # Stopping rules only look at earlier starts, so `threads` cannot change the result
    target = None if stop_beyond is None else sign * stop_beyond
    chunk = max(1, int(threads or 1)) if (target is not None or patience is not None) else len(starts)
    best_value, best_witness = None, None
    stale, used, max_iterations_seen = 0, 0, 0
    done = False
    for offset in range(0, len(starts), chunk):
        for witness, iterations, history in map_ordered(run, starts[offset:offset + chunk], threads=threads):
            used += 1
            max_iterations_seen = max(max_iterations_seen, iterations)
            value = sign * witness.expectation(h)
            if best_value is None or value > best_value + 1e-9 * (1 + abs(best_value)):
                stale = 0
            else:
                stale += 1
            if best_value is None or value > best_value:
                best_value, best_witness = value, witness
            if (target is not None and best_value > target) or (patience is not None and stale >= int(patience)):
                done = True
                break
        if done:
            break
    logger.debug(
        "Schmidt-rank-%d %s over %d of %d starts: %.12g (iterations: max %d)",
        k, direction, used, len(starts), sign * best_value, max_iterations_seen,
    )
    if full_output:
        return sign * best_value, best_witness, used
    return sign * best_value, best_witness
