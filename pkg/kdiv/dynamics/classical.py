"""Classical Markov dynamics: Kolmogorov generators and stochastic-matrix trajectories

Probability vectors are columns, so a stochastic matrix has nonnegative entries
with unit column sums and the master equation reads `dT/dt = K(t) T(t)`.

"""

import logging
import numpy as np
import inflection

from .. import linops
from ..utilities.errors import ValidationError, SingularMapError
from .rates import rate_from_config
from .integration import rk4, check_grid, check_drift, default_max_substep

logger = logging.getLogger(__name__)

kolmogorov_tolerance = 1e-12
stochastic_tolerance = 1e-9


def is_stochastic(s, tolerance=stochastic_tolerance):
    """Whether every column of `s` is a probability vector to within `tolerance`"""
    s = np.asarray(s)
    if np.iscomplexobj(s):
        if np.max(np.abs(s.imag), initial=0.0) > tolerance:
            return False
        s = s.real
    return bool(
        s.ndim == 2 and np.all(s >= -tolerance) and np.all(np.abs(s.sum(axis=0) - 1) <= tolerance)
    )


def check_stochastic(s, name="stochastic matrix"):
    """Return `s` as a real array, rejecting anything whose columns are not probability vectors"""
    s = np.asarray(s)
    if np.iscomplexobj(s):
        s = linops.as_matrix(s, name=name)
        if np.max(np.abs(s.imag), initial=0.0) > stochastic_tolerance:
            raise ValidationError("entries must be real", field=name)
    s = np.asarray(np.real(s), dtype=float)
    if s.ndim != 2 or s.shape[0] == 0:
        raise ValidationError(f"expected a 2-d array, got shape {s.shape}", field=name)
    if not is_stochastic(s):
        raise ValidationError("columns must be probability vectors", field=name)
    return s


class KolmogorovGenerator(object):
    """Time-dependent rate matrix `K(t) = Σ_j c_j(t) K_j`

    Parameters
    ----------
    dim : int
    terms : list of (matrix, RateFunction) pairs
    config : dict, optional
        Serialized form echoed into reports.

    """

    def __init__(self, dim, terms=(), config=None):
        self.dim = int(dim)
        self.terms = []
        for j, (matrix, coefficient) in enumerate(terms):
            matrix = np.asarray(matrix)
            if np.iscomplexobj(matrix) and np.max(np.abs(matrix.imag), initial=0.0) > 0:
                raise ValidationError("rate matrices must be real", field=f"terms[{j}]")
            matrix = np.asarray(np.real(matrix), dtype=float)
            if matrix.shape != (self.dim, self.dim):
                raise ValidationError(f"shape {matrix.shape} does not match dim = {self.dim}", field=f"terms[{j}]")
            self.terms.append((matrix, rate_from_config(coefficient, name=f"terms[{j}]")))
        self._config = config

    @property
    def term_matrices(self):
        if not self.terms:
            return np.zeros((0, self.dim, self.dim))
        return np.array([m for m, _ in self.terms])

    def coefficients(self, times):
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if not self.terms:
            return np.zeros((times.size, 0))
        return np.stack([np.atleast_1d(f(times)) for _, f in self.terms], axis=1)

    def __call__(self, t):
        """The rate matrix `K(t)`"""
        k = np.zeros((self.dim, self.dim))
        for matrix, f in self.terms:
            k += f(float(t)) * matrix
        return k

    def to_config(self):
        if self._config is not None:
            return self._config
        return {
            "kind": "classical",
            "dim": self.dim,
            "terms": [{"matrix": m.tolist(), "coefficient": f.to_config()} for m, f in self.terms],
        }

    def __repr__(self):
        return f"KolmogorovGenerator(dim={self.dim}, terms={len(self.terms)})"


def kolmogorov_check(K, t, tolerance=kolmogorov_tolerance):
    """Whether `K(t)` has nonnegative off-diagonal rates and zero column sums

    `K` may be a KolmogorovGenerator or a fixed matrix.

    """
    k = K(t) if callable(K) else np.asarray(K, dtype=float)
    off_diagonal = k - np.diag(np.diag(k))
    return bool(np.all(off_diagonal >= -tolerance) and np.all(np.abs(k.sum(axis=0)) <= tolerance))


class StochasticTrajectory(object):
    """Transition matrices `T(t)` sampled on a time grid, with `T(0) = I`"""

    def __init__(self, grid, matrices, source=None, max_substep=None, drift=None):
        self.grid = check_grid(grid)
        self.matrices = np.asarray(matrices, dtype=float)
        if self.matrices.ndim != 3 or self.matrices.shape[0] != self.grid.size:
            raise ValidationError(f"expected shape ({self.grid.size}, n, n), got {self.matrices.shape}", field="matrices")
        self.matrices.setflags(write=False)
        self.dim = self.matrices.shape[1]
        self.source = source
        self.max_substep = max_substep
        self.drift = np.zeros(self.grid.size) if drift is None else drift

    def __len__(self):
        return self.grid.size

    def __getitem__(self, i):
        return self.matrices[i]

    def index(self, t):
        i = int(np.argmin(np.abs(self.grid - t)))
        if abs(self.grid[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValidationError(f"t = {t} is not on the grid", field="t")
        return i

    @property
    def stochastic(self):
        """Boolean array: whether `T(t)` is a stochastic matrix at each grid time"""
        return np.array([is_stochastic(m) for m in self.matrices], dtype=bool)

    def __repr__(self):
        return f"StochasticTrajectory(dim={self.dim}, times={self.grid.size}, t_max={self.grid[-1]:.6g})"


def classical_integrate(K, grid, max_substep=default_max_substep):
    """Integrate `dT/dt = K(t) T` from `T(0) = I` with the same fixed-step RK4 as the quantum case

    Raises
    ------
    IntegrationDriftError
        If column sums drift by more than 1e-6.

    """
    grid = check_grid(grid)
    matrices = rk4(K.term_matrices, K.coefficients, grid, np.eye(K.dim), max_substep=max_substep)
    drift = check_drift(matrices, grid, np.ones(K.dim), max_substep)
    logger.info("Integrated %r over %d grid times up to t = %.6g", K, grid.size, grid[-1])
    return StochasticTrajectory(grid, matrices, source=K, max_substep=max_substep, drift=drift)


def classical_propagator(traj, s, t, cond_threshold=1e10):
    """Transition matrix `T(t) T(s)⁻¹` between two grid times

    Raises
    ------
    SingularMapError
        If `T(s)` is not invertible to within `cond_threshold`.

    """
    if t < s:
        raise ValidationError(f"needs t >= s, got s = {s}, t = {t}", field="t")
    i, j = traj.index(s), traj.index(t)
    return classical_propagator_matrix(traj, i, j, cond_threshold)


def classical_propagator_matrix(traj, i, j, cond_threshold=1e10):
    if i == j:
        return np.eye(traj.dim)
    cond = float(np.linalg.cond(traj[i]))
    if not np.isfinite(cond) or cond > cond_threshold:
        raise SingularMapError(
            f"transition matrix condition number {cond:.3e} exceeds {cond_threshold:.1e}",
            cond=cond, time=float(traj.grid[i]),
        )
    return np.linalg.solve(traj[i].T, traj[j].T).T


def two_state(a=1.0, b=1.0):
    """Flips `0 → 1` at rate `a` and `1 → 0` at rate `b`; `K = [[-a, b], [a, -b]]`"""
    config = {"kind": "classical", "preset": "two_state", "params": {"a": _echo(a), "b": _echo(b)}}
    return KolmogorovGenerator(2, [(np.array([[-1.0, 0], [1.0, 0]]), a), (np.array([[0, 1.0], [0, -1.0]]), b)], config)


def birth_death(n=3, birth=1.0, death=1.0):
    """Chain on `n` states moving up at rate `birth` and down at rate `death`"""
    up = np.zeros((n, n))
    down = np.zeros((n, n))
    for j in range(n - 1):
        up[j + 1, j], up[j, j] = 1.0, -1.0
        down[j, j + 1], down[j + 1, j + 1] = 1.0, -1.0
    config = {"kind": "classical", "preset": "birth_death", "params": {"n": n, "birth": _echo(birth), "death": _echo(death)}}
    return KolmogorovGenerator(n, [(up, birth), (down, death)], config)


def _echo(rate):
    return rate_from_config(rate).to_config()


presets = {"two_state": two_state, "birth_death": birth_death}


def kolmogorov_from_config(block, name="generator"):
    """Build a classical generator from `{"kind": "classical", ...}`

    Either `"preset"` with `"params"`, or `"dim"` with a list of
    `{"matrix", "coefficient"}` terms.

    """
    if not isinstance(block, dict):
        raise ValidationError("expected an object", field=name)
    if "preset" in block:
        preset = inflection.underscore(str(block["preset"])).replace("-", "_")
        if preset not in presets:
            raise ValidationError(f"unknown preset {block['preset']!r}; choose from {sorted(presets)}", field=name)
        params = block.get("params", {})
        try:
            return presets[preset](**params)
        except TypeError as e:
            raise ValidationError(f"bad params for preset {preset!r}: {e}", field=f"{name}.params") from e
    terms = block.get("terms")
    if not isinstance(terms, list) or not terms:
        raise ValidationError("expected a non-empty 'terms' list", field=name)
    parsed = []
    for j, term in enumerate(terms):
        if not isinstance(term, dict) or "matrix" not in term:
            raise ValidationError("expected an object with a 'matrix'", field=f"{name}.terms[{j}]")
        parsed.append((linops.matrix_from_json(term["matrix"], name=f"{name}.terms[{j}]"), term.get("coefficient", 1.0)))
    dim = block.get("dim", parsed[0][0].shape[0])
    return KolmogorovGenerator(dim, parsed)
