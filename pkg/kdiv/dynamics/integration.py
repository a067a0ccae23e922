"""Fixed-step fourth-order Runge–Kutta for linear matrix ODEs `dX/dt = G(t) X`

The generator is a linear combination `G(t) = Σ_j c_j(t) G_j` of fixed matrices.
All coefficients are evaluated up front at the start, midpoint, and end of
every substep, and the stepping itself runs in a compiled kernel.  The same
kernel serves quantum superoperators (complex) and classical rate matrices
(real).

"""

import logging
import numpy as np

from ..utilities import jit
from ..utilities.errors import ValidationError, IntegrationDriftError

logger = logging.getLogger(__name__)

default_max_substep = 1e-3
drift_tolerance = 1e-6


@jit
def _combine(terms, coefficients, out):
    out[:, :] = 0
    for j in range(terms.shape[0]):
        out += coefficients[j] * terms[j]
    return out


@jit
def _rk4_kernel(terms, coefficients, steps, substeps, initial, output):
    """Integrate from `initial`, storing the state at the end of every interval

    `coefficients[s, m]` holds the coefficients at the start (m=0), midpoint
    (m=1), and end (m=2) of substep `s`, whose length is `steps[s]`.  Interval
    `i` is made of `substeps[i]` consecutive substeps.

    """
    state = initial.copy()
    g0, g1, g2 = np.zeros_like(initial), np.zeros_like(initial), np.zeros_like(initial)
    output[0] = state
    s = 0
    for i in range(substeps.size):
        for _ in range(substeps[i]):
            h = steps[s]
            _combine(terms, coefficients[s, 0], g0)
            _combine(terms, coefficients[s, 1], g1)
            _combine(terms, coefficients[s, 2], g2)
            k1 = g0 @ state
            k2 = g1 @ (state + (h / 2) * k1)
            k3 = g1 @ (state + (h / 2) * k2)
            k4 = g2 @ (state + h * k3)
            state = state + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            s += 1
        output[i + 1] = state
    return output


def check_grid(grid):
    """Return `grid` as a float array starting at 0 and strictly increasing"""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValidationError("must be a non-empty 1-d sequence of times", field="grid")
    if not np.all(np.isfinite(grid)):
        raise ValidationError("times must be finite", field="grid")
    if grid[0] != 0:
        raise ValidationError(f"must start at t = 0, not {grid[0]}", field="grid")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("times must be strictly increasing", field="grid")
    return grid


def substep_counts(grid, max_substep=default_max_substep):
    """Number of equal substeps needed in each grid interval so none exceeds `max_substep`"""
    if not max_substep > 0:
        raise ValidationError(f"must be positive, not {max_substep}", field="max_substep")
    spacing = np.diff(grid)
    return np.maximum(1, np.ceil(spacing / max_substep - 1e-9)).astype(np.int64)


def rk4(terms, coefficient_function, grid, initial, max_substep=default_max_substep):
    """Integrate `dX/dt = (Σ_j c_j(t) G_j) X` over `grid`

    Parameters
    ----------
    terms : (n_terms, D, D) array_like
    coefficient_function : callable
        Maps an array of times to an array of shape `(len(times), n_terms)`.
    grid : 1-d array
        Output times; the solution at `grid[0]` is `initial`.
    initial : (D, D) array_like
    max_substep : float, optional
        Largest substep, default 1e-3.

    Returns
    -------
    states : ndarray of shape `(len(grid), D, D)`

    """
    initial = np.ascontiguousarray(initial)
    dtype = np.result_type(initial.dtype, np.asarray(terms).dtype)
    terms = np.ascontiguousarray(terms, dtype=dtype)
    initial = initial.astype(dtype)
    substeps = substep_counts(grid, max_substep)
    starts = np.concatenate([
        np.linspace(grid[i], grid[i + 1], n, endpoint=False) for i, n in enumerate(substeps)
    ]) if substeps.size else np.zeros(0)
    steps = np.repeat(np.diff(grid) / substeps, substeps) if substeps.size else np.zeros(0)
    sample_times = np.stack([starts, starts + steps / 2, starts + steps], axis=1)
    if terms.shape[0]:
        coefficients = np.asarray(coefficient_function(sample_times.ravel()), dtype=float)
        coefficients = coefficients.reshape(starts.size, 3, terms.shape[0]).astype(dtype)
    else:
        coefficients = np.zeros((starts.size, 3, 0), dtype=dtype)
    logger.debug("RK4 over %d grid intervals with %d substeps", substeps.size, starts.size)
    output = np.empty((substeps.size + 1,) + initial.shape, dtype=dtype)
    return _rk4_kernel(terms, np.ascontiguousarray(coefficients), steps, substeps, initial, output)


def check_drift(states, grid, conserved_row, max_substep, tolerance=drift_tolerance):
    """Raise if `conserved_row @ state` wanders from `conserved_row` anywhere along the trajectory

    For superoperators the row is `vec(I)` (trace preservation); for stochastic
    matrices it is the all-ones row (probability conservation).

    Returns
    -------
    drift : ndarray
        Largest deviation at each grid time.

    Raises
    ------
    IntegrationDriftError

    """
    deviations = np.abs(np.einsum("j,tjk->tk", conserved_row, states) - conserved_row[np.newaxis, :])
    drift = deviations.max(axis=1) if deviations.size else np.zeros(len(grid))
    bad = np.flatnonzero(drift > tolerance)
    if bad.size:
        i = bad[0]
        raise IntegrationDriftError(
            f"conservation drift {drift[i]:.3e} exceeds {tolerance:.1e} at t = {grid[i]:.6g}; "
            f"reduce the substep (currently at most {max_substep:.3g})",
            time=float(grid[i]), drift=float(drift[i]), substep=float(max_substep),
        )
    logger.debug("Largest conservation drift along trajectory: %.3e", drift.max(initial=0.0))
    return drift
