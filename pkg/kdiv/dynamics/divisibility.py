"""Per-time k-positivity of short-time propagators

A dynamical map is k-divisible when every propagator `Λ_{t+ε,t}` is k-positive.
The scan below tests this at every grid time for a fixed resolution `ε`; the
verdicts therefore depend on `ε`, which is recorded in the report.

"""

import logging
import numpy as np

from ..channels import maps, positivity
from ..channels.schmidt import default_restarts
from ..utilities import map_ordered
from ..utilities.errors import ValidationError, SingularMapError
from .trajectory import propagator_map

logger = logging.getLogger(__name__)


class DivisibilityReport(object):
    """Outcome of `divisibility_scan`

    Attributes
    ----------
    k : int
    epsilon : float or None
        Propagator length; None means "one grid step" on a non-uniform grid.
    times : ndarray
        Start times `t` of the tested propagators `Λ_{t+ε,t}`.
    verdicts : list of KPositivityVerdict
    singular_time : float or None
        First time at which the dynamical map could not be inverted; the scan
        stops there.

    """

    def __init__(self, k, epsilon, times, verdicts, restarts, seed, singular_time=None):
        self.k = int(k)
        self.epsilon = epsilon
        self.times = np.asarray(times, dtype=float)
        self.verdicts = list(verdicts)
        self.restarts = restarts
        self.seed = seed
        self.singular_time = singular_time

    @property
    def min_values(self):
        return np.array([v.min_value for v in self.verdicts])

    @property
    def certified(self):
        """Boolean array marking the times with a certified violation"""
        return np.array([v.certified_negative for v in self.verdicts], dtype=bool)

    @property
    def first_violation_time(self):
        certified = np.flatnonzero(self.certified)
        return float(self.times[certified[0]]) if certified.size else None

    @property
    def marginal_times(self):
        return [float(t) for t, v in zip(self.times, self.verdicts) if v.marginal]

    def to_config(self):
        return {
            "k": self.k,
            "epsilon": self.epsilon,
            "restarts": self.restarts,
            "seed": self.seed,
            "first_violation_time": self.first_violation_time,
            "singular_time": self.singular_time,
            "marginal_times": self.marginal_times,
            "scan": [
                dict(time=float(t), **verdict.to_config()) for t, verdict in zip(self.times, self.verdicts)
            ],
        }

    def __repr__(self):
        return (
            f"DivisibilityReport(k={self.k}, times={self.times.size}, "
            f"violations={int(self.certified.sum())}, first_violation_time={self.first_violation_time})"
        )


def propagator_offset(traj, epsilon):
    """Number of grid steps spanned by a propagator of length `epsilon`

    Raises
    ------
    ValidationError
        If the grid is not uniform or `epsilon` is not a positive multiple of its step.

    """
    if epsilon is None:
        return 1
    step = traj.spacing
    if step is None:
        raise ValidationError("epsilon can only be given on a uniform grid", field="epsilon")
    offset = int(round(epsilon / step))
    if offset < 1 or abs(offset * step - epsilon) > 1e-9 * max(1.0, abs(epsilon)):
        raise ValidationError(f"{epsilon} is not a positive multiple of the grid step {step}", field="epsilon")
    return offset


def divisibility_scan(traj, k, epsilon=None, restarts=default_restarts, seed=None, threads=1, progress=False):
    """Test k-positivity of `Λ_{t+ε,t}` at every grid time `t`

    Parameters
    ----------
    traj : MapTrajectory
    k : int
        `1 ≤ k ≤ d`.
    epsilon : float, optional
        Propagator length, a multiple of the grid step.  Defaults to one grid step.
    restarts, seed : optional
        Passed to `k_positivity`; every time uses the same master seed.
    threads : int, optional
        Grid times are processed concurrently on this many threads.
    progress : bool, optional
        Show a progress bar.

    Returns
    -------
    DivisibilityReport

    """
    if not 1 <= k <= traj.dim:
        raise ValidationError(f"must satisfy 1 <= k <= {traj.dim}, not {k}", field="k")
    offset = propagator_offset(traj, epsilon)
    if epsilon is None and traj.spacing is not None:
        epsilon = traj.spacing
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)
    starts = list(range(len(traj) - offset))

    singular_time = None
    usable = []
    for i in starts:
        try:
            maps.invert(traj[i], time=float(traj.grid[i]))
        except SingularMapError as e:
            logger.warning("Stopping the scan at t = %.6g: %s", traj.grid[i], e)
            singular_time = e.time
            break
        usable.append(i)

    def verdict(i):
        m = propagator_map(traj, i, i + offset)
        return positivity.k_positivity(m, k, restarts=restarts, seed=seed)

    verdicts = map_ordered(verdict, usable, threads=threads, progress=progress, desc=f"{k}-positivity scan")
    report = DivisibilityReport(k, epsilon, traj.grid[usable], verdicts, restarts, seed, singular_time=singular_time)
    logger.info("%r", report)
    return report
