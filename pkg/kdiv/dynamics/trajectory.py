"""Dynamical maps sampled on a time grid, and the propagators between grid times"""

import logging
import numpy as np

from ..channels import maps
from ..utilities.errors import ValidationError, SingularMapError
from .integration import rk4, check_grid, check_drift, default_max_substep

logger = logging.getLogger(__name__)

trajectory_tp_tolerance = 1e-7
grid_matching_tolerance = 1e-9


class MapTrajectory(object):
    """Dynamical map `Λ_t` sampled at the times of `grid`

    Parameters
    ----------
    grid : 1-d array
        Strictly increasing times starting at 0.
    superops : (len(grid), d², d²) array
        Superoperator of `Λ_t` at each grid time.
    source : GKSLGenerator, optional
        The generator this trajectory was integrated from.
    max_substep : float, optional
        Recorded integration substep.
    drift : 1-d array, optional
        Trace-preservation drift observed at each grid time.

    """

    def __init__(self, grid, superops, source=None, max_substep=None, drift=None):
        self.grid = check_grid(grid)
        superops = np.asarray(superops, dtype=complex)
        if superops.ndim != 3 or superops.shape[0] != self.grid.size or superops.shape[1] != superops.shape[2]:
            raise ValidationError(
                f"expected shape ({self.grid.size}, d², d²), got {superops.shape}", field="superops"
            )
        self.dim = int(round(np.sqrt(superops.shape[1])))
        if self.dim**2 != superops.shape[1]:
            raise ValidationError(f"{superops.shape[1]} is not a square dimension", field="superops")
        self.superops = superops
        self.superops.setflags(write=False)
        self.source = source
        self.max_substep = max_substep
        self.drift = np.zeros(self.grid.size) if drift is None else np.asarray(drift, dtype=float)
        self._channels = {}

    @property
    def times(self):
        return self.grid

    def __len__(self):
        return self.grid.size

    def __getitem__(self, i):
        """Channel `Λ_t` at grid index `i`"""
        i = range(self.grid.size)[i]
        if i not in self._channels:
            self._channels[i] = maps.Channel(
                self.superops[i], self.dim, self.dim, check=False, tp_tolerance=trajectory_tp_tolerance
            )
        return self._channels[i]

    @property
    def maps(self):
        return [self[i] for i in range(self.grid.size)]

    def index(self, t):
        """Grid index of time `t`

        Raises
        ------
        ValidationError
            If `t` is not a grid time.

        """
        i = int(np.argmin(np.abs(self.grid - t)))
        if abs(self.grid[i] - t) > grid_matching_tolerance * max(1.0, abs(t)):
            raise ValidationError(f"t = {t} is not on the grid", field="t")
        return i

    def at(self, t):
        return self[self.index(t)]

    @property
    def spacing(self):
        """Common grid step, or None if the grid is not uniform"""
        if self.grid.size < 2:
            return None
        steps = np.diff(self.grid)
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=0):
            return None
        return float(steps[0])

    def __repr__(self):
        return f"MapTrajectory(dim={self.dim}, times={self.grid.size}, t_max={self.grid[-1]:.6g})"


class Propagator(object):
    """Map `Λ_{t,s}` carrying states at time `s` to time `t`"""

    def __init__(self, s, t, map):
        self.s, self.t, self.map = float(s), float(t), map

    def trace_preservation_error(self):
        return maps.trace_preservation_error(self.map)

    def __repr__(self):
        return f"Propagator(s={self.s:.6g}, t={self.t:.6g})"


def integrate(g, grid, max_substep=default_max_substep):
    """Integrate `dΛ_t/dt = L_t Λ_t` from `Λ_0 = id` over `grid`

    Classic fourth-order Runge–Kutta on the superoperator, with every grid
    interval split into equal substeps no longer than `max_substep`.

    Raises
    ------
    IntegrationDriftError
        If trace preservation drifts by more than 1e-6.

    """
    grid = check_grid(grid)
    d2 = g.dim**2
    superops = rk4(g.term_superops, g.coefficients, grid, np.eye(d2, dtype=complex), max_substep=max_substep)
    drift = check_drift(superops, grid, np.eye(g.dim, dtype=complex).reshape(-1), max_substep)
    logger.info("Integrated %r over %d grid times up to t = %.6g", g, grid.size, grid[-1])
    return MapTrajectory(grid, superops, source=g, max_substep=max_substep, drift=drift)


def propagator(traj, s, t, cond_threshold=maps.default_cond_threshold):
    """Propagator `Λ_{t,s} = Λ_t ∘ Λ_s⁻¹` between two grid times

    Raises
    ------
    SingularMapError
        If `Λ_s` is not invertible to within `cond_threshold`; divisibility is
        undefined beyond this time.

    """
    if t < s:
        raise ValidationError(f"needs t >= s, got s = {s}, t = {t}", field="t")
    i, j = traj.index(s), traj.index(t)
    return Propagator(traj.grid[i], traj.grid[j], propagator_map(traj, i, j, cond_threshold))


def propagator_map(traj, i, j, cond_threshold=maps.default_cond_threshold):
    """Propagator from grid index `i` to grid index `j` as a HermitianMap"""
    if i == j:
        return maps.identity(traj.dim).as_map()
    try:
        inverse = maps.invert(traj[i], cond_threshold=cond_threshold, time=float(traj.grid[i]))
    except SingularMapError as e:
        logger.warning("Dynamical map is not invertible at t = %.6g (cond = %.3e)", traj.grid[i], e.cond)
        raise
    return maps.compose(traj[j].as_map(), inverse)
