"""Time-local generators, integrated dynamical maps, and divisibility scans

Quantum dynamics are described by `GKSLGenerator` objects whose rates are
functions of time; `integrate` turns them into a `MapTrajectory`, from which
`propagator` extracts intermediate maps and `divisibility_scan` tests their
k-positivity.  The classical counterparts are `KolmogorovGenerator`,
`classical_integrate`, and `StochasticTrajectory`.

"""

from . import rates, generators, integration, trajectory, divisibility, classical, trajectory_h5
from .rates import (
    RateFunction, Constant, Polynomial, Tanh, Sin, Cos, Piecewise, Transition, Sum, rate_from_config
)
from .generators import (
    GKSLGenerator, generator_superop, rates_cp_check, check_canonical, generator_from_config,
    qubit_pauli, eternal, semigroup, hamiltonian_drift,
)
from .trajectory import MapTrajectory, Propagator, integrate, propagator, propagator_map
from .divisibility import DivisibilityReport, divisibility_scan
from .classical import (
    KolmogorovGenerator, StochasticTrajectory, classical_integrate, kolmogorov_check,
    classical_propagator, is_stochastic, check_stochastic, kolmogorov_from_config, two_state, birth_death,
)

formats = {
    None: trajectory_h5,
    "": trajectory_h5,
    "trajectory.h5": trajectory_h5,
    "trajectory_h5": trajectory_h5,
}
