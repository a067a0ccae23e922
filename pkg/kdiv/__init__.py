"""Operational witnesses of k-divisibility for quantum dynamical maps

A dynamical map is k-divisible when every propagator between two times is
k-positive.  This package integrates time-local generators into dynamical maps,
tests the k-positivity of their propagators, and witnesses violations
operationally: the ancilla-assisted distinguishability `D_k` of two channels
evolved by a k-divisible map never increases in time.

"""

try:
    import importlib.metadata as importlib_metadata
except ModuleNotFoundError:  # pragma: no cover
    import importlib_metadata

try:
    __version__ = importlib_metadata.version(__name__)
except importlib_metadata.PackageNotFoundError:  # pragma: no cover
    from .__version__ import __version__

from . import utilities
from .utilities import (
    file_format, kdiv_directory, read_config, write_config, jit, version_info,
    KdivError, ValidationError, NumericalError, SingularMapError, IntegrationDriftError,
)
from . import linops, channels, dynamics, discrimination
from .channels import HermitianMap, Channel, SchmidtVector, k_positivity
from .dynamics import (
    GKSLGenerator, KolmogorovGenerator, MapTrajectory, StochasticTrajectory,
    integrate, classical_integrate, propagator, divisibility_scan,
)
from .discrimination import (
    DiscriminationInstance, channel_distinguishability, hierarchy_check, monotonicity_trace,
    classical_monotonicity_trace, min_entropy, witness_search,
)
from .handlers import load, loadcontext
