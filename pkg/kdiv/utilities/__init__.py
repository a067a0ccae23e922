"""Various utilities used by the kdiv package"""

import functools
import numba

jit = functools.partial(numba.njit, cache=True)

from . import errors, monotonicity, parallel
from .errors import (
    KdivError, ValidationError, NonCanonicalGeneratorError, NumericalError,
    EigenConvergenceError, SingularMapError, IntegrationDriftError
)
from .kdiv_directories import kdiv_directory, read_config, write_config, default_threads
from .formats import file_format
from .pretty_print import fit_to_console
from .parallel import map_ordered
from .monotonicity import index_of_increases, largest_increase, forward_differences


def version_info():
    """Find all relevant package versions

    This function attempts to import each of the packages relevant to this
    package and returns a dictionary mapping the package names to their version
    strings.  Packages that cannot be imported are simply omitted.

    """
    import importlib
    import sys
    info = {
        "python": sys.version,
    }
    modules = ["numpy", "scipy", "numba", "h5py", "pandas", "tqdm", "inflection", "kdiv"]
    for module in modules:
        try:
            m = importlib.import_module(module)
            info[module] = m.__version__
        except Exception:
            pass
    return info
