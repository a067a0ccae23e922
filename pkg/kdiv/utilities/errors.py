"""Exception types raised throughout the kdiv package

Validation problems derive from `ValueError` and numerical failures from
`ArithmeticError`, so that callers who only know the standard library can
still catch them sensibly.  The command-line front end maps these onto its
exit codes.

"""


class KdivError(Exception):
    """Base class for all errors raised deliberately by kdiv"""


class ValidationError(KdivError, ValueError):
    """Input failed a shape, range, or semantic check

    Parameters
    ----------
    message : str
    field : str, optional
        Name of the offending parameter or configuration key, if there is one.

    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def __str__(self):
        message = super().__str__()
        if self.field is not None:
            return f"{self.field}: {message}"
        return message


class NonCanonicalGeneratorError(ValidationError):
    """Rates are not basis-invariant for the given dissipators"""


class NumericalError(KdivError, ArithmeticError):
    """A numerical procedure failed or left its trusted regime"""


class EigenConvergenceError(NumericalError):
    """The Hermitian eigensolver did not converge"""


class SingularMapError(NumericalError):
    """A map is singular or too ill-conditioned to invert

    Attributes
    ----------
    cond : float
        Condition number of the superoperator that was rejected.
    time : float or None
        Grid time at which the map was encountered, when known.

    """

    def __init__(self, message, cond=float("inf"), time=None):
        super().__init__(message)
        self.cond = cond
        self.time = time


class IntegrationDriftError(NumericalError):
    """Trace preservation drifted beyond tolerance during integration

    Attributes
    ----------
    time : float
        Grid time at which the drift was detected.
    drift : float
        Max-norm deviation of the partial trace from the identity.
    substep : float
        Integration substep in use, to help choose a smaller one.

    """

    def __init__(self, message, time, drift, substep):
        super().__init__(message)
        self.time = time
        self.drift = drift
        self.substep = substep
