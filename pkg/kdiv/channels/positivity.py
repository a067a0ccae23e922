"""k-positivity verdicts for Hermitian maps

A square map is k-positive iff `⟨φ|C|φ⟩ ≥ 0` for its Choi matrix `C` and every
vector `φ` of Schmidt rank at most `k`.  Deciding this is hard in general, so
verdicts are three-valued in effect: a value below `-certificate_tolerance` at
an explicit witness is a rigorous disproof ("certified_negative"), while a
search that finds nothing only supports positivity ("presumed_positive").

"""

import logging
import warnings
import numpy as np

from .. import linops
from ..utilities.errors import ValidationError
from .maps import apply, apply_extended
from .schmidt import SchmidtVector, extremize_schmidt_k, default_restarts

logger = logging.getLogger(__name__)

certificate_tolerance = 1e-8
marginal_threshold = 1e-10
default_patience = 8
verdict_max_iterations = 200

CERTIFIED_NEGATIVE = "certified_negative"
PRESUMED_POSITIVE = "presumed_positive"


class KPositivityVerdict(object):
    """Outcome of a k-positivity search

    Attributes
    ----------
    k : int
    outcome : {"certified_negative", "presumed_positive"}
    min_value : float
        Smallest `⟨φ|C|φ⟩` achieved, attained at `witness`.
    witness : SchmidtVector
    restarts_used : int
    marginal : bool
        True for presumed-positive verdicts whose minimum lies within the
        certificate tolerance below zero.

    """

    def __init__(self, k, min_value, witness, restarts_used, tolerance=certificate_tolerance):
        self.k = int(k)
        self.min_value = float(min_value)
        self.witness = witness
        self.restarts_used = int(restarts_used)
        self.tolerance = float(tolerance)
        self.outcome = CERTIFIED_NEGATIVE if self.min_value < -self.tolerance else PRESUMED_POSITIVE
        self.marginal = self.outcome == PRESUMED_POSITIVE and self.min_value < -marginal_threshold

    @property
    def certified_negative(self):
        return self.outcome == CERTIFIED_NEGATIVE

    def revalidate(self, m, tolerance=1e-8):
        """Re-evaluate the witness on the Choi matrix of `m`; True if it reproduces `min_value`"""
        return abs(self.witness.expectation(m.choi) - self.min_value) <= tolerance

    def to_config(self):
        return {
            "k": self.k,
            "outcome": self.outcome,
            "min_value": self.min_value,
            "marginal": self.marginal,
            "restarts_used": self.restarts_used,
            "witness_rank": self.witness.numerical_rank(),
            "witness": self.witness.to_config(),
        }

    @classmethod
    def from_config(cls, block):
        return cls(block["k"], block["min_value"], SchmidtVector.from_config(block["witness"]), block["restarts_used"])

    def __repr__(self):
        return f"KPositivityVerdict(k={self.k}, outcome={self.outcome!r}, min_value={self.min_value:.6g})"


def k_positivity(
    m, k, restarts=default_restarts, seed=None, initial=None, threads=1, tolerance=certificate_tolerance,
    patience=default_patience, max_iterations=verdict_max_iterations, stop_at_certificate=True,
):
    """Search for a Schmidt-rank-k vector on which the Choi matrix of `m` is negative

    Parameters
    ----------
    m : HermitianMap
        Square map, `dim_in == dim_out == d`.
    k : int
        `1 ≤ k ≤ d`; `k = 1` tests positivity and `k = d` complete positivity.
    restarts, seed, initial, threads, max_iterations
        Passed to `extremize_schmidt_k`.
    tolerance : float, optional
        Certificate tolerance, default 1e-8.
    stop_at_certificate : bool, optional
        Stop at the first start that certifies a negative value.  Defaults to
        True; False searches on for the smallest value.
    patience : int or None, optional
        Stop after this many consecutive starts without improvement.  Defaults
        to 8; None runs every restart.

    Returns
    -------
    KPositivityVerdict

    """
    if m.dim_in != m.dim_out:
        raise ValidationError(f"k-positivity needs a square map, got dims {m.dims}", field="map")
    d = m.dim_in
    if not 1 <= k <= d:
        raise ValidationError(f"must satisfy 1 <= k <= {d}, not {k}", field="k")
    value, witness, used = extremize_schmidt_k(
        m.choi, d, d, k, direction="min", restarts=restarts, seed=seed, initial=initial, threads=threads,
        max_iterations=max_iterations, stop_beyond=-tolerance if stop_at_certificate else None, patience=patience,
        full_output=True,
    )
    warm = 0 if initial is None else 1 if isinstance(initial, SchmidtVector) else len(initial)
    verdict = KPositivityVerdict(k, value, witness, max(0, used - warm), tolerance=tolerance)
    if verdict.marginal:
        warnings.warn(
            f"Marginal {k}-positivity verdict: minimum {value:.3e} lies within the certificate tolerance {tolerance:.1e}"
        )
    logger.debug("%r", verdict)
    return verdict


def expansion_witness(m, verdict):
    """Input whose trace norm grows under a non-positive map

    From a certified-negative 1-positivity verdict with product witness
    `|a⟩⊗|b⟩`, the state `x = |ā⟩⟨ā|` satisfies `⟨b|m(x)|b⟩ < 0`, so for a
    trace-preserving `m` the image has trace norm above `‖x‖₁ = 1`.

    Returns
    -------
    x : ndarray
    norm_in, norm_out : float
        Trace norms of `x` and `m(x)`.

    """
    if verdict.k != 1 or not verdict.certified_negative:
        raise ValidationError("needs a certified-negative verdict with k = 1", field="verdict")
    a = np.linalg.svd(verdict.witness.state.reshape(m.dim_in, m.dim_out))[0][:, 0]
    x = linops.projector(a.conj())
    image = apply(m, x)
    return x, linops.trace_norm(x), linops.trace_norm(image)


def advantage_certificate(rho, phi1, phi2, p, restarts=default_restarts, seed=None, tolerance=certificate_tolerance):
    """Compare an entangled-probe discrimination score with the best unassisted one

    Parameters
    ----------
    rho : density operator on `k ⊗ d`
        Probe state, ancilla first; `k` is inferred from the dimension.
    phi1, phi2 : Channel
        Channels on dimension `d`.
    p : float
        Prior weight of `phi2`.

    Returns
    -------
    lhs : float
        `‖(1-p)(id⊗Φ₁)[ρ] - p(id⊗Φ₂)[ρ]‖₁`.
    d1 : float
        Distinguishability of the pair without an ancilla.
    advantage : bool
        `lhs > d1 + tolerance`, which certifies that `rho` is entangled.

    """
    from ..discrimination.channels import DiscriminationInstance, channel_distinguishability

    if not 0 <= p <= 1:
        raise ValidationError(f"must lie in [0, 1], not {p}", field="p")
    rho = linops.check_density(rho, name="rho")
    d = phi1.dim_in
    if rho.shape[0] % d:
        raise ValidationError(f"dimension {rho.shape[0]} is not a multiple of d = {d}", field="rho")
    k = rho.shape[0] // d
    difference = (1 - p) * apply_extended(phi1, k, rho) - p * apply_extended(phi2, k, rho)
    lhs = linops.trace_norm(difference)
    d1 = channel_distinguishability(DiscriminationInstance(phi1, phi2, p, 1), restarts=restarts, seed=seed).value
    return lhs, d1, bool(lhs > d1 + tolerance)
