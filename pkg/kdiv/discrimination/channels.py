"""Ancilla-assisted discrimination of two quantum channels

The p-distinguishability with a k-dimensional ancilla is

    D_k = max_φ ‖(id_k ⊗ Δ)[|φ⟩⟨φ|]‖₁,    Δ = (1-p)Φ₁ - pΦ₂,

over pure inputs `φ` on `k ⊗ d`; every such input has Schmidt rank at most `k`,
and mixed inputs never do better.  The maximum is approached by a seesaw
between two exact steps: for fixed `φ` the best measurement is the Helstrom
projector of the output, and for a fixed measurement `Z = 2M - I` the best
input is the top eigenvector of the pulled-back operator `(id_k ⊗ Δ†)[Z]`.
Every reported value is attained by the reported input, so it is a lower
bound on the true optimum.

"""

import logging
import numpy as np

from .. import linops
from ..channels import maps
from ..channels.schmidt import SchmidtVector, extremize_schmidt_k, default_restarts, seesaw_tolerance, seesaw_max_iterations
from ..utilities import map_ordered
from ..utilities.errors import ValidationError, NumericalError
from .states import check_prior, nonnegative_projector, sign_operator

logger = logging.getLogger(__name__)


class DiscriminationInstance(object):
    """Two channels on the same space, a prior, and an ancilla dimension

    Parameters
    ----------
    phi1, phi2 : Channel
    p : float
        Weight of `phi2`; `phi1` has weight `1 - p`.
    k : int, optional
        Ancilla dimension, `1 ≤ k ≤ d`.  Defaults to `d`.

    """

    def __init__(self, phi1, phi2, p, k=None):
        if phi1.dims != phi2.dims:
            raise ValidationError(f"channel dims {phi1.dims} and {phi2.dims} differ", field="phi2")
        self.phi1, self.phi2 = phi1, phi2
        self.p = check_prior(p)
        self.d = phi1.dim_in
        self.k = self.d if k is None else int(k)
        if not 1 <= self.k <= self.d:
            raise ValidationError(f"must satisfy 1 <= k <= {self.d}, not {k}", field="k")
        self.difference = (1 - self.p) * phi1.as_map() - self.p * phi2.as_map()
        self._adjoint = self.difference.adjoint()

    def with_k(self, k):
        return DiscriminationInstance(self.phi1, self.phi2, self.p, k)

    def output(self, rho):
        """`(id_k ⊗ Δ)[ρ]` for an operator on `k ⊗ d`"""
        return maps.apply_extended(self.difference, self.k, rho)

    def pullback(self, z):
        """`(id_k ⊗ Δ†)[Z]` for an operator on `k ⊗ d_out`"""
        return maps.apply_extended(self._adjoint, self.k, z)

    def __repr__(self):
        return f"DiscriminationInstance(d={self.d}, k={self.k}, p={self.p})"


class DistinguishabilityResult(object):
    """Best input found for a `DiscriminationInstance`

    Attributes
    ----------
    value : float
        Trace norm attained at `optimal_input`.
    optimal_input : SchmidtVector
        Input on `k ⊗ d`.
    helstrom_projector : ndarray
        Optimal measurement for the output at `optimal_input`.
    guessing_probability : float
        `(1 + value)/2`.
    restarts, seed : int
    iterations : int
        Seesaw iterations of the winning start.

    """

    def __init__(self, value, optimal_input, helstrom_projector, restarts, seed, iterations=0):
        self.value = float(value)
        self.optimal_input = optimal_input
        self.helstrom_projector = helstrom_projector
        self.guessing_probability = (1 + self.value) / 2
        self.restarts = restarts
        self.seed = seed
        self.iterations = iterations

    @property
    def k(self):
        return self.optimal_input.dim_a

    def revalidate(self, inst, tolerance=1e-8):
        return abs(evaluate_input(inst, self.optimal_input) - self.value) <= tolerance

    def to_config(self):
        return {
            "k": self.k,
            "value": self.value,
            "guessing_probability": self.guessing_probability,
            "restarts": self.restarts,
            "seed": self.seed,
            "witness_rank": self.optimal_input.numerical_rank(),
            "optimal_input": self.optimal_input.to_config(),
        }

    def __repr__(self):
        return f"DistinguishabilityResult(k={self.k}, value={self.value:.10g})"


def _as_state(inst, phi):
    if isinstance(phi, SchmidtVector):
        if phi.dim_b != inst.d or phi.dim_a > inst.k:
            raise ValidationError(f"{phi!r} does not fit an input on {inst.k} ⊗ {inst.d}", field="input")
        return phi.embedded(inst.k).state
    return linops.check_pure(phi, name="input")


def evaluate_input(inst, phi):
    """Objective `‖(id_k ⊗ Δ)[|φ⟩⟨φ|]‖₁` at a pure input (SchmidtVector or amplitude vector)"""
    psi = _as_state(inst, phi)
    return linops.trace_norm(inst.output(linops.projector(psi)))


def mixed_input_objective(inst, rho):
    """Objective at a mixed input on `k ⊗ d`; never exceeds the best pure input"""
    rho = linops.check_density(rho, name="rho")
    return linops.trace_norm(inst.output(rho))


def _seesaw(inst, psi, tolerance, max_iterations):
    """Alternate Helstrom measurement and best response from `psi`, returning `(value, psi, iterations)`"""
    y = inst.output(linops.projector(psi))
    value = linops.trace_norm(y)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        w = inst.pullback(sign_operator(y))
        _, vector = extremize_schmidt_k(w, inst.k, inst.d, inst.k, direction="max", restarts=0)
        new_psi = vector.state
        y = inst.output(linops.projector(new_psi))
        new_value = linops.trace_norm(y)
        if new_value < value - 1e-9 * (1 + value):
            raise NumericalError(f"distinguishability seesaw worsened from {value!r} to {new_value!r}")
        change = abs(new_value - value) / max(1.0, new_value)
        value, psi = new_value, new_psi
        if change < tolerance:
            break
    return value, psi, iterations


def channel_distinguishability(
    inst, restarts=default_restarts, seed=None, initial=None, threads=1,
    tolerance=seesaw_tolerance, max_iterations=seesaw_max_iterations,
):
    """Ancilla-assisted p-distinguishability of two channels

    Parameters
    ----------
    inst : DiscriminationInstance
    restarts : int, optional
        Random pure starting inputs, in addition to the rank-k maximally
        entangled input and any warm starts.  Defaults to 32.
    seed : int, optional
        Restart `i` starts from `random_pure_state(k*d, seed=[seed, i])`.
    initial : SchmidtVector, amplitude vector, or list of them, optional
        Warm starts; inputs with a smaller ancilla are embedded.
    threads : int, optional

    Returns
    -------
    DistinguishabilityResult

    """
    if int(restarts) < 0:
        raise ValidationError(f"must be nonnegative, not {restarts}", field="restarts")
    if initial is None:
        initial = []
    elif isinstance(initial, SchmidtVector) or (isinstance(initial, np.ndarray) and initial.ndim == 1):
        initial = [initial]
    starts = [_as_state(inst, phi) for phi in initial]
    starts.append(linops.maximally_entangled(inst.k, inst.d))
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)
    starts += [linops.random_pure_state(inst.k * inst.d, seed=[seed, i]) for i in range(int(restarts))]

    results = map_ordered(lambda psi: _seesaw(inst, psi, tolerance, max_iterations), starts, threads=threads)
    best = 0
    for i, (value, _, _) in enumerate(results):
        if value > results[best][0]:
            best = i
    value, psi, iterations = results[best]
    optimal_input = SchmidtVector.from_state(psi, inst.k, inst.d, inst.k)
    output = inst.output(linops.projector(optimal_input.state))
    result = DistinguishabilityResult(
        linops.trace_norm(output), optimal_input, nonnegative_projector(output), int(restarts), seed, iterations
    )
    logger.debug("%r from %d starts (winning start %d)", result, len(starts), best)
    return result


def hierarchy_check(phi1, phi2, p, restarts=default_restarts, seed=None, threads=1):
    """Distinguishabilities `D_1, …, D_d` of a channel pair

    Each `D_k` is warm-started from the optimal input found for `D_{k-1}`,
    embedded in the larger ancilla, so the returned chain is nondecreasing.

    Returns
    -------
    results : list of DistinguishabilityResult
        Entry `k-1` holds `D_k`.

    """
    d = phi1.dim_in
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)
    results = []
    for k in range(1, d + 1):
        inst = DiscriminationInstance(phi1, phi2, p, k)
        initial = results[-1].optimal_input if results else None
        results.append(channel_distinguishability(inst, restarts=restarts, seed=seed, initial=initial, threads=threads))
    logger.info("Distinguishability chain: %s", ", ".join(f"{r.value:.10g}" for r in results))
    return results
