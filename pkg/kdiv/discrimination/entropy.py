"""Classical-quantum states of the discrimination game and their conditional min-entropy

A register `A` records which of the two channels was applied; the system and
ancilla `B` carry the output.  Guessing `A` from `B` succeeds with probability
`(1 + D)/2`, so the conditional min-entropy is `H_min(A|B) = -log₂((1 + D)/2)`
in bits.

"""

import logging
import numpy as np

from .. import linops
from ..channels import maps
from ..channels.schmidt import default_restarts
from ..utilities.errors import NumericalError, ValidationError
from .states import nonnegative_projector
from .channels import DiscriminationInstance, channel_distinguishability

logger = logging.getLogger(__name__)

helstrom_agreement_tolerance = 1e-8


def evolved_instance(inst, traj, t):
    """The instance for the pair `Λ_t ∘ Φ₁`, `Λ_t ∘ Φ₂`"""
    channel = traj.at(t)
    return DiscriminationInstance(maps.compose(channel, inst.phi1), maps.compose(channel, inst.phi2), inst.p, inst.k)


def min_entropy_from_distinguishability(value):
    """`-log₂((1 + D)/2)`"""
    return float(-np.log2((1 + value) / 2))


def cq_state(inst, traj, t, rho=None, restarts=default_restarts, seed=None):
    """`Σᵢ qᵢ |i⟩⟨i|_A ⊗ (id_k ⊗ Λ_t∘Φᵢ)[ρ]` with `q = (1-p, p)`

    Parameters
    ----------
    inst : DiscriminationInstance
    traj : MapTrajectory
    t : float
        Grid time.
    rho : density operator on `k ⊗ d`, optional
        Reference input; defaults to the optimal input for the evolved pair.

    Returns
    -------
    cq : ndarray
        Density operator on `2 ⊗ k ⊗ d_out`, register first.

    """
    evolved = evolved_instance(inst, traj, t)
    if rho is None:
        psi = channel_distinguishability(evolved, restarts=restarts, seed=seed).optimal_input.state
        rho = linops.projector(psi)
    rho = linops.check_density(rho, name="rho")
    branches = [
        maps.apply_extended(evolved.phi1, inst.k, rho),
        maps.apply_extended(evolved.phi2, inst.k, rho),
    ]
    q = (1 - inst.p, inst.p)
    register = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    return sum(qi * np.kron(r, b) for qi, r, b in zip(q, register, branches))


def cq_guessing_probability(cq):
    """Success probability of the Helstrom measurement guessing the register of a two-branch cq state

    Reads the conditional blocks `qᵢ σᵢ` off the register diagonal and measures
    the projector onto the nonnegative part of `q₀σ₀ - q₁σ₁`.

    """
    cq = linops.check_hermitian(cq, name="cq")
    if cq.shape[0] % 2:
        raise ValidationError(f"dimension {cq.shape[0]} has no two-level register", field="cq")
    n = cq.shape[0] // 2
    blocks = cq.reshape(2, n, 2, n)
    first, second = blocks[0, :, 0, :], blocks[1, :, 1, :]
    projector = nonnegative_projector(first - second)
    return float(np.trace(projector @ first).real + np.trace((np.eye(n) - projector) @ second).real)


def min_entropy(inst, traj, t, restarts=default_restarts, seed=None, initial=None, result=None):
    """Conditional min-entropy `H_min(A|B)` of the cq state at time `t`

    The guessing probability `(1 + D)/2` of the optimal input is cross-checked
    against a Helstrom measurement on the cq state built from that input.

    Parameters
    ----------
    result : DistinguishabilityResult, optional
        Precomputed optimum for the evolved pair; searched for when absent.

    Raises
    ------
    NumericalError
        If the two guessing probabilities disagree by more than 1e-8.

    """
    evolved = evolved_instance(inst, traj, t)
    if result is None:
        result = channel_distinguishability(evolved, restarts=restarts, seed=seed, initial=initial)
    cq = cq_state(inst, traj, t, rho=linops.projector(result.optimal_input.state))
    p_guess = cq_guessing_probability(cq)
    if abs(p_guess - result.guessing_probability) > helstrom_agreement_tolerance:
        raise NumericalError(
            f"Helstrom guessing probability {p_guess!r} disagrees with (1 + D)/2 = {result.guessing_probability!r}"
        )
    return min_entropy_from_distinguishability(result.value)
