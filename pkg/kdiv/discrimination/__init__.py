"""Distinguishability of states and channels, min-entropy, and monotonicity along dynamics

The p-distinguishability `D_k` of two channels with a k-dimensional ancilla is
the operational quantity behind k-divisibility: a dynamical map is k-divisible
exactly when `D_k[Λ_t∘Φ₁, Λ_t∘Φ₂]` never increases in time.

"""

from . import states, channels, entropy, monotonicity
from .states import (
    state_distinguishability, helstrom_measurement, classical_channel_distinguishability, classical_objective,
)
from .channels import (
    DiscriminationInstance, DistinguishabilityResult, channel_distinguishability, hierarchy_check,
    evaluate_input, mixed_input_objective,
)
from .entropy import cq_state, cq_guessing_probability, min_entropy, min_entropy_from_distinguishability
from .monotonicity import (
    MonotonicityTrace, WitnessSearchResult, monotonicity_trace, classical_monotonicity_trace, witness_search,
    inverse_dynamics_pair, deterministic_channels,
)
