"""Quantum channels, Hermitian-preserving maps, and Schmidt-rank-constrained positivity

This module provides the `HermitianMap` and `Channel` containers together with
conversions between Kraus operators, superoperators, and Choi matrices, a set of
standard channel families, and the seesaw engine that tests k-positivity.

"""

from . import maps, schmidt, positivity
from .maps import (
    HermitianMap, Channel, from_kraus, to_kraus, apply, apply_extended, compose, invert,
    tensor_with_identity, trace_preservation_error, superop_to_choi, choi_to_superop,
    identity, unitary, pauli, depolarizing, completely_depolarizing, dephasing, amplitude_damping,
    replacement, transpose, random_channel, random_pauli, map_to_config, map_from_config,
)
from .schmidt import SchmidtVector, schmidt_decompose, schmidt_rank, extremize_schmidt_k
from .positivity import (
    KPositivityVerdict, k_positivity, expansion_witness, advantage_certificate,
    CERTIFIED_NEGATIVE, PRESUMED_POSITIVE,
)
