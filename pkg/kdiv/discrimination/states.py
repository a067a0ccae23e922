"""Two-hypothesis discrimination of quantum states and of classical channels

With prior weights `(1-p, p)` on the two hypotheses, the optimal success
probability is `(1 + D)/2`, where `D` is the trace norm of the weighted
difference.  For states the optimum is reached by the Helstrom measurement;
for classical channels, by feeding in a deterministic input.

"""

import numpy as np

from .. import linops
from ..utilities.errors import ValidationError


def check_prior(p, name="p"):
    """Return `p` as a float in [0, 1]"""
    try:
        p = float(p)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"must be a number, not {p!r}", field=name) from e
    if not 0 <= p <= 1:
        raise ValidationError(f"must lie in [0, 1], not {p}", field=name)
    return p


def weighted_difference(rho1, rho2, p):
    return (1 - p) * rho1 - p * rho2


def state_distinguishability(rho1, rho2, p):
    """`‖(1-p)ρ₁ - pρ₂‖₁`"""
    p = check_prior(p)
    rho1 = linops.check_density(rho1, name="rho1")
    rho2 = linops.check_density(rho2, name="rho2")
    if rho1.shape != rho2.shape:
        raise ValidationError(f"shapes {rho1.shape} and {rho2.shape} differ", field="rho2")
    return linops.trace_norm(weighted_difference(rho1, rho2, p))


def helstrom_measurement(rho1, rho2, p):
    """Optimal two-outcome measurement for guessing which state was prepared

    Returns
    -------
    projector : ndarray
        Projector onto the nonnegative eigenspace of `(1-p)ρ₁ - pρ₂`; the
        outcome associated with it guesses `ρ₁`.
    p_guess : float
        `(1-p) tr(M ρ₁) + p tr((I-M) ρ₂)`, which equals `(1 + D)/2`.

    """
    p = check_prior(p)
    rho1 = linops.check_hermitian(rho1, name="rho1")
    rho2 = linops.check_hermitian(rho2, name="rho2")
    if rho1.shape != rho2.shape:
        raise ValidationError(f"shapes {rho1.shape} and {rho2.shape} differ", field="rho2")
    projector = nonnegative_projector(weighted_difference(rho1, rho2, p))
    p_guess = (1 - p) * np.trace(projector @ rho1).real + p * np.trace((np.eye(rho2.shape[0]) - projector) @ rho2).real
    return projector, float(p_guess)


def nonnegative_projector(h):
    """Projector onto the span of eigenvectors of `h` with eigenvalues ≥ 0"""
    values, vectors = linops.eig_hermitian(h)
    kept = vectors[:, values >= 0]
    return kept @ kept.conj().T


def sign_operator(h):
    """`2M - I` for the nonnegative projector `M` of `h`, so that `tr(h Z) = ‖h‖₁`"""
    values, vectors = linops.eig_hermitian(h)
    return (vectors * np.where(values >= 0, 1.0, -1.0)) @ vectors.conj().T


def classical_channel_distinguishability(s1, s2, p):
    """Exact p-distinguishability of two classical channels

    The objective `Σ_x |(1-p)(S₁ q)(x) - p(S₂ q)(x)|` is convex in the input
    distribution `q`, so its maximum over the simplex sits at a vertex.

    Returns
    -------
    value : float
    best_vertex_index : int
        Index of the deterministic input attaining the maximum; ties go to the
        smallest index.

    """
    from ..dynamics.classical import check_stochastic

    p = check_prior(p)
    s1 = check_stochastic(s1, name="s1")
    s2 = check_stochastic(s2, name="s2")
    if s1.shape != s2.shape:
        raise ValidationError(f"shapes {s1.shape} and {s2.shape} differ", field="s2")
    columns = np.abs((1 - p) * s1 - p * s2).sum(axis=0)
    best = int(np.argmax(columns))
    return float(columns[best]), best


def classical_objective(s1, s2, p, q):
    """`Σ_x |(1-p)(S₁ q)(x) - p(S₂ q)(x)|` at an arbitrary input distribution `q`"""
    return float(np.abs(((1 - p) * np.asarray(s1) - p * np.asarray(s2)) @ np.asarray(q)).sum())
