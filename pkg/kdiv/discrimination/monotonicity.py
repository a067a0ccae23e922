"""Distinguishability along a trajectory, and searches for operational witnesses of indivisibility

A dynamical map is k-divisible exactly when `D_k[Λ_t∘Φ₁, Λ_t∘Φ₂]` never
increases, for every pair of channels and every prior.  Since the values
computed here are attained lower bounds, only one direction is checked soundly:
a flagged increase is a genuine witness, while the absence of increases is
evidence of divisibility rather than proof.

To keep flagged increases sound, the forward sweep is followed by a backward
pass that raises each `D(t_i)` to at least the objective, at `t_i`, of the input
found at `t_{i+1}`.  A flagged increase then compares one and the same input
across the step, which can only grow if the propagator fails to be k-positive.

"""

import logging
import numpy as np

from .. import linops
from ..channels import maps
from ..channels.schmidt import default_restarts
from ..utilities import map_ordered, index_of_increases, forward_differences, largest_increase
from ..utilities.errors import ValidationError
from .states import check_prior
from .channels import DiscriminationInstance, channel_distinguishability, evaluate_input
from .entropy import min_entropy_from_distinguishability

logger = logging.getLogger(__name__)

violation_threshold = 1e-7
inconclusive_threshold = 1e-10
default_warm_restarts = 4
default_search_restarts = 4
default_budget = 200
inverse_margin = 1e-6
witness_families = ("inverse", "kraus", "pauli", "unitary")


class MonotonicityTrace(object):
    """Distinguishability sampled along a trajectory

    Attributes
    ----------
    times, values : ndarray
    derivatives : ndarray
        Forward finite differences of `values`.
    min_entropy : ndarray
        `-log₂((1 + D)/2)` at each time.
    flags : ndarray of bool
        `flags[i]` marks an increase above the threshold from `times[i]` to `times[i+1]`.
    violations : list of (time, increase)
    inconclusive : list of (time, increase)
        Increases too small to count as witnesses.
    witnesses : list
        Optimal inputs (quantum) or input vertex indices (classical) per time.

    """

    def __init__(self, times, values, witnesses, p, k=None, threshold=violation_threshold):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.witnesses = list(witnesses)
        self.p = p
        self.k = k
        self.threshold = threshold
        self.derivatives = forward_differences(self.values, self.times)
        self.min_entropy = np.array([min_entropy_from_distinguishability(v) for v in self.values])
        self.flags = index_of_increases(self.values, threshold) if self.values.size else np.zeros(0, dtype=bool)
        steps = np.diff(self.values)
        self.violations = [(float(self.times[i]), float(steps[i])) for i in np.flatnonzero(self.flags)]
        self.inconclusive = [
            (float(self.times[i]), float(steps[i]))
            for i in np.flatnonzero((steps > inconclusive_threshold) & (steps <= threshold))
        ]

    @property
    def largest_increase(self):
        return float(largest_increase(self.values)) if self.values.size else 0.0

    @property
    def has_violation(self):
        return bool(self.violations)

    def to_frame(self):
        """pandas DataFrame with columns time, D, dD_dt, H_min, violation_flag"""
        import pandas as pd
        return pd.DataFrame({
            "time": self.times,
            "D": self.values,
            "dD_dt": self.derivatives,
            "H_min": self.min_entropy,
            "violation_flag": self.flags.astype(int),
        }, columns=["time", "D", "dD_dt", "H_min", "violation_flag"])

    def to_config(self):
        quantum = bool(self.witnesses) and not isinstance(self.witnesses[0], (int, np.integer))
        return {
            "k": self.k,
            "p": self.p,
            "violation_threshold": self.threshold,
            "largest_increase": self.largest_increase,
            "violations": [{"time": t, "increase": dv} for t, dv in self.violations],
            "inconclusive": [{"time": t, "increase": dv} for t, dv in self.inconclusive],
            "trace": [
                {
                    "time": float(t), "D": float(v), "dD_dt": float(dv), "H_min": float(h), "violation_flag": bool(f),
                    "witness": w.to_config() if quantum else int(w),
                }
                for t, v, dv, h, f, w in zip(
                    self.times, self.values, self.derivatives, self.min_entropy, self.flags, self.witnesses
                )
            ],
        }

    def __repr__(self):
        return (
            f"MonotonicityTrace(k={self.k}, p={self.p}, times={self.times.size}, "
            f"violations={len(self.violations)}, largest_increase={self.largest_increase:.3e})"
        )


def evolved_pair(traj, i, phi1, phi2, p, k):
    channel = traj[i]
    return DiscriminationInstance(maps.compose(channel, phi1), maps.compose(channel, phi2), p, k)


def monotonicity_trace(
    traj, phi1, phi2, p, k, restarts=default_restarts, seed=None, cold_start=False, backward=True,
    warm_restarts=default_warm_restarts, indices=None, threshold=violation_threshold, progress=False,
):
    """`D_k^p[Λ_t∘Φ₁, Λ_t∘Φ₂]` at each grid time, with flagged increases

    Parameters
    ----------
    traj : MapTrajectory
    phi1, phi2 : Channel
    p : float
    k : int
    restarts : int, optional
        Random starts at the first time, and at every time with `cold_start`.
    seed : int, optional
    cold_start : bool, optional
        Optimize every time independently instead of warm-starting from the
        previous time's optimal input.
    backward : bool, optional
        Run the backward refinement pass.  Defaults to True; without it a
        flagged increase may be an artifact of the optimizer.
    warm_restarts : int, optional
        Extra random starts at warm-started times.
    indices : sequence of int, optional
        Grid indices to evaluate, in increasing order.  Defaults to all.
    threshold : float, optional
        Smallest increase flagged as a violation, default 1e-7.

    Returns
    -------
    MonotonicityTrace

    """
    p = check_prior(p)
    if not 1 <= k <= traj.dim:
        raise ValidationError(f"must satisfy 1 <= k <= {traj.dim}, not {k}", field="k")
    indices = list(range(len(traj))) if indices is None else [int(i) for i in indices]
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValidationError("must be strictly increasing", field="indices")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)
    instances = [evolved_pair(traj, i, phi1, phi2, p, k) for i in indices]

    if progress:
        from tqdm.auto import tqdm
        iterator = tqdm(enumerate(instances), total=len(instances), desc=f"D_{k} trace", dynamic_ncols=True)
    else:
        iterator = enumerate(instances)
    results = []
    for n, inst in iterator:
        if n == 0 or cold_start:
            result = channel_distinguishability(inst, restarts=restarts, seed=seed)
        else:
            initial = results[-1].optimal_input
            result = channel_distinguishability(inst, restarts=warm_restarts, seed=seed, initial=initial)
        results.append(result)

    if backward:
        refined = 0
        for n in range(len(instances) - 2, -1, -1):
            carried = results[n + 1].optimal_input
            if evaluate_input(instances[n], carried) > results[n].value:
                better = channel_distinguishability(instances[n], restarts=0, seed=seed, initial=carried)
                if better.value > results[n].value:
                    results[n] = better
                    refined += 1
        logger.debug("Backward pass raised %d of %d values", refined, len(instances))

    trace = MonotonicityTrace(
        traj.grid[indices], [r.value for r in results], [r.optimal_input for r in results], p, k, threshold
    )
    logger.info("%r", trace)
    return trace


def classical_monotonicity_trace(traj, s1, s2, p, threshold=violation_threshold):
    """Exact `D_c^p[T(t)S₁, T(t)S₂]` along a classical trajectory

    Each value is maximized exactly over input vertices, so flagged increases
    are witnesses of a propagator that is not a stochastic matrix.

    """
    from ..dynamics.classical import check_stochastic

    p = check_prior(p)
    s1 = check_stochastic(s1, name="s1")
    s2 = check_stochastic(s2, name="s2")
    values, vertices = [], []
    for t_matrix in traj.matrices:
        columns = np.abs((1 - p) * (t_matrix @ s1) - p * (t_matrix @ s2)).sum(axis=0)
        best = int(np.argmax(columns))
        values.append(float(columns[best]))
        vertices.append(best)
    trace = MonotonicityTrace(traj.grid, values, vertices, p, None, threshold)
    logger.info("%r", trace)
    return trace


def deterministic_channels(n):
    """All `n**n` deterministic stochastic matrices on `n` states"""
    import itertools
    channels = []
    for image in itertools.product(range(n), repeat=n):
        s = np.zeros((n, n))
        s[list(image), list(range(n))] = 1.0
        channels.append(s)
    return channels


def inverse_dynamics_pair(traj, i):
    """Channel pair and prior whose weighted difference at grid index `i` is a multiple of the identity

    With `β = d·max(0, -λ_min(Choi(Λ⁻¹)))` plus a small margin, the channels are
    `Φ₁ = (Λ⁻¹ + βΦ_dep)/(1 + β)` and `Φ₂ = Φ_dep`, with prior
    `p = β/(1 + 2β)`.  Then `Λ ∘ ((1-p)Φ₁ - pΦ₂) = id/(1 + 2β)`, so the
    distinguishability at later times is `‖(id_k ⊗ Λ_{t,tᵢ})[·]‖₁/(1 + 2β)`
    maximized over inputs, which exceeds its value at `tᵢ` exactly when the
    propagator out of `tᵢ` is not k-positive.

    """
    d = traj.dim
    inverse = maps.invert(traj[i], time=float(traj.grid[i]))
    smallest = linops.eigvals_hermitian(inverse.choi)[0]
    beta = d * max(0.0, -smallest) + inverse_margin
    depolarizing = maps.completely_depolarizing(d)
    phi1 = maps.Channel.from_map((1 / (1 + beta)) * (inverse + beta * depolarizing.as_map()))
    return phi1, depolarizing, beta / (1 + 2 * beta)


class WitnessSearchResult(object):
    """Best candidate from `witness_search`

    `found` is True only when the largest observed increase exceeds the
    violation threshold; otherwise the search honestly reports that nothing
    was found within the budget.

    """

    def __init__(self, k, increase, time, phi1, phi2, p, family, candidates, trace, threshold=violation_threshold):
        self.k = k
        self.increase = float(increase)
        self.time = time
        self.phi1, self.phi2, self.p = phi1, phi2, p
        self.family = family
        self.candidates = candidates
        self.trace = trace
        self.threshold = threshold

    @property
    def found(self):
        return self.increase > self.threshold

    def to_config(self):
        config = {
            "k": self.k,
            "found": self.found,
            "increase": self.increase,
            "candidates_evaluated": self.candidates,
            "violation_threshold": self.threshold,
        }
        if self.phi1 is not None:
            config.update({
                "time": self.time,
                "family": self.family,
                "p": self.p,
                "phi1": maps.map_to_config(self.phi1),
                "phi2": maps.map_to_config(self.phi2),
                "trace": self.trace.to_config(),
            })
        return config

    def __repr__(self):
        if not self.found:
            return f"WitnessSearchResult(k={self.k}, found=False, candidates={self.candidates})"
        return (
            f"WitnessSearchResult(k={self.k}, found=True, increase={self.increase:.3e}, "
            f"time={self.time:.6g}, family={self.family!r})"
        )


def _candidate(traj, index, p, family_list, seed):
    """Deterministic candidate number `index`: returns (family, grid index, phi1, phi2, p)"""
    rng = np.random.default_rng([seed, index])
    family = family_list[index % len(family_list)]
    d = traj.dim
    i = int(rng.integers(0, len(traj) - 1))
    if family == "inverse":
        phi1, phi2, p = inverse_dynamics_pair(traj, i)
    elif family == "kraus":
        ranks = rng.integers(1, d * d + 1, size=2)
        seeds = rng.integers(0, 2**63, size=2)
        phi1 = maps.random_channel(d, ranks[0], seed=seeds[0])
        phi2 = maps.random_channel(d, ranks[1], seed=seeds[1])
    elif family == "pauli":
        if d != 2:
            raise ValidationError("Pauli candidates need a qubit trajectory", field="families")
        phi1, phi2 = maps.pauli(rng.dirichlet(np.ones(4))), maps.pauli(rng.dirichlet(np.ones(4)))
    elif family == "unitary":
        seeds = rng.integers(0, 2**63, size=2)
        phi1 = maps.unitary(linops.random_unitary(d, seed=seeds[0]))
        phi2 = maps.unitary(linops.random_unitary(d, seed=seeds[1]))
    else:
        raise ValidationError(f"unknown family {family!r}; choose from {list(witness_families)}", field="families")
    return family, i, phi1, phi2, p


def witness_search(
    traj, k, p=0.5, families=witness_families, budget=default_budget, seed=None, restarts=default_search_restarts,
    threads=1, progress=False, threshold=violation_threshold,
):
    """Randomized search for a channel pair whose distinguishability increases

    Candidates cycle through the requested families:

      * "inverse": the pair from `inverse_dynamics_pair` at a random grid time,
        with its own prior;
      * "kraus": two random channels of random Kraus rank;
      * "pauli": two random Pauli channels (qubits only);
      * "unitary": two Haar-random unitary channels.

    Each candidate is anchored at a random grid index `i` and evaluated with
    `monotonicity_trace` on the grid indices `i-1, i, i+1`.

    Parameters
    ----------
    traj : MapTrajectory
    k : int
    p : float, optional
        Prior for the random families.  Defaults to 1/2.
    families : sequence of str, optional
    budget : int, optional
        Number of candidates, default 200.
    seed : int, optional
        Candidate `c` is drawn from `numpy.random.default_rng([seed, c])`.
    restarts : int, optional
        Random starts per distinguishability evaluation.

    Returns
    -------
    WitnessSearchResult

    """
    p = check_prior(p)
    if int(budget) < 1:
        raise ValidationError(f"must be at least 1, not {budget}", field="budget")
    if len(traj) < 2:
        raise ValidationError("needs at least two grid times", field="grid")
    family_list = list(families)
    if not family_list:
        raise ValidationError("needs at least one family", field="families")
    for family in family_list:
        if family not in witness_families:
            raise ValidationError(f"unknown family {family!r}", field="families")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)

    def evaluate(index):
        family, i, phi1, phi2, q = _candidate(traj, index, p, family_list, seed)
        window = [j for j in (i - 1, i, i + 1) if 0 <= j < len(traj)]
        trace = monotonicity_trace(traj, phi1, phi2, q, k, restarts=restarts, seed=seed, indices=window, threshold=threshold)
        return trace.largest_increase, family, phi1, phi2, q, trace

    outcomes = map_ordered(evaluate, range(int(budget)), threads=threads, progress=progress, desc=f"k={k} witness search")
    best = max(range(len(outcomes)), key=lambda c: (outcomes[c][0], -c))
    increase, family, phi1, phi2, q, trace = outcomes[best]
    if increase > threshold:
        step = int(np.argmax(np.diff(trace.values)))
        result = WitnessSearchResult(k, increase, float(trace.times[step]), phi1, phi2, q, family, len(outcomes), trace, threshold)
    else:
        result = WitnessSearchResult(k, increase, None, None, None, None, None, len(outcomes), None, threshold)
    logger.info("%r", result)
    return result
