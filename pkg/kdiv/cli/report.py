"""Running scenario tasks, the reports they produce, and plot-ready CSV exports

A report is a JSON document tagged `"kdiv_format": "report"` holding the
normalized scenario, the package version, and the task's results with every
witness needed to check them.  Wall-clock timings are kept out of the report so
that identical scenarios with identical seeds give byte-identical files; they
are written to a `timing.json` sidecar instead.

"""

import json
import time
import contextlib
import logging
import numpy as np

from .. import __version__
from ..channels import maps
from ..channels.schmidt import SchmidtVector
from ..channels.positivity import KPositivityVerdict
from ..dynamics.generators import rates_cp_check
from ..dynamics.trajectory import propagator_map
from ..dynamics.divisibility import divisibility_scan, propagator_offset
from ..discrimination.states import classical_objective
from ..discrimination.channels import (
    DiscriminationInstance, DistinguishabilityResult, channel_distinguishability, hierarchy_check, evaluate_input,
)
from ..discrimination.entropy import min_entropy
from ..discrimination.monotonicity import (
    monotonicity_trace, classical_monotonicity_trace, witness_search, evolved_pair,
)
from ..utilities.errors import ValidationError
from .scenario import Scenario

logger = logging.getLogger(__name__)

format_tag = "report"
revalidation_tolerance = 1e-8

trace_columns = ["time", "D", "dD_dt", "H_min", "violation_flag"]
hierarchy_columns = ["k", "D_k"]
divisibility_columns = ["time", "min_value", "outcome", "marginal"]
drift_columns = ["time", "drift"]


class Report(object):
    """Results of one task, with the scenario that produced them

    Attributes
    ----------
    scenario : dict
        Normalized scenario document.
    task : str
    version : str
    results : dict
    statistics : dict
        Seed and restart counts actually used.
    flags : dict
        `violation` (bool), `marginal` and `inconclusive` (lists of times), and
        `singular_time` (float or None).
    timings : dict
        Wall-clock seconds per stage; never serialized into the report itself.
    trajectory : MapTrajectory or StochasticTrajectory or None
        Live trajectory of the run, when there was one.

    """

    def __init__(self, scenario, results, statistics=None, flags=None, version=__version__):
        self.scenario = scenario
        self.task = scenario["task"]
        self.results = results
        self.statistics = statistics or {}
        self.flags = {"violation": False, "marginal": [], "inconclusive": [], "singular_time": None}
        self.flags.update(flags or {})
        self.version = version
        self.timings = {}
        self.trajectory = None

    @property
    def exit_code(self):
        """4 for a certified violation, 3 if the dynamics became singular first, else 0"""
        if self.flags["violation"]:
            return 4
        if self.flags["singular_time"] is not None:
            return 3
        return 0

    def to_config(self):
        return {
            "kdiv_format": format_tag,
            "version": self.version,
            "task": self.task,
            "scenario": self.scenario,
            "results": self.results,
            "statistics": self.statistics,
            "flags": self.flags,
        }

    def to_json(self):
        return json.dumps(self.to_config(), indent=4, sort_keys=True, allow_nan=False) + "\n"

    def save(self, file):
        from pathlib import Path
        path = Path(file)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_json())
        return path

    @classmethod
    def from_config(cls, document):
        if not isinstance(document, dict) or document.get("kdiv_format") != format_tag:
            raise ValidationError(f"expected a document tagged {format_tag!r}", field="kdiv_format")
        try:
            return cls(document["scenario"], document["results"], document["statistics"], document["flags"], document["version"])
        except KeyError as e:
            raise ValidationError(f"missing member {e.args[0]!r}", field="report") from e

    @classmethod
    def load(cls, file):
        from pathlib import Path
        path = Path(file).expanduser()
        try:
            with path.open("r", encoding="utf-8") as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path} is not valid JSON: {e}", field="report") from e
        return cls.from_config(document)

    def revalidate(self, tolerance=revalidation_tolerance):
        """Re-evaluate every embedded witness

        The trajectory is rebuilt from the echoed scenario and each witness is
        evaluated afresh; any value that is not reproduced to within
        `tolerance` is reported.

        Returns
        -------
        failures : list of str
            Empty when every witness reproduces its claimed value.

        """
        scenario = Scenario.from_config(self.scenario)
        checks = _revalidators.get(self.task)
        failures = [] if checks is None else checks(self, scenario, tolerance)
        for failure in failures:
            logger.warning("Revalidation failed: %s", failure)
        if not failures:
            logger.info("Every witness in the %s report reproduces its value", self.task)
        return failures

    def __repr__(self):
        return f"Report(task={self.task!r}, version={self.version!r}, exit_code={self.exit_code})"


@contextlib.contextmanager
def _timed(timings, stage):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = time.perf_counter() - start
        logger.info("%s took %.3f s", stage, timings[stage])


def _instance(scenario, k=None):
    params = scenario.params
    return DiscriminationInstance(scenario.phi1, scenario.phi2, params["p"], params["k"] if k is None else k)


def _run_simulate(scenario, trajectory, threads, progress):
    results = {
        "kind": "classical" if scenario.classical else "quantum",
        "dim": trajectory.dim,
        "times": int(len(trajectory)),
        "t_max": float(trajectory.grid[-1]),
        "max_drift": float(np.max(trajectory.drift)),
        "drift": [{"time": float(t), "drift": float(x)} for t, x in zip(trajectory.grid, trajectory.drift)],
    }
    if scenario.classical:
        results["stochastic"] = bool(np.all(trajectory.stochastic))
    elif scenario.generator.canonical:
        results["cp_rates"] = bool(np.all(rates_cp_check(scenario.generator, trajectory.grid)))
    return results, {}, {}


def _run_divisibility(scenario, trajectory, threads, progress):
    params = scenario.params
    scan = divisibility_scan(
        trajectory, params["k"], epsilon=params["epsilon"], restarts=params["restarts"], seed=scenario.seed,
        threads=threads, progress=progress,
    )
    results = scan.to_config()
    if scenario.generator.canonical:
        results["cp_rates"] = [bool(x) for x in rates_cp_check(scenario.generator, scan.times)]
    flags = {
        "violation": scan.first_violation_time is not None,
        "marginal": scan.marginal_times,
        "singular_time": scan.singular_time,
    }
    statistics = {"restarts": params["restarts"], "seed": scenario.seed, "times_scanned": int(scan.times.size)}
    return results, flags, statistics


def _run_discriminate(scenario, trajectory, threads, progress):
    params = scenario.params
    result = channel_distinguishability(_instance(scenario), restarts=params["restarts"], seed=scenario.seed, threads=threads)
    statistics = {"restarts": params["restarts"], "seed": scenario.seed, "iterations": result.iterations}
    return result.to_config(), {}, statistics


def _run_hierarchy(scenario, trajectory, threads, progress):
    params = scenario.params
    chain = hierarchy_check(
        scenario.phi1, scenario.phi2, params["p"], restarts=params["restarts"], seed=scenario.seed, threads=threads
    )
    values = [r.value for r in chain]
    results = {
        "p": params["p"],
        "chain": [r.to_config() for r in chain],
        "monotone": bool(all(b >= a - revalidation_tolerance for a, b in zip(values, values[1:]))),
    }
    return results, {}, {"restarts": params["restarts"], "seed": scenario.seed}


def _trace(scenario, trajectory, progress):
    params = scenario.params
    if scenario.classical:
        return classical_monotonicity_trace(trajectory, scenario.phi1, scenario.phi2, params["p"], threshold=params["threshold"])
    return monotonicity_trace(
        trajectory, scenario.phi1, scenario.phi2, params["p"], params["k"], restarts=params["restarts"],
        seed=scenario.seed, cold_start=params["cold_start"], warm_restarts=params["warm_restarts"],
        threshold=params["threshold"], progress=progress,
    )


def _trace_flags(trace):
    return {"violation": trace.has_violation, "inconclusive": [t for t, _ in trace.inconclusive]}


def _run_monotonicity(scenario, trajectory, threads, progress):
    params = scenario.params
    trace = _trace(scenario, trajectory, progress)
    statistics = {"seed": scenario.seed}
    if not scenario.classical:
        statistics.update(restarts=params["restarts"], warm_restarts=params["warm_restarts"], cold_start=params["cold_start"])
    return trace.to_config(), _trace_flags(trace), statistics


def _run_minentropy(scenario, trajectory, threads, progress):
    params = scenario.params
    trace = _trace(scenario, trajectory, progress)
    inst = _instance(scenario)
    samples = np.unique(np.linspace(0, len(trajectory) - 1, params["samples"]).round().astype(int))
    checks = []
    for i in samples:
        result = DistinguishabilityResult(trace.values[i], trace.witnesses[i], None, params["restarts"], scenario.seed)
        value = min_entropy(inst, trajectory, float(trajectory.grid[i]), result=result)
        checks.append({"time": float(trajectory.grid[i]), "H_min": value, "helstrom_agreement": True})
    results = trace.to_config()
    results["helstrom_checks"] = checks
    results["min_entropy_decreases"] = [t for t, _ in trace.violations]
    statistics = {
        "seed": scenario.seed, "restarts": params["restarts"], "warm_restarts": params["warm_restarts"],
        "cold_start": params["cold_start"],
    }
    return results, _trace_flags(trace), statistics


def _run_witness_search(scenario, trajectory, threads, progress):
    params = scenario.params
    result = witness_search(
        trajectory, params["k"], p=params["p"], families=params["families"], budget=params["budget"], seed=scenario.seed,
        restarts=params["search_restarts"], threads=threads, progress=progress, threshold=params["threshold"],
    )
    statistics = {
        "seed": scenario.seed, "budget": params["budget"], "search_restarts": params["search_restarts"],
        "candidates_evaluated": result.candidates,
    }
    return result.to_config(), {"violation": result.found}, statistics


_runners = {
    "simulate": _run_simulate,
    "divisibility": _run_divisibility,
    "discriminate": _run_discriminate,
    "hierarchy": _run_hierarchy,
    "monotonicity": _run_monotonicity,
    "minentropy": _run_minentropy,
    "witness-search": _run_witness_search,
}


def execute(scenario, threads=1, progress=False):
    """Run the scenario's task and collect a `Report`

    Parameters
    ----------
    scenario : Scenario
    threads : int, optional
        Worker-thread cap handed to the library.
    progress : bool, optional

    Raises
    ------
    ValidationError, NumericalError
        Propagated from the library for the caller to map onto exit codes.

    """
    timings = {}
    trajectory = None
    if scenario.evolves:
        with _timed(timings, "integration"):
            trajectory = scenario.trajectory()
    with _timed(timings, scenario.task):
        results, flags, statistics = _runners[scenario.task](scenario, trajectory, threads, progress)
    report = Report(scenario.to_config(), results, statistics, flags)
    report.timings = timings
    report.trajectory = trajectory
    logger.info("%r", report)
    return report


def _check(failures, label, claimed, value, tolerance):
    if not abs(value - claimed) <= tolerance:
        failures.append(f"{label}: claimed {claimed!r}, re-evaluated {value!r}")


def _check_trace(failures, trace, trajectory, phi1, phi2, tolerance, label="trace"):
    for entry in trace["trace"]:
        i = trajectory.index(entry["time"])
        witness = entry["witness"]
        if isinstance(witness, int):
            t_matrix = trajectory[i]
            q = np.zeros(trajectory.dim)
            q[witness] = 1.0
            value = classical_objective(t_matrix @ phi1, t_matrix @ phi2, trace["p"], q)
        else:
            inst = evolved_pair(trajectory, i, phi1, phi2, trace["p"], trace["k"])
            value = evaluate_input(inst, SchmidtVector.from_config(witness))
        _check(failures, f"{label} at t = {entry['time']}", entry["D"], value, tolerance)


def _revalidate_divisibility(report, scenario, tolerance):
    trajectory = scenario.trajectory()
    offset = propagator_offset(trajectory, report.results["epsilon"])
    failures = []
    for entry in report.results["scan"]:
        i = trajectory.index(entry["time"])
        verdict = KPositivityVerdict.from_config(entry)
        m = propagator_map(trajectory, i, i + offset)
        _check(failures, f"k-positivity witness at t = {entry['time']}", verdict.min_value, verdict.witness.expectation(m.choi), tolerance)
    return failures


def _revalidate_discriminate(report, scenario, tolerance):
    failures = []
    inst = _instance(scenario, report.results["k"])
    value = evaluate_input(inst, SchmidtVector.from_config(report.results["optimal_input"]))
    _check(failures, "optimal input", report.results["value"], value, tolerance)
    return failures


def _revalidate_hierarchy(report, scenario, tolerance):
    failures = []
    for entry in report.results["chain"]:
        inst = _instance(scenario, entry["k"])
        value = evaluate_input(inst, SchmidtVector.from_config(entry["optimal_input"]))
        _check(failures, f"optimal input for k = {entry['k']}", entry["value"], value, tolerance)
    return failures


def _revalidate_trace(report, scenario, tolerance):
    failures = []
    _check_trace(failures, report.results, scenario.trajectory(), scenario.phi1, scenario.phi2, tolerance)
    return failures


def _revalidate_witness_search(report, scenario, tolerance):
    results = report.results
    if not results["found"]:
        return []
    phi1 = maps.map_from_config(results["phi1"], name="results.phi1")
    phi2 = maps.map_from_config(results["phi2"], name="results.phi2")
    failures = []
    _check_trace(failures, results["trace"], scenario.trajectory(), phi1, phi2, tolerance, label="witness trace")
    values = [entry["D"] for entry in results["trace"]["trace"]]
    _check(failures, "largest increase", results["increase"], float(np.max(np.diff(values), initial=0.0)), tolerance)
    return failures


_revalidators = {
    "divisibility": _revalidate_divisibility,
    "discriminate": _revalidate_discriminate,
    "hierarchy": _revalidate_hierarchy,
    "monotonicity": _revalidate_trace,
    "minentropy": _revalidate_trace,
    "witness-search": _revalidate_witness_search,
}


def _write_csv(rows, columns, path):
    import pandas as pd
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return path


def _trace_rows(trace):
    return [[entry[column] if column != "violation_flag" else int(entry[column]) for column in trace_columns] for entry in trace]


def export_plot_data(report, out_dir):
    """Write the report's time series as CSV files in `out_dir`

    Monotonicity and min-entropy traces go to `trace.csv` (columns time, D,
    dD_dt, H_min, violation_flag); a successful witness search writes its
    window to `witness_trace.csv`, and an unsuccessful one a header-only file;
    hierarchies go to `hierarchy.csv` (k, D_k); divisibility scans to
    `divisibility.csv`; simulations to `drift.csv`.

    Returns
    -------
    paths : list of pathlib.Path

    """
    from pathlib import Path
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = report.results
    paths = []
    if report.task in ("monotonicity", "minentropy"):
        paths.append(_write_csv(_trace_rows(results["trace"]), trace_columns, out_dir / "trace.csv"))
    elif report.task == "witness-search":
        rows = _trace_rows(results["trace"]["trace"]) if results["found"] else []
        paths.append(_write_csv(rows, trace_columns, out_dir / "witness_trace.csv"))
    elif report.task == "hierarchy":
        rows = [[entry["k"], entry["value"]] for entry in results["chain"]]
        paths.append(_write_csv(rows, hierarchy_columns, out_dir / "hierarchy.csv"))
    elif report.task == "divisibility":
        rows = [[entry[column] for column in divisibility_columns] for entry in results["scan"]]
        paths.append(_write_csv(rows, divisibility_columns, out_dir / "divisibility.csv"))
    elif report.task == "simulate":
        rows = [[entry["time"], entry["drift"]] for entry in results["drift"]]
        paths.append(_write_csv(rows, drift_columns, out_dir / "drift.csv"))
    for path in paths:
        logger.info("Wrote %s", path)
    return paths


def write_timings(report, out_dir):
    """Sidecar `timing.json` with the wall-clock seconds of each stage"""
    from pathlib import Path
    path = Path(out_dir) / "timing.json"
    with path.open("w", encoding="utf-8", newline="\n") as f:
        json.dump({"task": report.task, "seconds": report.timings}, f, indent=4, sort_keys=True)
        f.write("\n")
    return path


def load(file):
    """Read a report file"""
    return Report.load(file)


def save(report, file):
    return report.save(file)
