"""Command-line front end

    kdiv validate --config scenario.json
    kdiv run --config scenario.json --seed 7 --threads 4
    kdiv monotonicity --config scenario.json --k 2 --out-dir results
    kdiv revalidate --report results/report.json

Every task subcommand runs the named task on the scenario, overriding the task
the scenario names; `run` keeps the scenario's own task.  Exit codes are 0 on
success, 2 when the scenario or a parameter is invalid, 3 when the numerics fail
(integration drift or a singular dynamical map), and 4 when a violation of
divisibility is certified.

"""

import sys
import logging
import argparse

from .. import __version__
from ..channels.schmidt import default_restarts
from ..discrimination.monotonicity import default_budget, violation_threshold
from ..utilities import default_threads, read_config, fit_to_console
from ..utilities.errors import ValidationError, NumericalError
from .scenario import Scenario, tasks, default_output_dir
from .report import Report, execute, export_plot_data, write_timings

logger = logging.getLogger("kdiv")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_VIOLATION = 4

task_help = {
    "simulate": "integrate the generator and write the trajectory archive",
    "divisibility": "test k-positivity of the propagators at every grid time",
    "discriminate": "ancilla-assisted distinguishability of the channel pair",
    "hierarchy": "distinguishabilities D_1, ..., D_d of the channel pair",
    "monotonicity": "distinguishability of the evolved channel pair along the trajectory",
    "minentropy": "conditional min-entropy along the trajectory, cross-checked by Helstrom measurements",
    "witness-search": "randomized search for a channel pair whose distinguishability increases",
}


def _verbosity_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more log output on stderr (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    return parser


def _scenario_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", required=True, metavar="PATH", help="scenario file (JSON)")
    parser.add_argument("--seed", type=int, help="master seed (default: the scenario's, else drawn and logged)")
    parser.add_argument(
        "--restarts", type=int,
        help=f"random starts per optimization (default: the scenario's, else config 'restarts', else {default_restarts})",
    )
    parser.add_argument("--epsilon", type=float, help="propagator length for divisibility scans (default: one grid step)")
    parser.add_argument("--k", type=int, help="ancilla dimension / Schmidt-rank bound (default: the system dimension)")
    parser.add_argument("--p", type=float, help="prior weight of the second channel (default: 0.5)")
    parser.add_argument("--budget", type=int, help=f"witness-search candidates (default: {default_budget})")
    parser.add_argument(
        "--cold-start", action="store_true", default=None,
        help="optimize every time of a trace independently (default: warm-start from the previous time)",
    )
    parser.add_argument(
        "--threads", type=int,
        help="worker-thread cap (default: $KDIV_THREADS, else config 'threads', else 1)",
    )
    parser.add_argument("--out-dir", metavar="DIR", help=f"output directory (default: the scenario's, else {default_output_dir!r})")
    parser.add_argument(
        "--progress", action="store_true", default=None,
        help="show progress bars (default: config 'progress', else off)",
    )
    return parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kdiv",
        description=(
            "Witness k-divisibility of quantum dynamical maps through ancilla-assisted channel discrimination. "
            f"Increases of the distinguishability above {violation_threshold:g} are flagged as violations."
        ),
        epilog="exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 violation certified",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    verbosity, scenario = _verbosity_options(), _scenario_options()

    subparsers.add_parser(
        "validate", parents=[scenario, verbosity], help="parse and check a scenario without computing anything"
    )
    subparsers.add_parser("run", parents=[scenario, verbosity], help="run the task named in the scenario")
    for task in tasks:
        subparsers.add_parser(task, parents=[scenario, verbosity], help=task_help[task])

    revalidate = subparsers.add_parser(
        "revalidate", parents=[verbosity], help="re-evaluate every witness embedded in a report"
    )
    revalidate.add_argument("--report", required=True, metavar="PATH", help="report file (JSON)")
    export = subparsers.add_parser("export", parents=[verbosity], help="write the CSV time series of a report")
    export.add_argument("--report", required=True, metavar="PATH", help="report file (JSON)")
    export.add_argument("--out-dir", required=True, metavar="DIR", help="output directory")
    return parser


def configure_logging(verbose=0, quiet=False):
    if quiet:
        level = logging.ERROR
    else:
        level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    logging.captureWarnings(True)


def load_scenario(args):
    task = None if args.command in ("validate", "run") else args.command
    return Scenario.from_file(
        args.config, task=task, seed=args.seed, out_dir=args.out_dir,
        k=args.k, p=args.p, epsilon=args.epsilon, restarts=args.restarts, budget=args.budget, cold_start=args.cold_start,
    )


def thread_cap(args):
    """`--threads`, else `KDIV_THREADS`, else the config file, else 1"""
    if args.threads is None:
        return default_threads()
    if args.threads < 1:
        raise ValidationError(f"must be at least 1, not {args.threads}", field="--threads")
    return args.threads


def run(args):
    """Execute a task subcommand and write its outputs; returns the exit code"""
    from pathlib import Path
    scenario = load_scenario(args)
    threads = thread_cap(args)
    progress = args.progress if args.progress is not None else bool(read_config("progress", False))
    logger.info("Running %r on %d thread(s)", scenario, threads)
    report = execute(scenario, threads=threads, progress=progress)

    out_dir = Path(scenario.output["dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    report.save(out_dir / "report.json")
    export_plot_data(report, out_dir)
    write_timings(report, out_dir)
    if scenario.task == "simulate":
        from ..dynamics import trajectory_h5
        trajectory_h5.save(report.trajectory, out_dir / "trajectory.h5")

    flags = report.flags
    if flags["violation"]:
        logger.warning("Violation certified; see %s", out_dir / "report.json")
    if flags["singular_time"] is not None:
        logger.error("Dynamical map became singular at t = %.6g", flags["singular_time"])
    for name in ("marginal", "inconclusive"):
        if flags[name]:
            logger.warning("%d %s time(s), first at t = %.6g", len(flags[name]), name, flags[name][0])
    return report.exit_code


def main(argv=None):
    """Entry point of the `kdiv` console script; returns the exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        if args.command == "validate":
            scenario = load_scenario(args)
            logger.info("Normalized scenario:\n%s", fit_to_console(scenario.to_config(), subsequent_indent="  "))
            print("ok")
            return EXIT_OK
        if args.command == "revalidate":
            failures = Report.load(args.report).revalidate()
            for failure in failures:
                print(failure, file=sys.stderr)
            print("ok" if not failures else f"{len(failures)} witness(es) failed to reproduce")
            return EXIT_OK if not failures else EXIT_NUMERICAL
        if args.command == "export":
            for path in export_plot_data(Report.load(args.report), args.out_dir):
                print(path)
            return EXIT_OK
        return run(args)
    except ValidationError as e:
        logger.error("Invalid input: %s", e)
        return EXIT_VALIDATION
    except NumericalError as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error("%s", e)
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
