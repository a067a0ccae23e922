"""Scenario documents: what to simulate, which task to run on it, and with which parameters

A scenario is a JSON object tagged `"kdiv_format": "scenario"`.  Members whose
names start with an underscore are ignored, so files can carry comments:

    {
        "kdiv_format": "scenario",
        "_comment": "Pauli semigroup, qubit ancilla",
        "task": "monotonicity",
        "generator": {"preset": "semigroup"},
        "grid": {"t_max": 2.0, "step": 0.01},
        "channels": {
            "phi1": {"kind": "preset", "name": "identity", "params": {"dim": 2}},
            "phi2": {"kind": "preset", "name": "completely_depolarizing"}
        },
        "params": {"k": 2, "p": 0.5, "restarts": 32},
        "seed": 1234,
        "output": {"dir": "semigroup-k2"}
    }

Classical scenarios use a generator block with `"kind": "classical"` and give
the channel pair as stochastic matrices `"s1"` and `"s2"`.

"""

import json
import logging
import numpy as np
import inflection

from .. import linops
from ..channels import maps
from ..channels.schmidt import default_restarts
from ..dynamics import generators, classical
from ..dynamics.integration import check_grid, default_max_substep
from ..discrimination.monotonicity import (
    violation_threshold, default_warm_restarts, default_search_restarts, default_budget, witness_families,
)
from ..utilities import read_config
from ..utilities.errors import ValidationError

logger = logging.getLogger(__name__)

format_tag = "scenario"

tasks = ("simulate", "divisibility", "discriminate", "hierarchy", "monotonicity", "minentropy", "witness-search")

# Tasks that need no dynamics, and tasks that accept a classical generator
static_tasks = ("discriminate", "hierarchy")
classical_tasks = ("simulate", "monotonicity")
channel_tasks = ("discriminate", "hierarchy", "monotonicity", "minentropy")

top_level_keys = ("kdiv_format", "task", "generator", "grid", "channels", "params", "seed", "output")

default_output_dir = "kdiv-output"
default_samples = 10


def parameter_defaults():
    """Task parameters and their defaults; `k = None` stands for the system dimension"""
    return {
        "k": None,
        "p": 0.5,
        "epsilon": None,
        "restarts": read_config("restarts", default_restarts),
        "warm_restarts": default_warm_restarts,
        "search_restarts": default_search_restarts,
        "budget": default_budget,
        "cold_start": False,
        "families": list(witness_families),
        "samples": default_samples,
        "max_substep": default_max_substep,
        "threshold": violation_threshold,
    }


def normalize_task(task):
    """`witness_search`, `WitnessSearch` and `witness-search` all name the same task"""
    if not isinstance(task, str) or not task:
        raise ValidationError(f"must be one of {list(tasks)}, not {task!r}", field="task")
    name = inflection.dasherize(inflection.underscore(task.strip()))
    if name not in tasks:
        raise ValidationError(f"unknown task {task!r}; choose from {list(tasks)}", field="task")
    return name


def strip_comments(document):
    """Drop members whose names start with an underscore, at every depth"""
    if isinstance(document, dict):
        return {key: strip_comments(value) for key, value in document.items() if not str(key).startswith("_")}
    if isinstance(document, list):
        return [strip_comments(value) for value in document]
    return document


def grid_from_config(block):
    """Times from `{"t_max", "step"}` or an explicit list"""
    if isinstance(block, dict):
        unknown = set(block) - {"t_max", "step"}
        if unknown:
            raise ValidationError(f"unknown members {sorted(unknown)}", field="grid")
        try:
            t_max, step = float(block["t_max"]), float(block["step"])
        except KeyError as e:
            raise ValidationError(f"missing member {e.args[0]!r}", field="grid") from e
        except (TypeError, ValueError) as e:
            raise ValidationError("t_max and step must be numbers", field="grid") from e
        if not (np.isfinite(t_max) and np.isfinite(step)) or step <= 0 or t_max < 0:
            raise ValidationError(f"needs step > 0 and t_max >= 0, got step = {step}, t_max = {t_max}", field="grid")
        n = int(round(t_max / step))
        if abs(n * step - t_max) > 1e-9 * max(1.0, t_max):
            raise ValidationError(f"t_max = {t_max} is not a multiple of step = {step}", field="grid")
        return step * np.arange(n + 1)
    if isinstance(block, list):
        try:
            return check_grid(np.array(block, dtype=float))
        except (TypeError, ValueError) as e:
            if isinstance(e, ValidationError):
                raise
            raise ValidationError("times must be numbers", field="grid") from e
    raise ValidationError("expected {\"t_max\", \"step\"} or a list of times", field="grid")


def _uniform_step(grid):
    if grid.size < 2:
        return None
    steps = np.diff(grid)
    return float(steps[0]) if np.allclose(steps, steps[0], rtol=1e-6, atol=0) else None


def _integer(value, field, minimum):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"must be an integer, not {value!r}", field=field)
    if value < minimum:
        raise ValidationError(f"must be at least {minimum}, not {value}", field=field)
    return int(value)


def _number(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"must be a number, not {value!r}", field=field)
    return float(value)


class Scenario(object):
    """A validated scenario

    Attributes
    ----------
    task : str
    generator : GKSLGenerator, KolmogorovGenerator, or None
    grid : ndarray or None
    params : dict
        Every task parameter, defaults filled in and `k` resolved.
    phi1, phi2 : channels (quantum) or stochastic matrices (classical), or None
    seed : int
    output : dict
    dim : int
        System dimension.

    """

    def __init__(self, task, generator, grid, grid_config, channels_config, phi1, phi2, params, seed, output):
        self.task = task
        self.generator = generator
        self.grid = grid
        self._grid_config = grid_config
        self._channels_config = channels_config
        self.phi1, self.phi2 = phi1, phi2
        self.params = params
        self.seed = seed
        self.output = output

    @property
    def classical(self):
        return isinstance(self.generator, classical.KolmogorovGenerator)

    @property
    def evolves(self):
        """True when the task runs on an integrated trajectory"""
        return self.generator is not None and self.task not in static_tasks

    @property
    def dim(self):
        if self.generator is not None:
            return self.generator.dim
        return self.phi1.dim_in

    @classmethod
    def from_file(cls, path, **overrides):
        """Read and validate a scenario file; see `from_config` for `overrides`"""
        from pathlib import Path
        path = Path(path).expanduser()
        try:
            with path.open("r", encoding="utf-8") as f:
                document = json.load(f)
        except FileNotFoundError as e:
            raise ValidationError(f"no such file: {path}", field="config") from e
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path} is not valid JSON: {e}", field="config") from e
        return cls.from_config(document, **overrides)

    @classmethod
    def from_config(cls, document, task=None, seed=None, out_dir=None, **param_overrides):
        """Validate a scenario document

        Parameters
        ----------
        document : dict
        task : str, optional
            Replaces the document's task.
        seed : int, optional
            Replaces the document's seed.
        out_dir : str, optional
            Replaces the output directory.
        param_overrides
            Task parameters (`k`, `p`, `epsilon`, `restarts`, ...) replacing the
            document's; None values are ignored.

        Raises
        ------
        ValidationError
            Naming the first offending member.

        """
        if not isinstance(document, dict):
            raise ValidationError("a scenario must be a JSON object", field="config")
        document = strip_comments(document)
        tag = document.get("kdiv_format", format_tag)
        if tag != format_tag:
            raise ValidationError(f"expected {format_tag!r}, found {tag!r}", field="kdiv_format")
        unknown = set(document) - set(top_level_keys)
        if unknown:
            raise ValidationError(f"unknown members {sorted(unknown)}", field="config")

        task = normalize_task(task if task is not None else document.get("task"))

        generator = None
        if "generator" in document:
            block = document["generator"]
            if isinstance(block, dict) and block.get("kind") == "classical":
                generator = classical.kolmogorov_from_config(block)
            else:
                generator = generators.generator_from_config(block)
        elif task not in static_tasks:
            raise ValidationError(f"task {task!r} needs a generator", field="generator")
        if isinstance(generator, classical.KolmogorovGenerator) and task not in classical_tasks:
            raise ValidationError(
                f"task {task!r} needs a quantum generator; classical ones support {list(classical_tasks)}",
                field="generator",
            )

        grid_config, grid = document.get("grid"), None
        if task not in static_tasks:
            if grid_config is None:
                raise ValidationError(f"task {task!r} needs a time grid", field="grid")
            grid = grid_from_config(grid_config)

        params = parameter_defaults()
        given = document.get("params", {})
        if not isinstance(given, dict):
            raise ValidationError("must be an object", field="params")
        unknown = set(given) - set(params)
        if unknown:
            raise ValidationError(f"unknown members {sorted(unknown)}", field="params")
        params.update(given)
        params.update({key: value for key, value in param_overrides.items() if value is not None})
        unknown = set(params) - set(parameter_defaults())
        if unknown:
            raise ValidationError(f"unknown parameters {sorted(unknown)}", field="params")

        channels_config = document.get("channels")
        phi1 = phi2 = None
        if task in channel_tasks:
            if not isinstance(channels_config, dict):
                raise ValidationError(f"task {task!r} needs a channel pair", field="channels")
            if isinstance(generator, classical.KolmogorovGenerator):
                for name in ("s1", "s2"):
                    if name not in channels_config:
                        raise ValidationError(f"missing stochastic matrix {name!r}", field="channels")
                phi1, phi2 = (
                    classical.check_stochastic(
                        np.real(linops.matrix_from_json(channels_config[name], name=f"channels.{name}")),
                        name=f"channels.{name}",
                    )
                    for name in ("s1", "s2")
                )
            else:
                for name in ("phi1", "phi2"):
                    if name not in channels_config:
                        raise ValidationError(f"missing channel {name!r}", field="channels")
                phi1, phi2 = (maps.map_from_config(channels_config[name], name=f"channels.{name}") for name in ("phi1", "phi2"))
                for name, phi in (("phi1", phi1), ("phi2", phi2)):
                    if not isinstance(phi, maps.Channel) or not phi.is_cptp:
                        raise ValidationError("must be completely positive and trace preserving", field=f"channels.{name}")
                    if phi.dim_in != phi.dim_out:
                        raise ValidationError(f"must map a space to itself, got dims {list(phi.dims)}", field=f"channels.{name}")
                if phi1.dims != phi2.dims:
                    raise ValidationError(f"dims {list(phi1.dims)} and {list(phi2.dims)} differ", field="channels.phi2")
            dim = phi1.shape[0] if isinstance(phi1, np.ndarray) else phi1.dim_in
            if generator is not None and dim != generator.dim:
                raise ValidationError(f"channel dim {dim} differs from the generator dim {generator.dim}", field="channels")

        if seed is None:
            seed = document.get("seed")
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % 2**63)
            logger.warning("No seed given; using %d", seed)
        seed = _integer(seed, "seed", 0)

        output = document.get("output", {})
        if not isinstance(output, dict) or set(output) - {"dir"}:
            raise ValidationError("expected an object with a single member 'dir'", field="output")
        output = {"dir": str(out_dir if out_dir is not None else output.get("dir", default_output_dir))}

        scenario = cls(task, generator, grid, grid_config, channels_config, phi1, phi2, params, seed, output)
        scenario.params = scenario._check_params(params)
        return scenario

    def _check_params(self, params):
        params = dict(params)
        dim = self.dim
        if params["k"] is None:
            params["k"] = dim
        params["k"] = _integer(params["k"], "params.k", 1)
        if params["k"] > dim:
            raise ValidationError(f"must satisfy 1 <= k <= {dim}, not {params['k']}", field="params.k")
        params["p"] = _number(params["p"], "params.p")
        if not 0 <= params["p"] <= 1:
            raise ValidationError(f"must lie in [0, 1], not {params['p']}", field="params.p")
        for name in ("restarts", "warm_restarts", "search_restarts"):
            params[name] = _integer(params[name], f"params.{name}", 0)
        for name in ("budget", "samples"):
            params[name] = _integer(params[name], f"params.{name}", 1)
        if not isinstance(params["cold_start"], bool):
            raise ValidationError(f"must be true or false, not {params['cold_start']!r}", field="params.cold_start")
        for name in ("max_substep", "threshold"):
            params[name] = _number(params[name], f"params.{name}")
            if not params[name] > 0:
                raise ValidationError(f"must be positive, not {params[name]}", field=f"params.{name}")
        families = params["families"]
        if not isinstance(families, list) or not families:
            raise ValidationError("must be a non-empty list", field="params.families")
        for family in families:
            if family not in witness_families:
                raise ValidationError(f"unknown family {family!r}; choose from {list(witness_families)}", field="params.families")
        if "pauli" in families and self.task == "witness-search" and dim != 2:
            raise ValidationError("Pauli candidates need a qubit system", field="params.families")
        if params["epsilon"] is not None:
            params["epsilon"] = _number(params["epsilon"], "params.epsilon")
            if self.grid is not None:
                step = _uniform_step(self.grid)
                if step is None:
                    raise ValidationError("epsilon can only be given on a uniform grid", field="params.epsilon")
                offset = int(round(params["epsilon"] / step))
                if offset < 1 or abs(offset * step - params["epsilon"]) > 1e-9 * max(1.0, params["epsilon"]):
                    raise ValidationError(
                        f"{params['epsilon']} is not a positive multiple of the grid step {step}", field="params.epsilon"
                    )
        if self.task == "witness-search" and self.grid.size < 2:
            raise ValidationError("needs at least two grid times", field="grid")
        return params

    def trajectory(self):
        """Integrate the generator over the grid"""
        from ..dynamics import integrate, classical_integrate
        if self.generator is None:
            raise ValidationError(f"task {self.task!r} has no dynamics", field="generator")
        if self.classical:
            return classical_integrate(self.generator, self.grid, max_substep=self.params["max_substep"])
        return integrate(self.generator, self.grid, max_substep=self.params["max_substep"])

    def to_config(self):
        """Normalized document; validating it again reproduces this scenario"""
        config = {
            "kdiv_format": format_tag,
            "task": self.task,
            "params": dict(self.params),
            "seed": self.seed,
            "output": dict(self.output),
        }
        if self.generator is not None:
            config["generator"] = self.generator.to_config()
        if self._grid_config is not None:
            config["grid"] = self._grid_config
        if self._channels_config is not None:
            config["channels"] = self._channels_config
        return config

    def __repr__(self):
        return f"Scenario(task={self.task!r}, dim={self.dim}, seed={self.seed})"


def load(file, **overrides):
    """Read and validate a scenario file"""
    return Scenario.from_file(file, **overrides)


def save(scenario, file):
    """Write the normalized form of `scenario` as JSON"""
    from pathlib import Path
    with Path(file).open("w", encoding="utf-8", newline="\n") as f:
        json.dump(scenario.to_config(), f, indent=4, sort_keys=True)
        f.write("\n")

