"""Experiment configuration: INI documents with one section per training phase.

Example::

    [experiment]
    preset = 3a           ; fill unspecified keys from the built-in preset
    structure = symmetric

    [drift]
    feature_count = 128
    tikhonov = 0.002
    step_length = 0.1
    metropolis_exponent = 1

    [diffusion]
    ...

Without ``preset`` every phase must list ``feature_count``, ``tikhonov``,
``step_length`` and ``metropolis_exponent``.
"""

import configparser
from dataclasses import dataclass, fields

import numpy as np

from .arff import ArffConfig
from .errors import ConfigError
from .learner import STRUCTURES
from .problems import PROBLEM_IDS, get_problem

REQUIRED_KEYS = ("feature_count", "tikhonov", "step_length", "metropolis_exponent")
DEFAULT_REPETITIONS = 10
PHASES = ("drift", "diffusion")
_TYPES = {f.name: f.type for f in fields(ArffConfig)}
_CASTS = {"int": int, "float": float, int: int, float: float}


def derive_seed(seed, *tags):
    """Deterministic 63-bit child seed of ``seed`` for the given integer tags."""
    state = np.random.SeedSequence([int(seed) % 2 ** 64, *map(int, tags)]).generate_state(
        2, np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def preset_configs(problem_id, seed=0):
    """Default drift/diffusion configs for a benchmark problem."""
    spec = get_problem(problem_id)
    base = ArffConfig(feature_count=spec.layer_size)
    drift = base.replace(rng_seed=derive_seed(seed, 2), **spec.drift_overrides)
    diffusion = base.replace(rng_seed=derive_seed(seed, 3), **spec.diffusion_overrides)
    return drift, diffusion


@dataclass
class ExperimentConfig:
    problem_id: str
    drift: ArffConfig
    diffusion: ArffConfig
    structure: str = "symmetric"
    seed: int = 0
    repetitions: int = DEFAULT_REPETITIONS
    out_dir: str = "."

    def __post_init__(self):
        if self.problem_id is not None and self.problem_id not in PROBLEM_IDS:
            raise ConfigError(f"unknown problem id {self.problem_id!r}", "experiment.preset")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be positive", "experiment.repetitions")


def default_experiment(problem_id, seed=0, repetitions=DEFAULT_REPETITIONS, out_dir="."):
    drift, diffusion = preset_configs(problem_id, seed)
    return ExperimentConfig(problem_id, drift, diffusion, get_problem(problem_id).structure,
                            seed, repetitions, out_dir)


def _phase_config(section, name, base, seed):
    values = {}
    for key, raw in section.items():
        if key not in _TYPES or key == "rng_seed":
            if key == "seed":
                continue
            raise ConfigError(f"unknown key {name}.{key}", f"{name}.{key}")
        try:
            values[key] = _CASTS[_TYPES[key]](raw)
        except ValueError:
            raise ConfigError(f"{name}.{key}: cannot parse {raw!r}", f"{name}.{key}") from None
    if base is None:
        for key in REQUIRED_KEYS:
            if key not in values:
                raise ConfigError(f"missing required key {name}.{key}", f"{name}.{key}")
        base = ArffConfig(feature_count=values["feature_count"])
    if "seed" in section:
        try:
            values["rng_seed"] = int(section["seed"])
        except ValueError:
            raise ConfigError(f"{name}.seed must be an integer", f"{name}.seed") from None
    else:
        values["rng_seed"] = seed
    try:
        return base.replace(**values)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}", name) from None


def parse_config(text, seed=0, problem_id=None):
    """Parse an INI document into an :class:`ExperimentConfig`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    preset = exp.get("preset")
    pid = preset or problem_id
    if pid is not None and str(pid) not in PROBLEM_IDS:
        raise ConfigError(f"unknown problem id {pid!r}", "experiment.preset")
    bases = preset_configs(preset, seed) if preset else (None, None)
    phases = []
    for name, base, tag in zip(PHASES, bases, (2, 3)):
        if not parser.has_section(name):
            if base is None:
                raise ConfigError(f"missing section [{name}]", name)
            phases.append(base)
            continue
        phases.append(_phase_config(parser[name], name, base, derive_seed(seed, tag)))
    structure = exp.get("structure") or (get_problem(pid).structure if pid else "symmetric")
    if structure not in STRUCTURES:
        raise ConfigError(f"unknown structure {structure!r}", "experiment.structure")
    try:
        reps = int(exp.get("repetitions", DEFAULT_REPETITIONS))
    except ValueError:
        raise ConfigError("repetitions must be an integer", "experiment.repetitions") from None
    return ExperimentConfig(str(pid) if pid else None, phases[0], phases[1], structure, seed,
                            reps)


def load_config(path, seed=0, problem_id=None):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        from .io import DataFileError
        raise DataFileError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, seed, problem_id)
