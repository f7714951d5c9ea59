"""Benchmark problems: ground truth and dataset generators."""

from ..errors import InvalidArgumentError
from .base import (NumericError, ProblemSpec, em_step, generate_snapshots, integrate_em,
                   polynomial_problems, sample_uniform)
from .langevin import generate_langevin, langevin_problem, symplectic_em_step
from .sir import SirState, generate_sir, sample_simplex, sir_problem, sir_rates, ssa_trajectory
from .wave import generate_wave, integrate_wave, wave_problem, wave_snapshots

PROBLEM_IDS = ("1", "2", "3a", "3b", "4a", "4b", "5", "6", "7")


def get_problem(problem_id, **params):
    """Look up a problem by id; ``params`` override entries of ``spec.params``."""
    pid = str(problem_id)
    if pid == "6":
        spec = sir_problem(params.pop("n_pop")) if "n_pop" in params else sir_problem()
    else:
        specs = {p.id: p for p in polynomial_problems()}
        specs["5"] = langevin_problem()
        specs["7"] = wave_problem()
        if pid not in specs:
            raise InvalidArgumentError(f"unknown problem id {problem_id!r}")
        spec = specs[pid]
    if params:
        spec = spec.with_params(params={**spec.params, **params})
    return spec


def generate(spec, rng, split_seed=0, **kwargs):
    """Dispatch to the generator matching ``spec.kind``."""
    gen = {"sde": generate_snapshots, "langevin": generate_langevin,
           "sir": generate_sir, "wave": generate_wave}[spec.kind]
    ds = gen(spec, rng, split_seed=split_seed, **kwargs)
    ds.meta["problem"] = spec.id
    return ds


__all__ = [
    "PROBLEM_IDS", "NumericError", "ProblemSpec", "SirState", "em_step", "generate",
    "generate_langevin", "generate_sir", "generate_snapshots", "generate_wave",
    "get_problem", "integrate_em", "integrate_wave", "sample_simplex", "sample_uniform",
    "sir_rates", "ssa_trajectory", "symplectic_em_step", "wave_snapshots",
]
