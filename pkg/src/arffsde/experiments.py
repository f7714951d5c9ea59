"""Repeated generate -> train -> evaluate runs of the benchmark problems."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import derive_seed, preset_configs
from .learner import learn_sde
from .likelihood import total_loss
from .problems import generate, get_problem

REFERENCE_LABEL = "reference value, not reproduced"


@dataclass
class RunResult:
    repetition: int
    seeds: dict
    min_nll: float
    floor: float
    n_rejected: int
    drift_iterations: int
    diffusion_iterations: int
    seconds: float


def generate_for_run(spec, seed, rep, **kwargs):
    rng = np.random.default_rng(derive_seed(seed, rep, 0))
    return generate(spec, rng, split_seed=derive_seed(seed, rep, 1), **kwargs)


def run_once(problem_id, seed, rep, drift_config=None, diffusion_config=None, gen_kwargs=None):
    spec = get_problem(problem_id)
    data = generate_for_run(spec, seed, rep, **(gen_kwargs or {}))
    run_seed = derive_seed(seed, rep)
    d_cfg, s_cfg = preset_configs(problem_id, run_seed)
    d_cfg = d_cfg if drift_config is None else drift_config.replace(rng_seed=d_cfg.rng_seed)
    s_cfg = s_cfg if diffusion_config is None else diffusion_config.replace(
        rng_seed=s_cfg.rng_seed)
    res = learn_sde(data, d_cfg, s_cfg, spec.structure)
    _, va = data.train_validation()
    floor = total_loss(va, spec.drift, spec.covariance, strict=False)
    seeds = {"data": derive_seed(seed, rep, 0), "split": data.split_seed,
             "drift": d_cfg.rng_seed, "diffusion": s_cfg.rng_seed}
    return RunResult(rep, seeds, res.loss.total_loss, floor.total_loss, res.loss.n_rejected,
                     len(res.drift_trace.records) - 1, len(res.diffusion_trace.records) - 1,
                     res.seconds), res


def reproduce(problem_id, repetitions=10, seed=0, threads=1, timing=False, **kwargs):
    """Run ``repetitions`` seeded experiments; results are ordered by repetition."""
    def job(rep):
        return run_once(problem_id, seed, rep, **kwargs)[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(job, range(repetitions)))
    else:
        runs = [job(r) for r in range(repetitions)]
    return summarize(problem_id, runs, seed, timing)


def summarize(problem_id, runs, seed, timing=False):
    spec = get_problem(problem_id)
    nll = np.array([r.min_nll for r in runs])
    row = {
        "experiment": spec.id,
        "layer_size": spec.layer_size,
        "repetitions": len(runs),
        "seed": seed,
        "mean_min_nll": float(np.mean(nll)),
        "std_min_nll": float(np.std(nll, ddof=1)) if len(runs) > 1 else 0.0,
        "mean_floor": float(np.mean([r.floor for r in runs])),
        "mean_seconds": float(np.mean([r.seconds for r in runs])),
        "reference": {
            "expected_min_loss": spec.expected_min_loss,
            "arff_min_loss": spec.reported_min_loss,
            "adam_min_loss": spec.reported_adam_loss,
            "adam_note": REFERENCE_LABEL,
        },
        "runs": [dict(vars(r)) for r in runs],
    }
    if not timing:
        # Wall-clock values would make repeated runs differ.
        del row["mean_seconds"]
        for r in row["runs"]:
            del r["seconds"]
    return row


def format_table(rows, timing=False):
    head = ["exp", "K", "reps", "mean NLL", "std", "floor(ours)", "ref floor", "ref ARFF",
            f"ref Adam ({REFERENCE_LABEL})"]
    if timing:
        head.insert(5, "mean s")
    lines = [" | ".join(head)]
    for r in rows:
        ref = r["reference"]
        cells = [r["experiment"], str(r["layer_size"]), str(r["repetitions"]),
                 f"{r['mean_min_nll']:.4f}", f"{r['std_min_nll']:.4f}",
                 f"{r['mean_floor']:.4f}", _num(ref["expected_min_loss"]),
                 _num(ref["arff_min_loss"]), _num(ref["adam_min_loss"])]
        if timing:
            cells.insert(5, f"{r['mean_seconds']:.2f}")
        lines.append(" | ".join(cells))
    return "\n".join(lines)


def _num(v):
    return "-" if v is None else f"{v:.4f}"
