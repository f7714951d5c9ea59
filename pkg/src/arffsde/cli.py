"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 I/O failure.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import default_experiment, derive_seed, load_config
from .errors import ArffError, ConfigError, InvalidArgumentError
from .experiments import format_table, reproduce
from .io import (DataFileError, read_dataset, read_ensemble_csv, read_model, write_dataset,
                 write_ensemble_csv, write_json, write_model)
from .learner import config_echo, learn_sde
from .likelihood import total_loss
from .problems import PROBLEM_IDS, generate, get_problem
from .simulate import (compare_ensembles, initial_sampler, learned_dynamics, simulate_ensemble,
                       true_dynamics, write_histogram_csv, write_summary_json)

log = logging.getLogger("arffsde")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _problem_id(value):
    if value not in PROBLEM_IDS:
        raise argparse.ArgumentTypeError(
            f"unknown problem {value!r} (choose from {', '.join(PROBLEM_IDS)})")
    return value


def _generator_kwargs(args, spec):
    kw = {}
    if getattr(args, "t_max", None) is not None:
        if spec.kind != "wave":
            raise UsageError("--t-max only applies to problem 7")
        kw["t_max"] = args.t_max
    if getattr(args, "n_points", None) is not None:
        if spec.kind not in ("sde", "langevin"):
            raise UsageError("--n-points only applies to problems 1-5")
        kw["n_points"] = args.n_points
    return kw


def _spec(args):
    params = {}
    if getattr(args, "n_pop", None) is not None:
        params["n_pop"] = args.n_pop
    return get_problem(args.problem, **params)


def _out_dir(args):
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataFileError(f"cannot create output directory {out}: {exc}") from exc
    return out


def cmd_generate(args):
    spec = _spec(args)
    rng = np.random.default_rng(derive_seed(args.seed, 0))
    ds = generate(spec, rng, split_seed=derive_seed(args.seed, 1), **_generator_kwargs(args, spec))
    path = _out_dir(args) / f"dataset_{spec.id}.csv"
    sidecar = {"problem": spec.id, "seed": args.seed, "kind": spec.kind,
               "structure": spec.structure, "sample_step": spec.h,
               "generation_substeps": spec.substeps, "params": _echo_params(spec)}
    write_dataset(path, ds, sidecar)
    print(f"wrote {path} ({len(ds)} rows)")
    return EXIT_OK


def _echo_params(spec):
    return {k: v for k, v in spec.params.items() if isinstance(v, (int, float, str, tuple))}


def _experiment_for(args, meta):
    pid = meta.get("problem")
    if args.config:
        return load_config(args.config, args.seed, pid)
    if args.preset or pid:
        return default_experiment(args.preset or pid, args.seed)
    raise UsageError("dataset has no problem id; pass --config or --preset")


def cmd_train(args):
    ds = read_dataset(args.dataset)
    exp = _experiment_for(args, ds.meta)
    t0 = time.perf_counter()
    res = learn_sde(ds, exp.drift, exp.diffusion, exp.structure)
    seconds = time.perf_counter() - t0
    out = _out_dir(args)
    write_model(out / "model.json", res.sde, config_echo(exp.drift, exp.diffusion),
                {"problem": exp.problem_id, "dataset": Path(args.dataset).name})
    res.drift_trace.write_csv(out / "drift_trace.csv", args.timing)
    res.diffusion_trace.write_csv(out / "diffusion_trace.csv", args.timing)
    report = {"min_validation_nll": res.loss.to_dict(),
              "drift_stop": res.drift_trace.stop_reason,
              "diffusion_stop": res.diffusion_trace.stop_reason}
    if exp.problem_id:
        spec = get_problem(exp.problem_id, **_pop_override(ds.meta, exp.problem_id))
        _, va = ds.train_validation()
        report["expected_floor"] = total_loss(va, spec.drift, spec.covariance,
                                              strict=False).to_dict()
        report["reference_floor"] = spec.expected_min_loss
    if args.timing:
        report["wall_seconds"] = seconds
    write_json(out / "loss_report.json", report)
    print(f"validation NLL {res.loss.total_loss:.5f} "
          f"({res.loss.n_rejected} rejected); wrote {out / 'model.json'}")
    return EXIT_OK


def _pop_override(meta, pid):
    if str(pid) == "6" and "n_pop" in meta.get("params", {}):
        return {"n_pop": meta["params"]["n_pop"]}
    return {}


def cmd_eval(args):
    ds = read_dataset(args.dataset)
    sde, _ = read_model(args.model)
    if sde.drift.input_dim != ds.input_dim or sde.dim != ds.dim:
        raise InvalidArgumentError("model and dataset dimensions differ")
    part = ds if args.split == "all" else ds.train_validation()[args.split == "validation"]
    report = {"split": args.split,
              "learned": total_loss(part, sde.drift_fn, sde.covariance,
                                    strict=args.strict).to_dict()}
    pid = ds.meta.get("problem")
    if pid:
        spec = get_problem(pid, **_pop_override(ds.meta, pid))
        report["true_dynamics"] = total_loss(part, spec.drift, spec.covariance,
                                             strict=False).to_dict()
    write_json(_out_dir(args) / "eval_report.json", report)
    print(f"NLL {report['learned']['total_loss']:.5f} on {args.split} split")
    return EXIT_OK


def cmd_simulate(args):
    spec = _spec(args)
    if args.model:
        sde, _ = read_model(args.model)
        dyn = learned_dynamics(sde, "langevin" if spec.kind == "langevin" else "sde")
        label = args.label or "learned"
    else:
        dyn = true_dynamics(spec)
        label = args.label or "true"
    steps = args.steps or spec.sim_steps
    rng = np.random.default_rng(derive_seed(args.seed, 4))
    summary = simulate_ensemble(dyn, initial_sampler(spec), args.h or spec.h, steps, args.paths,
                                rng)
    summary.meta.update({"problem": spec.id, "label": label, "seed": args.seed})
    out = _out_dir(args)
    write_ensemble_csv(out / f"ensemble_{label}.csv", summary)
    write_summary_json(out / f"ensemble_{label}.json", summary)
    print(f"wrote {out / f'ensemble_{label}.csv'}")
    return EXIT_OK


def cmd_compare(args):
    a, b = read_ensemble_csv(args.first), read_ensemble_csv(args.second)
    result = compare_ensembles(a, b)
    out = _out_dir(args)
    write_json(out / "comparison.json", result)
    write_histogram_csv(out / "histograms.csv", a, b)
    print(f"max KS {result['max_ks']:.4f} (1% critical {result['ks_critical_1pct']:.4f})")
    return EXIT_OK


def cmd_reproduce(args):
    rows = []
    for pid in args.experiments:
        drift = diffusion = None
        if args.config:
            exp = load_config(args.config, args.seed, pid)
            drift, diffusion = exp.drift, exp.diffusion
        rows.append(reproduce(pid, args.reps, args.seed, args.threads, args.timing,
                              drift_config=drift, diffusion_config=diffusion))
    out = _out_dir(args)
    write_json(out / "results.json", {"rows": rows, "version": __version__})
    table = format_table(rows, args.timing)
    with open(out / "results.txt", "w") as fh:
        fh.write(table + "\n")
    print(table)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="arffsde", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads for reproduce")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock times (outputs are then not reproducible)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="generate a benchmark dataset")
    g.add_argument("problem", type=_problem_id)
    g.add_argument("--n-points", type=int)
    g.add_argument("--n-pop", type=int, help="SIR population size")
    g.add_argument("--t-max", type=float, help="wave problem final time")
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="learn drift and diffusion from a dataset")
    t.add_argument("dataset")
    t.add_argument("--config", help="INI experiment config")
    t.add_argument("--preset", type=_problem_id, help="use a problem's built-in defaults")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="score a model on a dataset")
    e.add_argument("dataset")
    e.add_argument("model")
    e.add_argument("--split", choices=("validation", "train", "all"), default="validation")
    e.add_argument("--strict", action="store_true", help="fail on non-PD covariances")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("simulate", help="simulate a trajectory ensemble")
    s.add_argument("problem", type=_problem_id)
    s.add_argument("--model", help="learned model bundle (default: true dynamics)")
    s.add_argument("--paths", type=int, default=10000)
    s.add_argument("--steps", type=int)
    s.add_argument("--h", type=float, help="step size (default: problem sample step)")
    s.add_argument("--n-pop", type=int)
    s.add_argument("--label")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="compare two ensemble CSV files")
    c.add_argument("first")
    c.add_argument("second")
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("reproduce", help="repeat generate/train/eval and tabulate")
    r.add_argument("experiments", nargs="+", type=_problem_id)
    r.add_argument("--reps", type=int, default=10)
    r.add_argument("--config", help="INI config overriding the presets")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        field = getattr(exc, "field", None)
        print(f"error: {exc}" + (f" [{field}]" if field and field not in str(exc) else ""), file=sys.stderr)
        return EXIT_USAGE
    except (DataFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArffError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
