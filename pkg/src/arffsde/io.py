"""File formats: snapshot CSV + JSON sidecar, model bundles, reports."""

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .data import SnapshotDataset
from .errors import ArffError, InvalidArgumentError
from .learner import LearnedSde


class DataFileError(ArffError, OSError):
    pass


def _fmt(a):
    return [repr(float(v)) for v in a]


def dataset_columns(dim, input_dim=None):
    cols = ["h"] + [f"x0_{i + 1}" for i in range(dim)] + [f"x1_{i + 1}" for i in range(dim)]
    if input_dim:
        cols += [f"z_{i + 1}" for i in range(input_dim)]
    return cols


def write_dataset(path, ds: SnapshotDataset, sidecar=None):
    """Write ``path`` (CSV) and ``path.json`` (sidecar).

    Extra ``z_*`` columns carry model inputs when they differ from ``x0``.
    """
    path = Path(path)
    extra = ds.input_dim if ds.has_separate_inputs else None
    block = [ds.h[:, None], ds.x0, ds.x1] + ([ds.inputs] if extra else [])
    table = np.hstack(block)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(dataset_columns(ds.dim, extra)) + "\n")
        for row in table:
            fh.write(",".join(map(repr, row.tolist())) + "\n")
    meta = {"generator_version": __version__, "n_rows": len(ds), "dim": ds.dim,
            "input_dim": ds.input_dim, "split_seed": int(ds.split_seed),
            "columns": dataset_columns(ds.dim, extra)}
    meta.update(sidecar or {})
    write_json(sidecar_path(path), meta)
    return path


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def read_dataset(path):
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            header = next(csv.reader(fh))
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, StopIteration) as exc:
        raise DataFileError(f"cannot read dataset {path}: {exc}") from exc
    except ValueError as exc:
        raise InvalidArgumentError(f"malformed dataset {path}: {exc}") from exc
    if not header or header[0] != "h":
        raise InvalidArgumentError(f"{path}: header must start with 'h'")
    dim = sum(c.startswith("x0_") for c in header)
    n_in = sum(c.startswith("z_") for c in header)
    if header != dataset_columns(dim, n_in or None) or table.shape[1] != len(header):
        raise InvalidArgumentError(f"{path}: unexpected columns {header}")
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = read_json(side)
    h = table[:, 0]
    x0 = table[:, 1:1 + dim]
    x1 = table[:, 1 + dim:1 + 2 * dim]
    inputs = table[:, 1 + 2 * dim:] if n_in else None
    return SnapshotDataset(x0, x1, h, inputs, int(meta.get("split_seed", 0)), meta)


def write_json(path, obj):
    try:
        with open(path, "w") as fh:
            json.dump(_plain(obj), fh, indent=2, sort_keys=True, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise DataFileError(f"cannot write {path}: {exc}") from exc


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path} is not valid JSON: {exc}") from exc


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_model(path, sde: LearnedSde, config_echo=None, extra=None):
    bundle = {"format": "arffsde.learned_sde", "version": __version__, **sde.to_dict()}
    if config_echo is not None:
        bundle["config"] = config_echo
    bundle.update(extra or {})
    write_json(path, bundle)


def read_model(path):
    d = read_json(path)
    try:
        return LearnedSde.from_dict(d), d
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{path} is not a model bundle: {exc}") from exc


def write_ensemble_csv(path, summary):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "path"] + [f"x_{i + 1}" for i in range(summary.dim)])
        for t, s in zip(summary.times, summary.samples):
            for p, row in enumerate(s):
                w.writerow([repr(float(t)), p] + _fmt(row))


def read_ensemble_csv(path):
    from .simulate import EnsembleSummary
    try:
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise DataFileError(f"cannot read ensemble {path}: {exc}") from exc
    times = np.unique(table[:, 0])
    samples = [table[table[:, 0] == t][:, 2:] for t in times]
    return EnsembleSummary(times, samples)
