"""Trajectory ensembles from true or learned dynamics and their comparison."""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ArffError, InvalidArgumentError, SimulationError
from .learner import LearnedSde
from .problems import ProblemSpec, sample_simplex, sample_uniform

SLICE_FRACTIONS = (0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class Dynamics:
    """Drift and diffusion as functions of the model input.

    ``kind == "langevin"`` means the state is ``(x, v)``, the noise acts on
    ``v`` only and the functions are evaluated at ``(x_new, v_old)``.
    """

    drift: object
    sigma: object
    kind: str = "sde"


def true_dynamics(spec: ProblemSpec):
    return Dynamics(spec.drift, spec.sigma, "langevin" if spec.kind == "langevin" else "sde")


def learned_dynamics(sde: LearnedSde, kind="sde"):
    return Dynamics(sde.drift_fn, lambda z: sde.sigma(z, repair=True), kind)


def initial_sampler(spec: ProblemSpec):
    """Sampler matching the initial distribution of ``spec``'s training data."""
    if spec.kind == "sir":
        pop = spec.params["n_pop"]
        return lambda n, rng: sample_simplex(pop, n, rng)[:, [0, 2]] / pop
    if spec.kind == "wave":
        raise InvalidArgumentError("ensembles are not defined for the wave problem")
    return lambda n, rng: sample_uniform(spec.domain, n, rng)


@dataclass
class EnsembleSummary:
    times: np.ndarray
    samples: list  # one n_paths x D array per slice
    meta: dict = field(default_factory=dict)

    @property
    def n_paths(self):
        return self.samples[0].shape[0]

    @property
    def dim(self):
        return self.samples[0].shape[1]

    def moments(self):
        """Per slice, per dimension: mean, variance, skewness, excess kurtosis."""
        out = []
        for s in self.samples:
            mu = s.mean(axis=0)
            c = s - mu
            var = np.mean(c ** 2, axis=0)
            sd = np.sqrt(np.where(var > 0, var, np.nan))
            out.append({"mean": mu.tolist(), "var": var.tolist(),
                        "skew": np.nan_to_num(np.mean(c ** 3, axis=0) / sd ** 3).tolist(),
                        "kurtosis": np.nan_to_num(np.mean(c ** 4, axis=0) / sd ** 4 - 3).tolist()})
        return out

    def histograms(self, edges=None):
        """Per slice, per dimension ``(edges, counts)``; edges default to Freedman-Diaconis."""
        out = []
        for k, s in enumerate(self.samples):
            row = []
            for d in range(s.shape[1]):
                e = fd_edges(s[:, d]) if edges is None else edges[k][d]
                row.append((e, np.histogram(s[:, d], bins=e)[0]))
            out.append(row)
        return out

    def to_dict(self):
        return {"times": self.times.tolist(), "n_paths": self.n_paths,
                "moments": self.moments(), "meta": self.meta}


def simulate_ensemble(dynamics, sampler, h, n_steps, n_paths, rng, slice_steps=None):
    """Euler-Maruyama ensemble of ``n_paths`` trajectories with step ``h``.

    Snapshots are kept at ``slice_steps`` (default: quarter points of the run).
    """
    if n_paths < 1 or n_steps < 1 or not h > 0:
        raise InvalidArgumentError("need n_paths >= 1, n_steps >= 1 and h > 0")
    if slice_steps is None:
        slice_steps = sorted({max(1, int(round(q * n_steps))) for q in SLICE_FRACTIONS})
    slice_steps = list(slice_steps)
    state = np.array(sampler(n_paths, rng), dtype=float)
    if state.ndim == 1:
        state = state[:, None]
    keep = []
    for step in range(1, n_steps + 1):
        try:
            state = _advance(dynamics, state, h, rng)
        except (ArffError, np.linalg.LinAlgError) as exc:
            raise SimulationError(f"simulation failed at step {step}: {exc}",
                                  path=getattr(exc, "index", None), step=step) from exc
        if not np.all(np.isfinite(state)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(state), axis=1))[0])
            raise SimulationError(f"path {bad} diverged at step {step}", path=bad, step=step)
        if step in slice_steps:
            keep.append(state.copy())
    return EnsembleSummary(np.array(slice_steps) * h, keep, {"h": h, "n_steps": n_steps})


def _advance(dyn, state, h, rng):
    if dyn.kind == "langevin":
        d = state.shape[1] // 2
        x, v = state[:, :d], state[:, d:]
        x = x + v * h
        z = np.hstack([x, v])
        s = np.asarray(dyn.sigma(z), dtype=float)
        dw = np.sqrt(h) * rng.standard_normal(v.shape)
        v = v + h * dyn.drift(z) + np.einsum("nij,nj->ni", s, dw)
        return np.hstack([x, v])
    s = np.asarray(dyn.sigma(state), dtype=float)
    dw = np.sqrt(h) * rng.standard_normal((state.shape[0], s.shape[-1]))
    return state + h * dyn.drift(state) + np.einsum("nij,nj->ni", s, dw)


def fd_edges(values, max_bins=200):
    """Freedman-Diaconis bin edges."""
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    q75, q25 = np.percentile(v, [75, 25])
    width = 2.0 * (q75 - q25) / len(v) ** (1 / 3)
    if not width > 0 or hi <= lo:
        return np.array([lo - 0.5, hi + 0.5])
    n = int(min(max_bins, max(1, np.ceil((hi - lo) / width))))
    return np.linspace(lo, hi, n + 1)


def ks_statistic(a, b):
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n, m, alpha=0.01):
    """Asymptotic two-sample KS critical value ``c(alpha) sqrt((n + m) / (n m))``."""
    c = np.sqrt(-0.5 * np.log(alpha / 2))
    return float(c * np.sqrt((n + m) / (n * m)))


def compare_ensembles(a, b):
    if len(a.samples) != len(b.samples) or not np.allclose(a.times, b.times) \
            or a.dim != b.dim:
        raise InvalidArgumentError("ensembles have different slices or dimensions")
    slices = []
    for t, sa, sb in zip(a.times, a.samples, b.samples):
        ks = [ks_statistic(sa[:, d], sb[:, d]) for d in range(a.dim)]
        slices.append({
            "time": float(t),
            "ks": ks,
            "mean_gap": np.abs(sa.mean(axis=0) - sb.mean(axis=0)).tolist(),
            "var_gap": np.abs(sa.var(axis=0) - sb.var(axis=0)).tolist(),
        })
    return {"slices": slices, "max_ks": max(max(s["ks"]) for s in slices),
            "ks_critical_1pct": ks_critical(a.n_paths, b.n_paths)}


def shared_histograms(a, b):
    """Histograms of both ensembles on Freedman-Diaconis edges of the pooled samples."""
    edges = [[fd_edges(np.concatenate([sa[:, d], sb[:, d]])) for d in range(a.dim)]
             for sa, sb in zip(a.samples, b.samples)]
    return edges, a.histograms(edges), b.histograms(edges)


def write_histogram_csv(path, a, b, labels=("a", "b")):
    edges, ha, hb = shared_histograms(a, b)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "dim", "bin_lo", "bin_hi", f"count_{labels[0]}", f"count_{labels[1]}"])
        for k, t in enumerate(a.times):
            for d in range(a.dim):
                e = edges[k][d]
                for i in range(len(e) - 1):
                    w.writerow([repr(float(t)), d, repr(float(e[i])), repr(float(e[i + 1])),
                                int(ha[k][d][1][i]), int(hb[k][d][1][i])])


def write_summary_json(path, summary):
    with open(path, "w") as fh:
        json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_samples(path, summary):
    np.savez(path, times=summary.times, *summary.samples)
