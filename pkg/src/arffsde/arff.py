"""Adaptive random Fourier features with Metropolis sampling and resampling.

Frequencies start at zero and are evolved by a random walk whose proposals
are accepted per feature according to how much they grow the fitted
amplitude; before each proposal the frequency population is resampled in
proportion to amplitude magnitude. Amplitudes are always the exact ridge
solution for the current frequencies.
"""

import csv
import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegeneratePMFError, InvalidArgumentError, TrainingDivergedError
from .fourier import FourierFeatureModel
from .linalg import normal_equations, solve_normal_equations

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArffConfig:
    max_iterations: int = 1000
    step_length: float = 0.1
    metropolis_exponent: float = 1.0
    tikhonov: float = 0.002
    feature_count: int = 32
    stagnation_window: int = 5
    stagnation_patience: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidArgumentError("max_iterations must be positive")
        if self.step_length <= 0:
            raise InvalidArgumentError("step_length must be positive")
        if self.metropolis_exponent <= 0:
            raise InvalidArgumentError("metropolis_exponent must be positive")
        if self.tikhonov <= 0:
            raise InvalidArgumentError("tikhonov must be positive")
        if self.feature_count < 1:
            raise InvalidArgumentError("feature_count must be positive")
        if self.stagnation_window < 1 or self.stagnation_patience < 1:
            raise InvalidArgumentError("stagnation window and patience must be positive")

    def replace(self, **changes):
        return ArffConfig(**{**asdict(self), **changes})


@dataclass
class IterationRecord:
    iteration: int
    val_mse: float
    accept_frac: float
    seconds: float


@dataclass
class TrainTrace:
    records: list = field(default_factory=list)
    stop_reason: str = "max_iterations"
    best_iteration: int = 0

    @property
    def val_errors(self):
        return np.array([r.val_mse for r in self.records])

    @property
    def best_val_mse(self):
        return min(r.val_mse for r in self.records)

    def write_csv(self, path, timing=False):
        """Write the trace; ``seconds`` is left empty unless ``timing`` is set
        so that repeated runs produce identical files."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iter", "val_mse", "accept_frac", "seconds"])
            for r in self.records:
                writer.writerow([r.iteration, repr(r.val_mse), repr(r.accept_frac),
                                 f"{r.seconds:.6f}" if timing else ""])


def amplitude_norms(amplitudes):
    """Euclidean norm of each amplitude row."""
    b = np.asarray(amplitudes)
    return np.linalg.norm(b.reshape(b.shape[0], -1), axis=1)


def resample_indices(amplitudes, rng):
    """K i.i.d. feature indices with PMF proportional to ``|amplitudes[k]|``."""
    weights = amplitude_norms(amplitudes)
    total = weights.sum()
    if not total > 0:
        raise DegeneratePMFError("all amplitudes are zero; resampling PMF undefined")
    return rng.choice(weights.shape[0], size=weights.shape[0], replace=True,
                      p=weights / total)


def resample_frequencies(frequencies, amplitudes, rng):
    """Draw K rows i.i.d. with probability proportional to ``|amplitudes[k]|``."""
    w = np.asarray(frequencies)
    if np.shape(amplitudes)[0] != w.shape[0]:
        raise InvalidArgumentError("frequencies and amplitudes have different row counts")
    return w[resample_indices(amplitudes, rng)]


def acceptance_ratio(amplitudes, proposal_amplitudes, gamma):
    """``(|b*_k| / |b_k|)^gamma`` per feature; 0/0 counts as a rejection."""
    cur = amplitude_norms(amplitudes)
    new = amplitude_norms(proposal_amplitudes)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(new == 0, 0.0, new / cur)
    return ratio ** gamma


def metropolis_step(frequencies, amplitudes, proposal_frequencies, proposal_amplitudes,
                    gamma, rng):
    """Per-feature Metropolis test; returns the updated frequencies and the accept mask."""
    w = np.asarray(frequencies)
    w_star = np.asarray(proposal_frequencies)
    if w.shape != w_star.shape or np.shape(amplitudes) != np.shape(proposal_amplitudes):
        raise InvalidArgumentError("current and proposed parameters differ in shape")
    if np.shape(amplitudes)[0] != w.shape[0]:
        raise InvalidArgumentError("frequencies and amplitudes have different row counts")
    ratio = acceptance_ratio(amplitudes, proposal_amplitudes, gamma)
    accept = ratio > rng.uniform(size=w.shape[0])
    return np.where(accept[:, None], w_star, w), accept


def _fit(x, y, w, lam):
    gram, rhs = normal_equations(x, w, y)
    return solve_normal_equations(gram, rhs, lam, x.shape[0])


def _mse(model, x, y):
    err = model(x) - y
    val = float(np.mean(err ** 2))
    if not np.isfinite(val):
        raise TrainingDivergedError("validation error is not finite")
    return val


class _Stagnation:
    """No new minimum of the windowed moving average for ``patience`` iterations."""

    def __init__(self, window, patience):
        self.window = window
        self.patience = patience
        self.history = []
        self.best = np.inf
        self.since_best = 0

    def update(self, value):
        self.history.append(value)
        if len(self.history) < self.window:
            return False
        avg = float(np.mean(self.history[-self.window:]))
        if avg < self.best:
            self.best = avg
            self.since_best = 0
        else:
            self.since_best += 1
        return self.since_best >= self.patience


def _as_matrix(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] == 0:
        raise InvalidArgumentError(f"{name} must be a nonempty N x D array")
    return a


def train(data, validation, config):
    """Fit a Fourier-feature model to ``data = (inputs, targets)``.

    Returns the model with the lowest validation MSE seen and the trace.
    Inputs and targets are used as given; normalization is the caller's job.
    """
    x, y = (_as_matrix(a, n) for a, n in zip(data, ("inputs", "targets")))
    xv, yv = (_as_matrix(a, n) for a, n in zip(validation, ("validation inputs",
                                                            "validation targets")))
    if x.shape[0] != y.shape[0] or xv.shape[0] != yv.shape[0]:
        raise InvalidArgumentError("inputs and targets have different row counts")
    if x.shape[1] != xv.shape[1] or y.shape[1] != yv.shape[1]:
        raise InvalidArgumentError("training and validation dimensions differ")

    seeds = np.random.SeedSequence(config.rng_seed).spawn(3)
    rng_propose, rng_resample, rng_accept = (np.random.Generator(np.random.PCG64(s))
                                             for s in seeds)
    K, D = config.feature_count, x.shape[1]
    lam = config.tikhonov

    t0 = time.perf_counter()
    w = np.zeros((K, D))
    beta = _fit(x, y, w, lam)
    best = FourierFeatureModel(w, beta)
    best_err = _mse(best, xv, yv)
    trace = TrainTrace([IterationRecord(0, best_err, 0.0, time.perf_counter() - t0)])
    stagnation = _Stagnation(config.stagnation_window, config.stagnation_patience)
    stagnation.update(best_err)

    for it in range(1, config.max_iterations + 1):
        if amplitude_norms(beta).sum() > 0:
            idx = resample_indices(beta, rng_resample)
        else:
            # Zero target fitted exactly: nothing to resample toward.
            idx = np.arange(K)
        # Each drawn frequency keeps the amplitude it was drawn with.
        w, beta = w[idx], beta[idx]
        w_star = w + config.step_length * rng_propose.standard_normal(w.shape)
        beta_star = _fit(x, y, w_star, lam)
        w, accepted = metropolis_step(w, beta, w_star, beta_star,
                                      config.metropolis_exponent, rng_accept)
        beta = _fit(x, y, w, lam)

        model = FourierFeatureModel(w, beta)
        err = _mse(model, xv, yv)
        trace.records.append(IterationRecord(it, err, float(accepted.mean()),
                                             time.perf_counter() - t0))
        if err < best_err:
            best, best_err = model, err
            trace.best_iteration = it
        if stagnation.update(err):
            trace.stop_reason = "stagnation"
            break
    log.debug("ARFF stopped after %d iterations (%s), best val MSE %.3g",
              len(trace.records) - 1, trace.stop_reason, best_err)
    return best, trace
