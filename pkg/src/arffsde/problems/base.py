"""Problem definitions and the fine-step Euler-Maruyama generator."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..data import SnapshotDataset
from ..errors import ArffError


class NumericError(ArffError):
    pass


@dataclass(frozen=True)
class ProblemSpec:
    """One benchmark problem.

    ``drift`` maps an N x P array of model inputs to N x D, ``sigma`` to
    N x D x D. For plain SDEs the inputs are the state itself (P = D).
    """

    id: str
    kind: str  # "sde", "langevin", "sir" or "wave"
    dim: int
    drift: Callable
    sigma: Callable
    h: float
    domain: tuple  # (low, high) arrays of the initial-state box
    n_points: int
    substeps: int
    structure: str = "symmetric"
    input_dim: Optional[int] = None
    layer_size: int = 32
    # Reference values from the benchmark results table.
    expected_min_loss: Optional[float] = None
    reported_min_loss: Optional[float] = None
    reported_adam_loss: Optional[float] = None
    drift_overrides: dict = field(default_factory=dict)
    diffusion_overrides: dict = field(default_factory=dict)
    sim_steps: int = 100
    params: dict = field(default_factory=dict)

    @property
    def model_input_dim(self):
        return self.dim if self.input_dim is None else self.input_dim

    def covariance(self, inputs):
        s = self.sigma(np.asarray(inputs, dtype=float))
        return s @ np.swapaxes(s, -1, -2)

    def with_params(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)


def _rows(x):
    x = np.asarray(x, dtype=float)
    return x.reshape(1, -1) if x.ndim <= 1 else x


def em_step(x, h, drift, sigma, rng):
    """One Euler-Maruyama step ``x + h f(x) + sigma(x) dW`` with ``dW ~ N(0, h I)``.

    Works on a single D-vector or on every row of an N x D array.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    x = np.asarray(x, dtype=float)
    xs = _rows(x)
    f = _rows(drift(xs))
    s = np.asarray(sigma(xs), dtype=float).reshape(xs.shape[0], xs.shape[1], -1)
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(s))):
        raise NumericError("drift or diffusion evaluated to a non-finite value")
    dw = np.sqrt(h) * rng.standard_normal((xs.shape[0], s.shape[2]))
    out = xs + h * f + np.einsum("nij,nj->ni", s, dw)
    return out.reshape(x.shape)


def sample_uniform(domain, n, rng):
    low, high = (np.asarray(b, dtype=float) for b in domain)
    return low + (high - low) * rng.uniform(size=(n, low.shape[0]))


def integrate_em(x0, h, substeps, drift, sigma, rng):
    """``substeps`` EM steps of size ``h / substeps`` applied to every row."""
    x = np.array(x0, dtype=float)
    dt = h / substeps
    for _ in range(substeps):
        x = em_step(x, dt, drift, sigma, rng)
    return x


def generate_snapshots(spec, rng, n_points=None, split_seed=0):
    if spec.kind != "sde":
        raise ValueError(f"problem {spec.id} is not a plain SDE problem")
    n = spec.n_points if n_points is None else n_points
    x0 = sample_uniform(spec.domain, n, rng)
    x1 = integrate_em(x0, spec.h, spec.substeps, spec.drift, spec.sigma, rng)
    return SnapshotDataset(x0, x1, np.full(n, spec.h), split_seed=split_seed,
                           meta={"problem": spec.id})


def _diag(values):
    """N x D array of diagonal entries -> N x D x D diagonal matrices."""
    v = np.asarray(values, dtype=float)
    out = np.zeros(v.shape + (v.shape[-1],))
    idx = np.arange(v.shape[-1])
    out[..., idx, idx] = v
    return out


def constant_matrix(m):
    m = np.asarray(m, dtype=float)

    def sigma(x):
        return np.broadcast_to(m, (np.shape(x)[0],) + m.shape)
    return sigma


def cubic_drift(x):
    return -2.0 * x ** 3 + 4.0 * x - 1.5


SIGMA_4A = np.array([[0.02056, 0.03502, 0.02678],
                     [0.03502, 0.06356, 0.02982],
                     [0.02678, 0.02982, 0.12454]])
SIGMA_4B = np.array([[0.09506, 0.0, 0.0],
                     [0.04639, 0.15817, 0.0],
                     [0.04338, 0.07507, 0.00853]])


def polynomial_problems():
    def box(lo, hi, d):
        return (np.full(d, lo), np.full(d, hi))

    common = dict(kind="sde", n_points=10000, substeps=1000)
    return [
        ProblemSpec("1", dim=1, drift=lambda x: 0.5 * x,
                    sigma=constant_matrix([[0.1]]), h=0.1, domain=box(-1, 1, 1),
                    layer_size=2 ** 5, expected_min_loss=-2.0349, reported_min_loss=-2.0500,
                    reported_adam_loss=-2.0693, sim_steps=10, **common),
        ProblemSpec("2", dim=2, drift=lambda x: -x,
                    sigma=lambda x: _diag(0.05 * x + 0.005), h=0.01, domain=box(1, 2, 2),
                    layer_size=2 ** 6, expected_min_loss=-6.8523, reported_min_loss=-6.8487,
                    reported_adam_loss=-6.8547, **common),
        ProblemSpec("3a", dim=1, drift=cubic_drift,
                    sigma=lambda x: _diag(0.05 * x + 0.5), h=0.01, domain=box(-2, 2, 1),
                    layer_size=2 ** 7, expected_min_loss=-1.5835, reported_min_loss=-1.5906,
                    reported_adam_loss=-1.5121, **common),
        ProblemSpec("3b", dim=2, drift=cubic_drift,
                    sigma=lambda x: _diag(0.05 * x + 0.5), h=0.01, domain=box(-2, 2, 2),
                    layer_size=2 ** 8, expected_min_loss=-3.1671, reported_min_loss=-3.1807,
                    reported_adam_loss=-2.9826, **common),
        ProblemSpec("4a", dim=3, drift=lambda x: -x, sigma=constant_matrix(SIGMA_4A),
                    h=0.01, domain=box(-1, 1, 3), structure="symmetric",
                    layer_size=2 ** 7, expected_min_loss=-16.170, reported_min_loss=-16.102,
                    reported_adam_loss=-14.031,
                    drift_overrides={"tikhonov": 2e-6}, diffusion_overrides={"tikhonov": 2e-6},
                    **common),
        ProblemSpec("4b", dim=3, drift=lambda x: -x, sigma=constant_matrix(SIGMA_4B),
                    h=0.01, domain=box(-1, 1, 3), structure="lower_triangular",
                    layer_size=2 ** 7, expected_min_loss=-11.613, reported_min_loss=-11.612,
                    reported_adam_loss=-11.406, **common),
    ]
