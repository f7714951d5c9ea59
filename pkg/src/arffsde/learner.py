"""Drift and diffusion-covariance learning from snapshot data.

The drift network is fit to finite-difference quotients ``(x1 - x0) / h``.
Given the drift, each snapshot has a closed-form rank-one covariance
minimizer ``r r^T / h`` (``r`` the Euler-Maruyama residual); its lower
triangle is vectorized and a second network is fit to those vectors.
"""

import time
from dataclasses import asdict, dataclass

import numpy as np

from .arff import ArffConfig, train
from .errors import InvalidArgumentError, NonPositiveDefiniteError
from .fourier import NormalizedModel, fit_normalizer
from .likelihood import total_loss

STRUCTURES = ("symmetric", "lower_triangular", "none")
SYMMETRY_TOL = 1e-10


def triangular_dim(d):
    return d * (d + 1) // 2


def _tril_indices(d):
    # Row-major lower triangle: (0,0), (1,0), (1,1), (2,0), ... which is the
    # 0-based form of index i(i-1)/2 + j for 1 <= j <= i.
    return np.tril_indices(d)


def vectorize_lower_triangular(M):
    """Lower triangle of a symmetric matrix (or a stack of them), row by row."""
    M = np.asarray(M, dtype=float)
    if M.shape[-1] != M.shape[-2]:
        raise InvalidArgumentError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if np.max(np.abs(M - np.swapaxes(M, -1, -2)), initial=0.0) > SYMMETRY_TOL * scale:
        raise InvalidArgumentError("matrix is not symmetric")
    rows, cols = _tril_indices(M.shape[-1])
    return M[..., rows, cols]


def devectorize_symmetric(v):
    """Inverse of :func:`vectorize_lower_triangular`; accepts stacked vectors."""
    v = np.asarray(v, dtype=float)
    m = v.shape[-1]
    d = int(round((np.sqrt(8 * m + 1) - 1) / 2))
    if triangular_dim(d) != m or m == 0:
        raise InvalidArgumentError(f"length {m} is not a triangular number")
    rows, cols = _tril_indices(d)
    out = np.zeros(v.shape[:-1] + (d, d))
    out[..., rows, cols] = v
    out[..., cols, rows] = v
    return out


def build_drift_targets(data):
    """Inputs and finite-difference drift targets ``(x1 - x0) / h``."""
    data.check_steps()
    return data.inputs, (data.x1 - data.x0) / data.h[:, None]


def pointwise_sigma_star(x0, x1, h, drift_value):
    """Per-sample covariance minimizer ``r r^T / h`` with ``r = x1 - x0 - h f``.

    Broadcasts over leading sample dimensions.
    """
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise InvalidArgumentError("step size must be positive")
    r = np.asarray(x1, dtype=float) - np.asarray(x0, dtype=float) \
        - h[..., None] * np.asarray(drift_value, dtype=float)
    return r[..., :, None] * r[..., None, :] / h[..., None, None]


def recover_sigma(covariance, structure):
    """Diffusion matrix ``s`` with ``s s^T = covariance`` under a known structure."""
    c = np.asarray(covariance, dtype=float)
    c = 0.5 * (c + np.swapaxes(c, -1, -2))
    if structure == "lower_triangular":
        try:
            return np.linalg.cholesky(c)
        except np.linalg.LinAlgError as exc:
            raise NonPositiveDefiniteError("covariance is not positive definite") from exc
    if structure == "symmetric":
        vals, vecs = np.linalg.eigh(c)
        if np.any(vals <= 0):
            raise NonPositiveDefiniteError("covariance is not positive definite")
        return (vecs * np.sqrt(vals)[..., None, :]) @ np.swapaxes(vecs, -1, -2)
    raise InvalidArgumentError(f"cannot recover sigma without structure (got {structure!r})")


def repair_covariance(c, floor=1e-10):
    """Clip eigenvalues below ``floor * trace`` so the matrix can be factorized."""
    c = np.asarray(c, dtype=float)
    c = 0.5 * (c + np.swapaxes(c, -1, -2))
    vals, vecs = np.linalg.eigh(c)
    tr = np.abs(np.trace(c, axis1=-2, axis2=-1))[..., None]
    lo = np.maximum(floor * tr, np.finfo(float).tiny)
    vals = np.maximum(vals, lo)
    return (vecs * vals[..., None, :]) @ np.swapaxes(vecs, -1, -2)


@dataclass(frozen=True)
class LearnedSde:
    drift: NormalizedModel
    diffusion_cov: NormalizedModel
    sigma_structure: str = "symmetric"

    def __post_init__(self):
        d = self.drift.output_dim
        if self.diffusion_cov.output_dim != triangular_dim(d):
            raise InvalidArgumentError("diffusion model output must have length D(D+1)/2")
        if self.sigma_structure not in STRUCTURES:
            raise InvalidArgumentError(f"unknown sigma structure {self.sigma_structure!r}")

    @property
    def dim(self):
        return self.drift.output_dim

    def drift_fn(self, x):
        return self.drift(np.asarray(x, dtype=float).reshape(-1, self.drift.input_dim))

    def covariance(self, x):
        return devectorize_symmetric(
            self.diffusion_cov(np.asarray(x, dtype=float).reshape(-1, self.drift.input_dim)))

    def sigma(self, x, repair=True):
        c = self.covariance(x)
        if repair:
            c = repair_covariance(c)
        return recover_sigma(c, self.sigma_structure)

    def to_dict(self):
        return {"drift": self.drift.to_dict(), "diffusion_cov": self.diffusion_cov.to_dict(),
                "sigma_structure": self.sigma_structure}

    @classmethod
    def from_dict(cls, d):
        return cls(NormalizedModel.from_dict(d["drift"]),
                   NormalizedModel.from_dict(d["diffusion_cov"]), d["sigma_structure"])


@dataclass
class LearnResult:
    sde: LearnedSde
    drift_trace: object
    diffusion_trace: object
    loss: object
    seconds: float

    def __iter__(self):
        return iter((self.sde, self.drift_trace, self.diffusion_trace, self.loss))


def _train_normalized(x, y, xv, yv, config):
    norm = fit_normalizer(x, y)
    model, trace = train((norm.normalize_inputs(x), norm.normalize_targets(y)),
                         (norm.normalize_inputs(xv), norm.normalize_targets(yv)), config)
    return NormalizedModel(model, norm), trace


def learn_sde(data, drift_config, diffusion_config, structure="symmetric"):
    """Train drift, then diffusion covariance, and score the validation split.

    Returns a :class:`LearnResult` (unpacks as ``sde, drift_trace,
    diffusion_trace, loss``).
    """
    if not isinstance(drift_config, ArffConfig) or not isinstance(diffusion_config,
                                                                  ArffConfig):
        raise InvalidArgumentError("configs must be ArffConfig instances")
    data.check_steps()
    t0 = time.perf_counter()
    tr, va = data.train_validation()

    x, y = build_drift_targets(tr)
    xv, yv = build_drift_targets(va)
    drift, drift_trace = _train_normalized(x, y, xv, yv, drift_config)

    def cov_targets(ds):
        s = pointwise_sigma_star(ds.x0, ds.x1, ds.h, drift(ds.inputs))
        return vectorize_lower_triangular(s)

    diffusion, diffusion_trace = _train_normalized(tr.inputs, cov_targets(tr),
                                                   va.inputs, cov_targets(va),
                                                   diffusion_config)
    sde = LearnedSde(drift, diffusion, structure)
    loss = total_loss(va, sde.drift_fn, sde.covariance, strict=False)
    return LearnResult(sde, drift_trace, diffusion_trace, loss, time.perf_counter() - t0)


def config_echo(drift_config, diffusion_config):
    return {"drift": asdict(drift_config), "diffusion": asdict(diffusion_config)}
