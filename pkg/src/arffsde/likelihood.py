"""Gaussian Euler-Maruyama transition likelihood."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NonPositiveDefiniteError

LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class LossReport:
    total_loss: float
    n_samples: int
    n_rejected: int = 0
    std_error: float = float("nan")

    @property
    def tolerant(self):
        return self.n_rejected > 0

    def to_dict(self):
        return {"total_loss": self.total_loss, "n_samples": self.n_samples,
                "n_rejected": self.n_rejected, "std_error": self.std_error}


def nll_single(x0, x1, h, drift_value, covariance):
    """Negative log-density of ``N(x0 + h drift, h covariance)`` at ``x1``."""
    x0, x1, f = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (x0, x1, drift_value))
    cov = np.atleast_2d(np.asarray(covariance, dtype=float))
    if not h > 0:
        raise InvalidArgumentError("step size must be positive")
    loss = nll_batch(x0[None], x1[None], np.array([h]), f[None], cov[None])
    return float(loss[0])


def nll_batch(x0, x1, h, drift_values, covariances, strict=True):
    """Per-sample losses for N x D states and N x D x D covariances.

    With ``strict=False`` samples whose covariance is not positive definite
    get ``nan`` instead of raising.
    """
    x0 = np.asarray(x0, dtype=float)
    h = np.asarray(h, dtype=float).reshape(-1)
    r = np.asarray(x1, dtype=float) - x0 - h[:, None] * np.asarray(drift_values, dtype=float)
    cov = np.asarray(covariances, dtype=float)
    cov = 0.5 * (cov + np.swapaxes(cov, -1, -2))
    hcov = h[:, None, None] * cov
    d = x0.shape[1]
    try:
        chol = np.linalg.cholesky(hcov)
        ok = np.ones(len(h), dtype=bool)
    except np.linalg.LinAlgError:
        chol, ok = _cholesky_each(hcov)
        if strict:
            bad = int(np.flatnonzero(~ok)[0])
            raise NonPositiveDefiniteError(
                f"covariance of sample {bad} is not positive definite", index=bad) from None
    # Solve L z = r; the quadratic form is |z|^2.
    z = np.linalg.solve(chol[ok], r[ok][..., None])[..., 0]
    logdet = 2.0 * np.sum(np.log(np.diagonal(chol[ok], axis1=-2, axis2=-1)), axis=-1)
    out = np.full(len(h), np.nan)
    out[ok] = 0.5 * np.sum(z ** 2, axis=-1) + 0.5 * logdet + 0.5 * d * LOG_2PI
    return out


def _cholesky_each(mats):
    chol = np.zeros_like(mats)
    ok = np.zeros(mats.shape[0], dtype=bool)
    for i, m in enumerate(mats):
        try:
            chol[i] = np.linalg.cholesky(m)
            ok[i] = True
        except np.linalg.LinAlgError:
            chol[i] = np.eye(m.shape[0])
    return chol, ok


def total_loss(dataset, drift, covariance, strict=True):
    """Mean per-sample loss over ``dataset``.

    ``drift`` maps the dataset inputs (N x P) to N x D drift values and
    ``covariance`` maps them to N x D x D diffusion covariances.
    """
    if len(dataset) == 0:
        raise InvalidArgumentError("dataset is empty")
    dataset.check_steps()
    z = dataset.inputs
    losses = nll_batch(dataset.x0, dataset.x1, dataset.h, drift(z), covariance(z),
                       strict=strict)
    good = losses[np.isfinite(losses)]
    n_rej = int(len(losses) - len(good))
    if len(good) == 0:
        return LossReport(float("nan"), len(losses), n_rej)
    se = float(np.std(good, ddof=1) / np.sqrt(len(good))) if len(good) > 1 else float("nan")
    return LossReport(float(np.mean(good)), len(losses), n_rej, se)
