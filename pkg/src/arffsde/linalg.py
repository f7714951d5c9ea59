"""Feature-matrix assembly and Tikhonov-regularized normal equations.

The amplitude fit for fixed frequencies is the ridge problem

    min_b  (1/N) |y - S b|^2 + lam |b|^2,

whose normal equations ``(S^H S + lam N I) b = S^H y`` are solved by a
Cholesky factorization of the Hermitian left-hand side.
"""

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError, SingularMatrixError

# Rows per block when accumulating the Gram matrix; bounds peak memory on
# large datasets (the wave problem has ~10^6 samples).
CHUNK_ROWS = 32768


def _as_2d(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise InvalidArgumentError(f"{name} must be a list of vectors, got shape {a.shape}")
    return a


def assemble_feature_matrix(points, frequencies):
    """Return S with ``S[n, k] = exp(i omega_k . x_n)``."""
    x = _as_2d(points, "points")
    w = _as_2d(frequencies, "frequencies")
    if x.shape[1] != w.shape[1]:
        raise InvalidArgumentError(
            f"dimension mismatch: points have D={x.shape[1]}, frequencies D={w.shape[1]}"
        )
    return np.exp(1j * (x @ w.T))


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("inputs contain NaN or Inf")


def normal_equations(points, frequencies, targets, chunk_rows=CHUNK_ROWS):
    """Accumulate ``(S^H S, S^H y)`` block-wise without materializing S.

    Block order is fixed, so the result is reproducible bit for bit.
    """
    x = _as_2d(points, "points")
    w = _as_2d(frequencies, "frequencies")
    y = _as_2d(targets, "targets")
    if y.shape[0] != x.shape[0]:
        raise InvalidArgumentError("targets and points have different row counts")
    k = w.shape[0]
    gram = np.zeros((k, k), dtype=complex)
    rhs = np.zeros((k, y.shape[1]), dtype=complex)
    for start in range(0, x.shape[0], chunk_rows):
        s = assemble_feature_matrix(x[start:start + chunk_rows], w)
        sh = s.conj().T
        gram += sh @ s
        rhs += sh @ y[start:start + chunk_rows]
    # Exact Hermitian symmetry; the BLAS product only guarantees it to rounding.
    gram = 0.5 * (gram + gram.conj().T)
    return gram, rhs


def solve_normal_equations(gram, rhs, lam, n_samples):
    """Solve ``(gram + lam N I) b = rhs`` for all right-hand-side columns."""
    if lam < 0:
        raise InvalidArgumentError("Tikhonov weight must be nonnegative")
    if n_samples <= 0:
        raise InvalidArgumentError("n_samples must be positive")
    _check_finite(gram, rhs)
    k = gram.shape[0]
    a = gram + lam * n_samples * np.eye(k)
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("normal equations are not positive definite") from exc
    if lam == 0:
        # Cholesky can succeed on a numerically singular Gram matrix.
        diag = np.abs(np.diag(factor[0]))
        if diag.min() <= np.sqrt(np.finfo(float).eps) * diag.max():
            raise SingularMatrixError("unregularized normal equations are singular")
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def solve_regularized_lsq(S, y, lam):
    """Minimize ``mean |y - S b|^2 + lam |b|^2`` over complex ``b``.

    Returns a K x D' array (a K-vector if ``y`` is one-dimensional).
    """
    S = np.asarray(S)
    y = np.asarray(y)
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    if S.ndim != 2 or S.shape[0] != y.shape[0]:
        raise InvalidArgumentError("S and y must have the same number of rows")
    _check_finite(S, y)
    sh = S.conj().T
    gram = sh @ S
    gram = 0.5 * (gram + gram.conj().T)
    beta = solve_normal_equations(gram, sh @ y, lam, S.shape[0])
    return beta[:, 0] if squeeze else beta


def regularized_objective(S, y, beta, lam):
    """Objective value ``mean |y - S b|^2 + lam sum |b_k|^2``."""
    resid = np.asarray(y) - np.asarray(S) @ beta
    resid = resid.reshape(resid.shape[0], -1)
    return float(np.mean(np.sum(np.abs(resid) ** 2, axis=1)) + lam * np.sum(np.abs(beta) ** 2))
