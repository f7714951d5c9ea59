"""Stochastic wave equation on a staggered space-time grid.

    u_tt = u_xx + f(x) + sigma(x) dW_t,   x in [0, 1) periodic

Grid points ``x_i = i h``, ``t_j = j h`` carry values only where ``i + j``
is even. The leapfrog recurrence

    u[i, j+1] = u[i+1, j] + u[i-1, j] - u[i, j-1] + h^2 f(x_i) + noise

becomes an Euler-Maruyama step in the averaged variables
``a[i, j] = (u[i+1, j] + u[i-1, j]) / 2`` and
``b[i, j+1] = (u[i, j+1] + u[i, j-1]) / 2`` with step ``h^2 / 2``.

The noise term is ``sigma(x_i) / 2`` times white noise integrated over the
diamond-shaped stencil cell (area ``2 h^2``; ``h^2`` for the half-cell of the
first step), so in averaged form the effective diffusion is ``sigma / 2``.
"""

import numpy as np

from ..data import SnapshotDataset
from .base import ProblemSpec, _diag


def wave_forcing(x):
    return 5.0 * np.sin(4.0 * np.pi * x)


def wave_sigma(x):
    return (1.0 + np.exp(-150.0 * (x - 0.5) ** 2)) / 20.0


def wave_u0(x):
    return np.exp(-150.0 * (x - 0.5) ** 2) / 20.0


def wave_v0(x):
    # -2 du0/dx
    return -2.0 * (-300.0 * (x - 0.5)) * wave_u0(x)


def integrate_wave(h, t_max, forcing, sigma, u0, v0, rng):
    """Return the field ``u[j + 1, i]`` for levels ``j = -1 .. J`` (NaN off-lattice)."""
    n_x = int(round(1.0 / h))
    if n_x % 2:
        raise ValueError("periodic staggered grid needs an even number of cells")
    n_t = int(round(t_max / h))
    x = np.arange(n_x) * h
    f, s = forcing(x), sigma(x)
    u = np.full((n_t + 2, n_x), np.nan)
    odd = np.arange(n_x) % 2 == 1
    left = lambda a: np.roll(a, 1)    # a[i-1]
    right = lambda a: np.roll(a, -1)  # a[i+1]

    base = u0(x)
    u[1, ~odd] = base[~odd]
    avg0 = 0.5 * (left(base) + right(base))
    u[0, odd] = (avg0 - h * v0(x))[odd]
    first = (2.0 * avg0 - u[0] + 0.5 * h ** 2 * f
             + 0.5 * s * h * rng.standard_normal(n_x))
    u[2, odd] = first[odd]
    for j in range(1, n_t):
        mask = (np.arange(n_x) + j + 1) % 2 == 0
        prev, cur = u[j], u[j + 1]
        nxt = (right(cur) + left(cur) - prev + h ** 2 * f
               + 0.5 * s * np.sqrt(2.0) * h * rng.standard_normal(n_x))
        u[j + 2, mask] = nxt[mask]
    return x, u


def wave_snapshots(x, u, h, first_level=2):
    """EM-form triplets ``(a[i, j], b[i, j+1], h^2/2)`` for ``j >= first_level``."""
    n_x = len(x)
    xs, a_list, b_list = [], [], []
    for j in range(first_level, u.shape[0] - 2):
        i = np.flatnonzero((np.arange(n_x) + j + 1) % 2 == 0)
        cur, prev, nxt = u[j + 1], u[j], u[j + 2]
        a_list.append(0.5 * (cur[(i + 1) % n_x] + cur[(i - 1) % n_x]))
        b_list.append(0.5 * (nxt[i] + prev[i]))
        xs.append(x[i])
    xs = np.concatenate(xs)
    return xs, np.concatenate(a_list), np.concatenate(b_list)


def generate_wave(spec, rng, split_seed=0, t_max=None):
    p = spec.params
    h = p["grid_step"]
    xgrid, u = integrate_wave(h, p["t_max"] if t_max is None else t_max,
                              p["forcing"], p["noise"], p["u0"], p["v0"], rng)
    xs, a, b = wave_snapshots(xgrid, u, h)
    return SnapshotDataset(a, b, np.full(len(xs), 0.5 * h ** 2), inputs=xs,
                           split_seed=split_seed, meta={"problem": spec.id})


def wave_problem():
    return ProblemSpec(
        "7", kind="wave", dim=1, input_dim=1,
        drift=lambda x: wave_forcing(x),
        sigma=lambda x: _diag(0.5 * wave_sigma(x)),
        h=0.5 * 0.001 ** 2, domain=(np.zeros(1), np.ones(1)), n_points=995004, substeps=1,
        layer_size=2 ** 7, expected_min_loss=-9.4135, reported_min_loss=-9.4084,
        reported_adam_loss=-9.3849,
        drift_overrides={"step_length": 0.2}, diffusion_overrides={"step_length": 0.4},
        params={"grid_step": 0.001, "t_max": 2.0, "forcing": wave_forcing,
                "noise": wave_sigma, "u0": wave_u0, "v0": wave_v0},
    )
