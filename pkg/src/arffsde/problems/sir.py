"""Gillespie simulation of the SIRS compartment model.

Reactions, with concentrations ``c_p = n_p / N``::

    I + S -> I + I   rate r1 = 4 k1 c0 c1
    I -> R           rate r2 = k2 c1
    R -> S           rate r3 = k3 c2

Each reaction fires with propensity ``N r``, so a single event moves a
concentration by ``1/N`` and the mean-field limit has drift ``(-r1, r2)``
and diffusion ``diag(sqrt(r1/N), sqrt(r2/N))`` in the ``(c0, c2)`` coordinates.
"""

from dataclasses import dataclass

import numpy as np

from ..data import SnapshotDataset
from .base import ProblemSpec, _diag

# Count changes (dn0, dn1, dn2) per reaction.
STOICHIOMETRY = np.array([[-1, 1, 0], [0, -1, 1], [1, 0, -1]])
DEFAULT_POPULATION = 1000
EVENTS_PER_SNAPSHOT = 10


@dataclass(frozen=True)
class SirState:
    n0: int
    n1: int
    n2: int
    t: float = 0.0

    def __post_init__(self):
        if min(self.n0, self.n1, self.n2) < 0:
            raise ValueError("compartment counts must be nonnegative")
        if self.population <= 0:
            raise ValueError("population must be positive")
        if self.t < 0:
            raise ValueError("time must be nonnegative")

    @property
    def population(self):
        return self.n0 + self.n1 + self.n2

    @property
    def counts(self):
        return np.array([self.n0, self.n1, self.n2])

    @property
    def concentrations(self):
        return self.counts / self.population


def sir_rates(c, k):
    """Concentration-level rates ``(r1, r2, r3)``; ``c`` may be 3 or N x 3."""
    c = np.asarray(c, dtype=float)
    k1, k2, k3 = k
    return np.stack([4.0 * k1 * c[..., 0] * c[..., 1], k2 * c[..., 1], k3 * c[..., 2]], axis=-1)


def ssa_trajectory(initial, rates, max_time, rng):
    """Run the direct-method SSA from ``initial`` until ``max_time``.

    Returns ``[(state, dwell), ...]`` where ``dwell`` is the time spent in the
    state before the next event. The final entry's dwell is censored at
    ``max_time`` (or covers the remaining time once the state is absorbing).
    """
    if not max_time > 0:
        raise ValueError("max_time must be positive")
    pop = initial.population
    n = initial.counts.copy()
    t = initial.t
    out = []
    while True:
        a = pop * sir_rates(n / pop, rates)
        total = a.sum()
        if total <= 0:
            out.append((SirState(*n, t=t), max(max_time - t, 0.0)))
            break
        dwell = -np.log(rng.uniform()) / total
        if t + dwell >= max_time:
            out.append((SirState(*n, t=t), max_time - t))
            break
        out.append((SirState(*n, t=t), dwell))
        event = np.searchsorted(np.cumsum(a), rng.uniform() * total, side="right")
        n = n + STOICHIOMETRY[min(event, 2)]
        t += dwell
    return out


def sample_simplex(n_pop, size, rng):
    """Counts drawn uniformly from compositions of ``n_pop`` into three parts."""
    out = np.empty((size, 3), dtype=np.int64)
    for i in range(size):
        a, b = np.sort(rng.choice(n_pop + 2, size=2, replace=False))
        out[i] = (a, b - a - 1, n_pop + 1 - b)
    return out


def _reduced(counts, pop):
    c = np.asarray(counts, dtype=float) / pop
    return c[..., [0, 2]]


def sir_drift(k):
    def drift(x):
        c0, c2 = x[:, 0], x[:, 1]
        r = sir_rates(np.stack([c0, 1.0 - c0 - c2, c2], axis=-1), k)
        return np.stack([-r[:, 0] + r[:, 2], r[:, 1] - r[:, 2]], axis=-1)
    return drift


def sir_sigma(k, n_pop):
    def sigma(x):
        c0, c2 = x[:, 0], x[:, 1]
        r = sir_rates(np.stack([c0, 1.0 - c0 - c2, c2], axis=-1), k)
        # Clip tiny negative rates that occur outside the simplex.
        return _diag(np.sqrt(np.maximum(r[:, :2], 0.0) / n_pop))
    return sigma


def generate_sir(spec, rng, split_seed=0, n_trajectories=None):
    """Snapshots pairing SSA states ``EVENTS_PER_SNAPSHOT`` events apart."""
    p = spec.params
    k, n_pop = p["k"], p["n_pop"]
    n_traj = p["n_trajectories"] if n_trajectories is None else n_trajectories
    stride = p.get("events_per_snapshot", EVENTS_PER_SNAPSHOT)
    x0, x1, h = [], [], []
    for counts in sample_simplex(n_pop, n_traj, rng):
        path = ssa_trajectory(SirState(*counts), k, p["max_time"], rng)
        states = np.array([s.counts for s, _ in path])
        times = np.array([s.t for s, _ in path])
        for m in range(0, len(path) - stride, stride):
            x0.append(states[m])
            x1.append(states[m + stride])
            h.append(times[m + stride] - times[m])
    x0 = _reduced(np.reshape(x0, (-1, 3)), n_pop)
    x1 = _reduced(np.reshape(x1, (-1, 3)), n_pop)
    return SnapshotDataset(x0, x1, np.asarray(h, dtype=float), split_seed=split_seed,
                           meta={"problem": spec.id, "n_pop": n_pop})


def sir_problem(n_pop=DEFAULT_POPULATION):
    k = (1.0, 1.0, 0.0)
    return ProblemSpec(
        "6", kind="sir", dim=2, drift=sir_drift(k), sigma=sir_sigma(k, n_pop), h=np.nan,
        domain=(np.zeros(2), np.ones(2)), n_points=22942, substeps=EVENTS_PER_SNAPSHOT,
        layer_size=2 ** 6, expected_min_loss=-9.8469, reported_min_loss=-9.5986,
        reported_adam_loss=-9.646,
        params={"k": k, "n_pop": n_pop, "max_time": 4.0, "n_trajectories": 250},
    )
