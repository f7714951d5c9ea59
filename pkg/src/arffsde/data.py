"""Snapshot triplets ``(x0, x1, h)`` and the train/validation split."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

TRAIN_FRACTION = 0.9


@dataclass
class SnapshotDataset:
    """N snapshots of a state ``x0`` evolving to ``x1`` over time ``h``.

    ``inputs`` are the features the drift and diffusion models are evaluated
    at. They default to ``x0``; the Langevin problem conditions on
    ``(x1_position, v0)`` instead while the transition is ``v0 -> v1``.
    """

    x0: np.ndarray
    x1: np.ndarray
    h: np.ndarray
    inputs: np.ndarray = None
    split_seed: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x0 = np.array(self.x0, dtype=float, ndmin=1)
        self.x1 = np.array(self.x1, dtype=float, ndmin=1)
        if self.x0.ndim == 1:
            self.x0 = self.x0[:, None]
        if self.x1.ndim == 1:
            self.x1 = self.x1[:, None]
        n = self.x0.shape[0]
        self.h = np.broadcast_to(np.asarray(self.h, dtype=float), (n,)).copy()
        if self.inputs is None:
            self.inputs = self.x0
        else:
            self.inputs = np.array(self.inputs, dtype=float)
            if self.inputs.ndim == 1:
                self.inputs = self.inputs[:, None]
        if self.x1.shape != self.x0.shape or self.inputs.shape[0] != n:
            raise InvalidArgumentError("x0, x1 and inputs must have matching row counts")
        if not (np.all(np.isfinite(self.x0)) and np.all(np.isfinite(self.x1))
                and np.all(np.isfinite(self.inputs))):
            raise InvalidArgumentError("snapshot data must be finite")

    def __len__(self):
        return self.x0.shape[0]

    @property
    def dim(self):
        return self.x0.shape[1]

    @property
    def input_dim(self):
        return self.inputs.shape[1]

    @property
    def has_separate_inputs(self):
        return self.inputs is not self.x0 and not np.array_equal(self.inputs, self.x0)

    def check_steps(self):
        if np.any(self.h <= 0):
            raise InvalidArgumentError("all step sizes h must be positive")

    def split(self, train_fraction=TRAIN_FRACTION):
        """Seeded shuffle, then the first 90% train and the rest validate."""
        n = len(self)
        perm = np.random.default_rng(self.split_seed).permutation(n)
        n_train = int(round(train_fraction * n))
        return np.sort(perm[:n_train]), np.sort(perm[n_train:])

    def subset(self, idx):
        inputs = None if self.inputs is self.x0 else self.inputs[idx]
        return SnapshotDataset(self.x0[idx], self.x1[idx], self.h[idx], inputs,
                               self.split_seed, dict(self.meta))

    def train_validation(self):
        tr, va = self.split()
        return self.subset(tr), self.subset(va)
