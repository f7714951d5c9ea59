"""Shallow Fourier-feature network and z-score normalization."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .linalg import CHUNK_ROWS

SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class FourierFeatureModel:
    """``x -> Re(sum_k amplitudes[k] * exp(i frequencies[k] . x))``.

    ``frequencies`` is K x D (real), ``amplitudes`` is K x D' (complex).
    """

    frequencies: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        w = np.array(self.frequencies, dtype=float, ndmin=2)
        b = np.array(self.amplitudes, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        if w.shape[0] < 1:
            raise InvalidArgumentError("model needs at least one feature")
        if w.shape[0] != b.shape[0]:
            raise InvalidArgumentError("frequencies and amplitudes have different row counts")
        w.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "amplitudes", b)

    @property
    def n_features(self):
        return self.frequencies.shape[0]

    @property
    def input_dim(self):
        return self.frequencies.shape[1]

    @property
    def output_dim(self):
        return self.amplitudes.shape[1]

    def evaluate(self, x):
        """Evaluate at a single D-vector or at each row of an N x D array."""
        x = np.asarray(x, dtype=float)
        single = x.ndim <= 1
        xs = x.reshape(1, -1) if single else x
        if xs.shape[1] != self.input_dim:
            raise InvalidArgumentError(
                f"expected input dimension {self.input_dim}, got {xs.shape[1]}"
            )
        out = np.empty((xs.shape[0], self.output_dim))
        for start in range(0, xs.shape[0], CHUNK_ROWS):
            phase = xs[start:start + CHUNK_ROWS] @ self.frequencies.T
            out[start:start + CHUNK_ROWS] = (np.exp(1j * phase) @ self.amplitudes).real
        return out[0] if single else out

    __call__ = evaluate

    def to_dict(self):
        return {
            "dim_in": self.input_dim,
            "dim_out": self.output_dim,
            "frequencies": self.frequencies.ravel().tolist(),
            "amplitudes_re": self.amplitudes.real.ravel().tolist(),
            "amplitudes_im": self.amplitudes.imag.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        dim_in, dim_out = int(d["dim_in"]), int(d["dim_out"])
        w = np.asarray(d["frequencies"], dtype=float).reshape(-1, dim_in)
        b = (np.asarray(d["amplitudes_re"], dtype=float)
             + 1j * np.asarray(d["amplitudes_im"], dtype=float)).reshape(-1, dim_out)
        return cls(w, b)


@dataclass(frozen=True)
class Normalizer:
    input_shift: np.ndarray
    input_scale: np.ndarray
    output_shift: np.ndarray
    output_scale: np.ndarray

    def __post_init__(self):
        for name in ("input_shift", "input_scale", "output_shift", "output_scale"):
            a = np.array(getattr(self, name), dtype=float, ndmin=1)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if np.any(self.input_scale <= 0) or np.any(self.output_scale <= 0):
            raise InvalidArgumentError("normalizer scales must be positive")

    def normalize_inputs(self, x):
        return (np.asarray(x, dtype=float) - self.input_shift) / self.input_scale

    def normalize_targets(self, y):
        return (np.asarray(y, dtype=float) - self.output_shift) / self.output_scale

    def denormalize_targets(self, y):
        return np.asarray(y, dtype=float) * self.output_scale + self.output_shift

    def to_dict(self):
        return {k: getattr(self, k).tolist()
                for k in ("input_shift", "input_scale", "output_shift", "output_scale")}

    @classmethod
    def from_dict(cls, d):
        return cls(d["input_shift"], d["input_scale"], d["output_shift"], d["output_scale"])


def fit_normalizer(inputs, targets):
    """Per-dimension mean/standard deviation of inputs and targets."""
    x = np.asarray(inputs, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.size == 0 or y.size == 0:
        raise InvalidArgumentError("cannot fit a normalizer to an empty set")
    x = x.reshape(x.shape[0], -1)
    y = y.reshape(y.shape[0], -1)
    return Normalizer(
        x.mean(axis=0), np.maximum(x.std(axis=0), SCALE_FLOOR),
        y.mean(axis=0), np.maximum(y.std(axis=0), SCALE_FLOOR),
    )


@dataclass(frozen=True)
class NormalizedModel:
    """A model trained in normalized coordinates, evaluated in physical ones."""

    model: FourierFeatureModel
    normalizer: Normalizer

    @property
    def input_dim(self):
        return self.model.input_dim

    @property
    def output_dim(self):
        return self.model.output_dim

    def __call__(self, x):
        return self.normalizer.denormalize_targets(
            self.model(self.normalizer.normalize_inputs(x)))

    def to_dict(self):
        d = self.model.to_dict()
        d["normalizer"] = self.normalizer.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(FourierFeatureModel.from_dict(d), Normalizer.from_dict(d["normalizer"]))
