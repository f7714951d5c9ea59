"""Learning drift and diffusion of Ito SDEs with adaptive random Fourier features."""

__version__ = "0.1.0"

from .arff import ArffConfig, TrainTrace, train  # noqa: E402
from .data import SnapshotDataset  # noqa: E402
from .fourier import FourierFeatureModel, NormalizedModel, Normalizer  # noqa: E402
from .learner import LearnedSde, learn_sde  # noqa: E402
from .likelihood import LossReport, nll_single, total_loss  # noqa: E402

__all__ = [
    "ArffConfig", "FourierFeatureModel", "LearnedSde", "LossReport", "NormalizedModel",
    "Normalizer", "SnapshotDataset", "TrainTrace", "learn_sde", "nll_single", "total_loss",
    "train",
]
