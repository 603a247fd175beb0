"""Truncated noise distributions: model, training, accounting, sampling."""

from ._kernels import NUMBA_ENABLED
from .accountant import bin_shift, delta_of
from .distribution import TruncatedDistribution, sample
from .grid import NoiseGrid, build_grid, default_half_bins
from .laplace import (
    truncated_laplace_closed_form_delta,
    truncated_laplace_distribution,
    truncated_laplace_range,
)
from .model import (
    SIGMOID_STEEPNESS,
    NoiseModelParams,
    mirror_concat,
    model_half_distribution,
    utility_loss,
)
from .training import (
    DEFAULT_STACK_DEPTH,
    TrainingSchedule,
    assemble_distribution,
    train,
)

__all__ = [
    "NUMBA_ENABLED",
    "NoiseGrid",
    "build_grid",
    "default_half_bins",
    "bin_shift",
    "delta_of",
    "TruncatedDistribution",
    "sample",
    "NoiseModelParams",
    "SIGMOID_STEEPNESS",
    "model_half_distribution",
    "mirror_concat",
    "utility_loss",
    "TrainingSchedule",
    "DEFAULT_STACK_DEPTH",
    "assemble_distribution",
    "train",
    "truncated_laplace_range",
    "truncated_laplace_closed_form_delta",
    "truncated_laplace_distribution",
]
