"""Differentially private set-based state estimation with zonotopes."""

from .estimator import (
    NoiseBounds,
    StateSetEstimate,
    SystemModel,
    correct,
    optimize_lambda,
    predict,
    run,
    step,
)
from .experiments import (
    RunMetrics,
    matched_laplace_distribution,
    reproduce_delta_table,
    run_experiment,
    run_single,
)
from .mechanisms import (
    ProtectedMeasurements,
    SensitivitySpec,
    cdp_perturb,
    ldp_perturb,
    privacy_noise_zonotope,
)
from .noise import (
    NoiseGrid,
    NoiseModelParams,
    TrainingSchedule,
    TruncatedDistribution,
    build_grid,
    delta_of,
    mirror_concat,
    model_half_distribution,
    sample,
    train,
    truncated_laplace_distribution,
    truncated_laplace_range,
    utility_loss,
)
from .scenarios import (
    Scenario,
    quadcopter_scenario,
    rotating_object_scenario,
    simulate_truth,
)
from .sets import (
    IntervalBox,
    Zonotope,
    cartesian_product,
    contains_point,
    interval_hull,
    linear_map,
    minkowski_sum,
    reduce_order,
    sample_point,
)

__version__ = "0.1.0"

__all__ = [
    "Zonotope", "IntervalBox", "linear_map", "minkowski_sum",
    "cartesian_product", "reduce_order", "interval_hull", "contains_point",
    "sample_point",
    "NoiseGrid", "build_grid", "delta_of", "utility_loss",
    "model_half_distribution", "mirror_concat", "NoiseModelParams",
    "TruncatedDistribution", "TrainingSchedule", "train", "sample",
    "truncated_laplace_range", "truncated_laplace_distribution",
    "SensitivitySpec", "ProtectedMeasurements", "ldp_perturb", "cdp_perturb",
    "privacy_noise_zonotope",
    "SystemModel", "NoiseBounds", "StateSetEstimate", "predict",
    "optimize_lambda", "correct", "step", "run",
    "Scenario", "quadcopter_scenario", "rotating_object_scenario",
    "simulate_truth",
    "RunMetrics", "run_single", "run_experiment",
    "matched_laplace_distribution", "reproduce_delta_table",
]
