"""Set-based state estimator with optional differential privacy columns.

One step linearizes the dynamics around the previous corrected center,
inflates the prediction with a Lagrange-remainder zonotope and the process
noise, then over-approximates the intersection with the measurement sets
using Frobenius-optimal weights.  The privacy noise enters the correction as
an extra bounded-noise column per sensor, which is what keeps the true state
inside the corrected set despite the perturbed measurements.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .sets import (
    IntervalBox,
    Zonotope,
    interval_hull,
    minkowski_sum,
    reduce_order,
)

__all__ = [
    "SystemModel",
    "NoiseBounds",
    "StateSetEstimate",
    "predict",
    "optimize_lambda",
    "correction_generator_matrix",
    "correct",
    "step",
    "run",
]

log = logging.getLogger(__name__)

DEFAULT_REDUCTION_ORDER = 5

EstimatorMode = Literal["private", "nonprivate"]

_SINGULAR_COND = 1e10
_TIKHONOV = 1e-9


@dataclass
class SystemModel:
    """Dynamics, per-sensor measurement maps, and their derivative callbacks.

    ``f_hessian_bound`` and each ``h_hessian_bound[i]`` map an interval box
    (the linearization domain) to a zonotope containing the first-order
    Taylor residual of f / h^(i) anywhere in that box; linear maps return the
    zero zonotope.  Jacobian consistency and remainder soundness are asserted
    by the test suite rather than at runtime.
    """

    n: int
    m: int
    f: Callable[[np.ndarray], np.ndarray]
    f_jacobian: Callable[[np.ndarray], np.ndarray]
    f_hessian_bound: Callable[[IntervalBox], Zonotope]
    h: Sequence[Callable[[np.ndarray], float]]
    h_jacobian: Sequence[Callable[[np.ndarray], np.ndarray]]
    h_hessian_bound: Sequence[Callable[[IntervalBox], Zonotope]]

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("state dimension and sensor count must be >= 1")
        if not (len(self.h) == len(self.h_jacobian)
                == len(self.h_hessian_bound) == self.m):
            raise ValueError("per-sensor callback lists must have length m")


@dataclass(frozen=True)
class NoiseBounds:
    """Zero-centered bounding zonotopes for process, measurement, and privacy
    noise.  ``privacy`` is None for the non-private estimator."""

    process: Zonotope
    measurement: tuple[Zonotope, ...]
    privacy: Zonotope | None = None

    def __post_init__(self):
        object.__setattr__(self, "measurement", tuple(self.measurement))
        for name, zono in (("process", self.process), ("privacy", self.privacy),
                           *((f"measurement[{i}]", z)
                             for i, z in enumerate(self.measurement))):
            if zono is not None and np.any(zono.center != 0.0):
                raise ValueError(f"{name} noise zonotope must be centered at "
                                 "zero; off-center noise shifts the estimates")
        for i, z in enumerate(self.measurement):
            if z.dim != 1:
                raise ValueError(f"measurement[{i}] must be 1-dimensional")
        if self.privacy is not None and self.privacy.dim != 1:
            raise ValueError("privacy zonotope must be 1-dimensional")


@dataclass(frozen=True)
class StateSetEstimate:
    """Result of one prediction/correction step."""

    predicted: Zonotope
    corrected: Zonotope
    lam: np.ndarray  # n x m weight matrix, one column per sensor
    step: int = 0

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        lam.flags.writeable = False
        object.__setattr__(self, "lam", lam)


def predict(model: SystemModel, prior: Zonotope, bounds: NoiseBounds,
            linearization_point: np.ndarray) -> Zonotope:
    """Propagate the corrected set through the linearized dynamics.

    center = f(x*) + J_f(x*) (c_prior - x*) + c_L and generators
    [J_f G_prior, G_L, G_w], where <c_L, G_L> is the dynamics remainder over
    the prior's interval hull.  For linear f the remainder is the zero
    zonotope and the result is the exact linear image plus the process noise.
    """
    if prior.dim != model.n:
        raise ValueError(f"prior dimension {prior.dim} != model n {model.n}")
    x_star = np.asarray(linearization_point, dtype=float).reshape(-1)
    if x_star.shape[0] != model.n:
        raise ValueError("linearization point has wrong dimension")
    jac = np.asarray(model.f_jacobian(x_star), dtype=float)
    remainder = model.f_hessian_bound(interval_hull(prior))
    center = (np.asarray(model.f(x_star), dtype=float).reshape(-1)
              + jac @ (prior.center - x_star))
    linear_part = Zonotope(center, jac @ prior.generators)
    return minkowski_sum(minkowski_sum(linear_part, remainder), bounds.process)


def _stack_jacobians(model: SystemModel, x_star: np.ndarray) -> np.ndarray:
    rows = [np.asarray(model.h_jacobian[i](x_star), dtype=float).reshape(1, -1)
            for i in range(model.m)]
    H = np.vstack(rows)
    if H.shape != (model.m, model.n):
        raise ValueError(f"stacked measurement Jacobian has shape {H.shape}, "
                         f"expected {(model.m, model.n)}")
    return H


def optimize_lambda(model: SystemModel, predicted: Zonotope,
                    bounds: NoiseBounds, remainders: Sequence[Zonotope],
                    linearization_point: np.ndarray) -> np.ndarray:
    """Weights minimizing the squared Frobenius norm of the corrected
    generator matrix.

    The objective is a convex quadratic in the weight entries; its normal
    equations reduce to ``Lam (H S H^T + W) = S H^T`` with S the predicted
    generator Gram matrix and W the diagonal of per-sensor noise energies
    (remainder + privacy + measurement).  A singular system (condition number
    beyond 1e10) gets Tikhonov damping of 1e-9, which keeps the guarantee
    ||G(Lam*)||_F <= ||G(0)||_F.
    """
    x_star = np.asarray(linearization_point, dtype=float).reshape(-1)
    H = _stack_jacobians(model, x_star)
    S = predicted.generators @ predicted.generators.T
    gp_sq = 0.0
    if bounds.privacy is not None:
        gp_sq = float(np.sum(bounds.privacy.generators ** 2))
    w = np.array([
        float(np.sum(remainders[i].generators ** 2))
        + gp_sq
        + float(np.sum(bounds.measurement[i].generators ** 2))
        for i in range(model.m)
    ])
    M = H @ S @ H.T + np.diag(w)
    rhs = H @ S  # m x n; lambda solves M lam^T = rhs
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > _SINGULAR_COND:
        log.warning("weight system singular (cond=%.3g); adding Tikhonov "
                    "damping %.1g", cond, _TIKHONOV)
        M = M + _TIKHONOV * np.eye(model.m)
    lam_t = np.linalg.solve(M, rhs)
    return lam_t.T


def correction_generator_matrix(predicted: Zonotope, H: np.ndarray,
                                remainders: Sequence[Zonotope],
                                bounds: NoiseBounds,
                                lam: np.ndarray) -> np.ndarray:
    """Generator blocks of the corrected set before order reduction:
    [(I - sum_i lam_i H_i) G_hat, -lam_i G_L_i ..., -lam_i G_p ...,
    -lam_i G_v_i ...]."""
    n = predicted.dim
    m = H.shape[0]
    blocks = [(np.eye(n) - lam @ H) @ predicted.generators]
    blocks.extend(-lam[:, [i]] @ remainders[i].generators for i in range(m))
    if bounds.privacy is not None:
        gp = bounds.privacy.generators
        blocks.extend(-lam[:, [i]] @ gp for i in range(m))
    blocks.extend(-lam[:, [i]] @ bounds.measurement[i].generators
                  for i in range(m))
    return np.hstack(blocks)


def correct(model: SystemModel, predicted: Zonotope, measurements,
            bounds: NoiseBounds, lam: np.ndarray,
            linearization_point: np.ndarray,
            reduction_order: int = DEFAULT_REDUCTION_ORDER) -> StateSetEstimate:
    """Fuse the measurement sets into the predicted set with given weights.

    The corrected center moves by ``sum_i lam_i (y_i - h_i(x*) -
    H_i (c_hat - x*) - c_L_i)``; the generator matrix gains the weighted
    remainder, privacy, and measurement-noise columns (privacy columns are
    omitted when no privacy bound is set) and is then order-reduced.
    """
    y = np.asarray(measurements, dtype=float).reshape(-1)
    if y.shape[0] != model.m:
        raise ValueError(f"expected {model.m} measurements, got {y.shape[0]}")
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (model.n, model.m):
        raise ValueError(f"lambda must be {model.n} x {model.m}, got {lam.shape}")
    x_star = np.asarray(linearization_point, dtype=float).reshape(-1)
    hull = interval_hull(predicted)
    remainders = [model.h_hessian_bound[i](hull) for i in range(model.m)]
    H = _stack_jacobians(model, x_star)
    innovation = np.array([
        y[i]
        - float(model.h[i](x_star))
        - float(H[i] @ (predicted.center - x_star))
        - float(remainders[i].center[0])
        for i in range(model.m)
    ])
    center = predicted.center + lam @ innovation
    gens = correction_generator_matrix(predicted, H, remainders, bounds, lam)
    corrected = reduce_order(Zonotope(center, gens), reduction_order)
    return StateSetEstimate(predicted=predicted, corrected=corrected, lam=lam)


def step(model: SystemModel, prior: Zonotope, measurements,
         bounds: NoiseBounds, reduction_order: int = DEFAULT_REDUCTION_ORDER,
         mode: EstimatorMode = "private", k: int = 0) -> StateSetEstimate:
    """One predict -> optimize weights -> correct cycle.

    Linearization points follow the recursion: the prediction linearizes at
    the prior center, the correction at the predicted center.  In
    ``nonprivate`` mode the privacy columns are dropped.
    """
    if mode not in ("private", "nonprivate"):
        raise ValueError(f"mode must be 'private' or 'nonprivate', got {mode!r}")
    if mode == "private" and bounds.privacy is None:
        raise ValueError("private mode requires a privacy noise zonotope")
    if mode == "nonprivate" and bounds.privacy is not None:
        bounds = NoiseBounds(process=bounds.process,
                             measurement=bounds.measurement, privacy=None)
    predicted = predict(model, prior, bounds, prior.center)
    hull = interval_hull(predicted)
    remainders = [model.h_hessian_bound[i](hull) for i in range(model.m)]
    lam = optimize_lambda(model, predicted, bounds, remainders, predicted.center)
    estimate = correct(model, predicted, measurements, bounds, lam,
                       predicted.center, reduction_order)
    return StateSetEstimate(predicted=estimate.predicted,
                            corrected=estimate.corrected,
                            lam=estimate.lam, step=k)


def run(model: SystemModel, initial: Zonotope, measurement_stream,
        bounds: NoiseBounds, reduction_order: int = DEFAULT_REDUCTION_ORDER,
        mode: EstimatorMode = "private") -> list[StateSetEstimate]:
    """Fold ``step`` over a measurement stream, starting from an initial set
    assumed to contain the true initial state."""
    trace: list[StateSetEstimate] = []
    prior = initial
    for k, measurements in enumerate(measurement_stream, start=1):
        estimate = step(model, prior, measurements, bounds, reduction_order,
                        mode, k=k)
        trace.append(estimate)
        prior = estimate.corrected
    return trace
