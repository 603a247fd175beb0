"""Gradient-descent training of the truncated optimal noise distribution."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .accountant import bin_shift, delta_of
from .distribution import TruncatedDistribution
from .grid import NoiseGrid, build_grid
from .model import NoiseModelParams, model_half_distribution

__all__ = ["TrainingSchedule", "assemble_distribution", "training_loss", "train"]

log = logging.getLogger(__name__)

_FD_STEP = 1e-5
_A_FLOOR = 1e-6
DEFAULT_STACK_DEPTH = 5


@dataclass(frozen=True)
class TrainingSchedule:
    """Epoch schedule for the privacy/utility trade-off loss.

    The utility weight decays exponentially per epoch t:
    ``omega_t = max(omega_start / 2^(t / gamma_decay), omega_min)``.

    The default omega_start keeps the utility term subordinate from the first
    epoch; a utility-dominated start drags the sigmoid centers toward zero
    and the privacy term never recovers within the epoch budget.
    """

    omega_start: float = 0.05
    omega_min: float = 1e-3
    gamma_decay: float = 200.0
    gamma_norm: int = 2
    epochs: int = 2000
    learning_rate: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.omega_start <= 0 or self.omega_min <= 0:
            raise ValueError("utility weights must be positive")
        if self.omega_min > self.omega_start:
            raise ValueError("omega_min must not exceed omega_start")
        if self.gamma_decay <= 0:
            raise ValueError("gamma_decay must be positive")
        if self.gamma_norm not in (1, 2):
            raise ValueError("gamma_norm must be 1 or 2")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")

    def omega_at(self, t: int) -> float:
        return max(self.omega_start / 2.0 ** (t / self.gamma_decay), self.omega_min)


def assemble_distribution(params: NoiseModelParams, grid: NoiseGrid) -> np.ndarray:
    """Model half -> sort ascending -> mirror, yielding the full vector.

    The sort rearranges mass toward the center, which preserves normalization,
    enforces the monotone-decay shape, and can only shrink the utility
    penalty; the invariants are still asserted downstream, never assumed.
    """
    half = np.sort(model_half_distribution(params, grid))
    return np.concatenate([half, half[::-1]])


def training_loss(theta: np.ndarray, grid: NoiseGrid, shift: int, e_eps: float,
                  omega: float, gamma_norm: int, steepness: float):
    """Loss delta + omega * utility at a parameter vector. Returns
    (loss, delta, utility)."""
    v1 = (theta.shape[0] - 1) // 2
    return _kernels.training_loss(
        np.ascontiguousarray(grid.half_phi),
        theta[0], np.ascontiguousarray(theta[1:1 + v1]), steepness,
        np.ascontiguousarray(theta[1 + v1:]),
        shift, e_eps, omega, gamma_norm)


def _fd_gradient(theta, grid, shift, e_eps, omega, gamma_norm, steepness,
                 step=_FD_STEP):
    grad = np.empty_like(theta)
    for i in range(theta.shape[0]):
        hi = theta.copy()
        lo = theta.copy()
        hi[i] += step
        lo[i] -= step
        f_hi, _, _ = training_loss(hi, grid, shift, e_eps, omega, gamma_norm,
                                   steepness)
        f_lo, _, _ = training_loss(lo, grid, shift, e_eps, omega, gamma_norm,
                                   steepness)
        grad[i] = (f_hi - f_lo) / (2.0 * step)
    return grad


def train(grid: NoiseGrid, epsilon: float, s: float,
          schedule: TrainingSchedule | None = None, init_seed: int | None = None,
          stack_depth: int = DEFAULT_STACK_DEPTH,
          progress=None) -> TruncatedDistribution:
    """Learn the truncated noise distribution minimizing delta + omega_t * U.

    Plain gradient descent with central finite-difference gradients over the
    model parameters (A, B_j, F_j); the sigmoid steepness stays fixed.  The
    parameters with the lowest loss seen across all epochs win, and the
    returned distribution carries the tight accountant delta recomputed from
    its final probability vector.  Deterministic for a given ``init_seed``.

    ``progress``, when given, is called as ``progress(epoch, loss)`` roughly
    once per epoch decile.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    schedule = schedule or TrainingSchedule()
    if init_seed is None:
        init_seed = schedule.seed
    shift = bin_shift(grid, s)
    e_eps = math.exp(epsilon)
    # Optimize in sensitivity-normalized units (range d/s, unit shift): bin
    # probabilities, and hence delta, are invariant under scaling the axis,
    # and the fixed sigmoid steepness keeps the same sharpness relative to
    # the grid regardless of the physical scale of s.  At s = 1 this is the
    # identity.
    norm_grid = grid if s == 1.0 else build_grid(grid.d / s, grid.N)
    rng = np.random.default_rng(init_seed)
    params = NoiseModelParams.initialize(norm_grid.d, stack_depth, rng)
    theta = params.to_vector()

    best_loss = math.inf
    best_theta = theta.copy()
    report_every = max(1, schedule.epochs // 10)
    for t in range(1, schedule.epochs + 1):
        omega = schedule.omega_at(t)
        loss, _, _ = training_loss(theta, norm_grid, shift, e_eps, omega,
                                   schedule.gamma_norm, params.C)
        if loss < best_loss:
            best_loss = loss
            best_theta = theta.copy()
        if progress is not None and (t == 1 or t % report_every == 0):
            progress(t, loss)
        grad = _fd_gradient(theta, norm_grid, shift, e_eps, omega,
                            schedule.gamma_norm, params.C)
        theta = theta - schedule.learning_rate * grad
        if abs(theta[0]) < _A_FLOOR:
            theta[0] = _A_FLOOR if theta[0] >= 0 else -_A_FLOOR
    # The parameters after the last update were never scored; include them.
    final_omega = schedule.omega_at(schedule.epochs)
    loss, _, _ = training_loss(theta, norm_grid, shift, e_eps, final_omega,
                               schedule.gamma_norm, params.C)
    if loss < best_loss:
        best_loss = loss
        best_theta = theta.copy()

    best_params = NoiseModelParams.from_vector(best_theta, params.C)
    p = assemble_distribution(best_params, norm_grid)
    p = p / p.sum()
    delta = delta_of(p, grid, epsilon, s)
    if delta >= 1.0 - 1e-12:
        log.warning("training converged to a degenerate distribution "
                    "(delta = %.3g) for epsilon=%s, d=%s, s=%s",
                    delta, epsilon, grid.d, s)
    return TruncatedDistribution(grid=grid, p=p, epsilon=epsilon, sensitivity=s,
                                 delta=delta, params=best_params, seed=init_seed)
