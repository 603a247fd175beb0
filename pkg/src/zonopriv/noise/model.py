"""Stacked-sigmoid noise model and distribution assembly helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import NoiseGrid

__all__ = [
    "SIGMOID_STEEPNESS",
    "NoiseModelParams",
    "model_half_distribution",
    "mirror_concat",
    "utility_loss",
]

# Fixed sigmoid steepness; sharp enough that each sigmoid acts as a step
# between adjacent grid bins.
SIGMOID_STEEPNESS = 500.0

_A_FLOOR = 1e-6
_HALF_SUM_TOL = 1e-10


@dataclass
class NoiseModelParams:
    """Learnable parameters of the half-distribution model.

    The model is ``r_l = ln(A^2 + sum_j B_j^2 * sigmoid(C (phi_l - F_j)))``
    followed by a softmax, so the log argument stays positive structurally;
    |A| is floored at 1e-6 to keep it bounded away from zero.
    """

    A: float
    B: np.ndarray
    C: float
    F: np.ndarray

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float).reshape(-1)
        self.F = np.asarray(self.F, dtype=float).reshape(-1)
        if self.B.shape != self.F.shape:
            raise ValueError("B and F must have the same length (v + 1 entries)")
        self.A = _floor_a(float(self.A))
        self.C = float(self.C)

    @property
    def v(self) -> int:
        """Stack depth (number of sigmoids is v + 1)."""
        return self.B.shape[0] - 1

    @classmethod
    def initialize(cls, d: float, v: int, rng: np.random.Generator,
                   steepness: float = SIGMOID_STEEPNESS) -> "NoiseModelParams":
        """Seeded random heights with sigmoid centers equally spaced on [-d, 0]."""
        return cls(
            A=rng.uniform(0.5, 1.5),
            B=rng.uniform(0.0, 1.0, size=v + 1),
            C=steepness,
            F=np.linspace(-d, 0.0, v + 1),
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.A], self.B, self.F])

    @classmethod
    def from_vector(cls, theta: np.ndarray, steepness: float) -> "NoiseModelParams":
        theta = np.asarray(theta, dtype=float)
        v1 = (theta.shape[0] - 1) // 2
        return cls(A=theta[0], B=theta[1:1 + v1], C=steepness, F=theta[1 + v1:])

    def to_json_dict(self) -> dict:
        return {"A": self.A, "B": self.B.tolist(), "C": self.C,
                "F": self.F.tolist(), "v": self.v}


def _floor_a(a: float) -> float:
    if abs(a) < _A_FLOOR:
        return _A_FLOOR if a >= 0 else -_A_FLOOR
    return a


def model_half_distribution(params: NoiseModelParams, grid: NoiseGrid) -> np.ndarray:
    """Evaluate the model on the N left-half grid points.

    Returns 0.5 * softmax(r): strictly positive, sums to 1/2.
    """
    return _kernels.half_distribution(
        np.ascontiguousarray(grid.half_phi), params.A,
        np.ascontiguousarray(params.B), params.C,
        np.ascontiguousarray(params.F))


def mirror_concat(half) -> np.ndarray:
    """Mirror a half-distribution into the full symmetric vector of length 2N."""
    half = np.asarray(half, dtype=float).reshape(-1)
    total = half.sum()
    if abs(total - 0.5) > _HALF_SUM_TOL:
        raise ValueError(f"half-distribution must sum to 1/2, got {total!r}")
    return np.concatenate([half, half[::-1]])


def utility_loss(p, grid: NoiseGrid, gamma_norm: int = 2) -> float:
    """Noise magnitude penalty ``(sum_l |phi_l|^gamma p_l)^(1/gamma)``."""
    if gamma_norm not in (1, 2):
        raise ValueError(f"gamma_norm selects the L1/L2 penalty, got {gamma_norm}")
    p = np.ascontiguousarray(p, dtype=float)
    if p.shape != (grid.size,):
        raise ValueError(f"p must have shape ({grid.size},), got {p.shape}")
    return float(_kernels.utility(p, np.abs(grid.phi), gamma_norm))
