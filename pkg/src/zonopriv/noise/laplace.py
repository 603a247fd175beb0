"""Truncated-Laplace baseline used in the utility comparisons."""

from __future__ import annotations

import math

import numpy as np

from .accountant import delta_of
from .distribution import TruncatedDistribution
from .grid import NoiseGrid

__all__ = [
    "truncated_laplace_range",
    "truncated_laplace_closed_form_delta",
    "truncated_laplace_distribution",
]


def truncated_laplace_range(epsilon: float, delta: float, s: float) -> float:
    """Support half-width a for a truncated Laplace mechanism at (eps, delta).

    a = (s / eps) * ln(1 + e^eps (1 - e^-eps) / (2 delta)).
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if s <= 0:
        raise ValueError(f"sensitivity must be > 0, got {s}")
    return (s / epsilon) * math.log1p(
        math.exp(epsilon) * (1.0 - math.exp(-epsilon)) / (2.0 * delta))


def truncated_laplace_closed_form_delta(epsilon: float, a: float, s: float) -> float:
    """Inverse of the range formula: delta of a continuous truncated Laplace.

    delta = e^eps (1 - e^-eps) / (2 (e^(eps a / s) - 1)).
    """
    if epsilon <= 0 or a <= 0 or s <= 0:
        raise ValueError("epsilon, a, and s must all be > 0")
    return (math.exp(epsilon) * (1.0 - math.exp(-epsilon))
            / (2.0 * math.expm1(epsilon * a / s)))


def truncated_laplace_distribution(grid: NoiseGrid, epsilon: float,
                                   s: float) -> TruncatedDistribution:
    """Discretized truncated Laplace on the grid: p_l proportional to
    exp(-eps |phi_l| / s), with its delta set by the tight accountant."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if s <= 0:
        raise ValueError(f"sensitivity must be > 0, got {s}")
    weights = np.exp(-epsilon * np.abs(grid.phi) / s)
    p = weights / weights.sum()
    # Exact mirror symmetry despite summation roundoff.
    p = 0.5 * (p + p[::-1])
    p = p / p.sum()
    delta = delta_of(p, grid, epsilon, s)
    return TruncatedDistribution(grid=grid, p=p, epsilon=epsilon,
                                 sensitivity=s, delta=delta)
