"""Tight (epsilon, delta) accounting for discrete truncated distributions."""

from __future__ import annotations

import logging
import math

import numpy as np

from . import _kernels
from .grid import NoiseGrid

__all__ = ["bin_shift", "delta_of"]

log = logging.getLogger(__name__)

_SHIFT_ALIGN_TOL = 1e-9
_SYMMETRY_TOL = 1e-12


def bin_shift(grid: NoiseGrid, s: float) -> int:
    """Number of whole grid bins spanned by the sensitivity ``s``.

    Raises if ``s`` does not align with the grid: the accountant needs the
    distribution evaluated at ``phi_l + s``, and off-grid shifts would
    require interpolation.
    """
    if s < 0:
        raise ValueError(f"sensitivity must be >= 0, got {s}")
    k = s * grid.N / grid.d
    if abs(k - round(k)) > _SHIFT_ALIGN_TOL * max(1.0, abs(k)):
        raise ValueError(
            f"sensitivity {s} is not a whole number of bins for d={grid.d}, "
            f"N={grid.N} (shift {k}); choose N so that s*N/d is integral"
        )
    return int(round(k))


def delta_of(p, grid: NoiseGrid, epsilon: float, s: float) -> float:
    """Smallest delta for which the (epsilon, delta) inequality holds.

    Computes ``sum_l max(0, p[l] - e^eps * p[l + k])`` with ``k`` the bin
    shift of ``s`` and out-of-range mass zero.  This equals the maximum over
    every event (subset of grid bins) of the privacy-loss gap, so it is the
    tight accountant value.  For symmetric distributions the +s and -s shifts
    agree and both are computed and checked.

    A shift with no overlap (s >= 2d) is degenerate; delta = 1 is returned
    with a warning.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    p = np.ascontiguousarray(p, dtype=float)
    if p.shape != (grid.size,):
        raise ValueError(f"p must have shape ({grid.size},), got {p.shape}")
    k = bin_shift(grid, s)
    if k >= grid.size:
        log.warning(
            "sensitivity %s leaves no overlap on [-%s, %s]; delta is 1 (degenerate)",
            s, grid.d, grid.d,
        )
        return 1.0
    e_eps = math.exp(epsilon)
    delta = _kernels.tight_delta(p, k, e_eps)
    if np.max(np.abs(p - p[::-1])) <= _SYMMETRY_TOL:
        delta_neg = _kernels.tight_delta(np.ascontiguousarray(p[::-1]), k, e_eps)
        if abs(delta - delta_neg) > _SYMMETRY_TOL:
            raise AssertionError(
                f"+s / -s accountant values differ for a symmetric "
                f"distribution: {delta} vs {delta_neg}"
            )
    return float(min(delta, 1.0))
