"""Equidistant symmetric discretization of the noise range [-d, d]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["NoiseGrid", "build_grid", "default_half_bins"]


@dataclass(frozen=True)
class NoiseGrid:
    """2N midpoint bins over [-d, d], exactly symmetric about zero.

    phi[l] = (l - N + 1/2) * d / N for l in 0..2N-1, so phi[l] == -phi[2N-1-l]
    bin-exactly and the spacing is uniformly d/N.
    """

    d: float
    N: int
    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        phi.flags.writeable = False
        object.__setattr__(self, "phi", phi)

    @property
    def size(self) -> int:
        return 2 * self.N

    @property
    def spacing(self) -> float:
        return self.d / self.N

    @property
    def half_phi(self) -> np.ndarray:
        """Left-half grid values (negative side, ascending toward 0)."""
        return self.phi[: self.N]


def build_grid(d: float, N: int) -> NoiseGrid:
    """Build the 2N-point symmetric midpoint grid over [-d, d]."""
    d = float(d)
    if not np.isfinite(d) or d <= 0:
        raise ValueError(f"noise range d must be positive, got {d}")
    N = int(N)
    if N < 2:
        raise ValueError(f"half-bin count N must be >= 2, got {N}")
    idx = np.arange(2 * N, dtype=float)
    phi = (idx - N + 0.5) * (d / N)
    # Force exact mirror symmetry regardless of rounding.
    phi = 0.5 * (phi - phi[::-1])
    return NoiseGrid(d=d, N=N, phi=phi)


def default_half_bins(d: float, s: float, minimum: int = 200) -> int:
    """Smallest N >= minimum for which the sensitivity s lands on the grid.

    The accountant shifts the distribution by whole bins, so s * N / d must
    be an integer.
    """
    if s <= 0 or d <= 0:
        raise ValueError("d and s must be positive")
    for N in range(minimum, minimum + 100_000):
        k = s * N / d
        if abs(k - round(k)) <= 1e-9 * max(1.0, abs(k)) and round(k) >= 1:
            return N
    raise ValueError(f"no grid-aligned N found for d={d}, s={s}")
