"""Truncated discrete noise distributions with their privacy metadata."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .accountant import delta_of
from .grid import NoiseGrid, build_grid
from .model import NoiseModelParams

__all__ = ["TruncatedDistribution", "sample"]

_SUM_TOL = 1e-12
_SYMMETRY_TOL = 1e-12
_MONOTONE_TOL = 1e-12
_DELTA_TOL = 1e-12


@dataclass(frozen=True)
class TruncatedDistribution:
    """Symmetric, center-peaked probability vector over a noise grid.

    Invariants checked at construction: probabilities are nonnegative and sum
    to one, the vector is mirror-symmetric, mass decays monotonically away
    from the center, and ``delta`` matches the tight accountant value for
    (epsilon, sensitivity).
    """

    grid: NoiseGrid
    p: np.ndarray
    epsilon: float
    sensitivity: float
    delta: float
    params: NoiseModelParams | None = None
    seed: int | None = None
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = np.ascontiguousarray(self.p, dtype=float)
        if p.shape != (self.grid.size,):
            raise ValueError(f"p must have shape ({self.grid.size},), got {p.shape}")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities must sum to 1, got {p.sum()!r}")
        if np.max(np.abs(p - p[::-1])) > _SYMMETRY_TOL:
            raise ValueError("distribution must be mirror-symmetric")
        right = p[self.grid.N:]
        if np.any(np.diff(right) > _MONOTONE_TOL):
            raise ValueError("distribution must decay monotonically from the center")
        accounted = delta_of(p, self.grid, self.epsilon, self.sensitivity)
        if abs(accounted - self.delta) > _DELTA_TOL:
            raise ValueError(
                f"delta {self.delta!r} does not match the accountant value "
                f"{accounted!r}")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)
        cdf = np.cumsum(p)
        cdf[-1] = 1.0
        cdf.flags.writeable = False
        object.__setattr__(self, "_cdf", cdf)

    @property
    def d(self) -> float:
        return self.grid.d

    def to_json_dict(self) -> dict:
        return {
            "d": self.grid.d,
            "N": self.grid.N,
            "epsilon": self.epsilon,
            "s": self.sensitivity,
            "delta": self.delta,
            "p": self.p.tolist(),
            "params": self.params.to_json_dict() if self.params else None,
            "seed": self.seed,
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def from_json_dict(cls, data: dict) -> "TruncatedDistribution":
        params = None
        if data.get("params"):
            pd = data["params"]
            params = NoiseModelParams(A=pd["A"], B=pd["B"], C=pd["C"], F=pd["F"])
        return cls(
            grid=build_grid(data["d"], data["N"]),
            p=np.asarray(data["p"], dtype=float),
            epsilon=float(data["epsilon"]),
            sensitivity=float(data["s"]),
            delta=float(data["delta"]),
            params=params,
            seed=data.get("seed"),
        )

    @classmethod
    def load(cls, path) -> "TruncatedDistribution":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def sample(dist: TruncatedDistribution, rng: np.random.Generator,
           size: int | None = None):
    """Draw grid values with probabilities ``p`` via inverse-CDF lookup.

    Returns a scalar when ``size`` is None, else an array of that length.
    Successive draws are IID and always lie in [-d, d].
    """
    u = rng.random(size=size)
    idx = np.searchsorted(dist._cdf, u, side="right")
    idx = np.minimum(idx, dist.grid.size - 1)
    if size is None:
        return float(dist.grid.phi[idx])
    return dist.grid.phi[idx]
