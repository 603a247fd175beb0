"""Additive noise mechanisms for the local and central privacy models."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .noise.distribution import TruncatedDistribution, sample
from .sets import Zonotope

__all__ = [
    "SensitivitySpec",
    "ProtectedMeasurements",
    "ldp_perturb",
    "cdp_perturb",
    "privacy_noise_zonotope",
    "sensor_streams",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SensitivitySpec:
    """Adjacency bound the noise distribution was calibrated against.

    ``ldp`` bounds one sensor's measurement deviation, ``cdp`` the deviation
    of the aggregated measurement vector.
    """

    mode: Literal["ldp", "cdp"]
    s: float

    def __post_init__(self):
        if self.mode not in ("ldp", "cdp"):
            raise ValueError(f"mode must be 'ldp' or 'cdp', got {self.mode!r}")
        if self.s <= 0:
            raise ValueError(f"sensitivity must be positive, got {self.s}")

    def check(self, previous, current, warn: bool = True) -> bool:
        """Inputs are never clamped; callers own the sensitivity contract.
        This debug helper flags consecutive measurements that violate it."""
        dev = float(np.linalg.norm(np.atleast_1d(current)
                                   - np.atleast_1d(previous)))
        ok = dev <= self.s
        if warn and not ok:
            log.warning("measurement deviation %.4g exceeds the declared "
                        "sensitivity %.4g", dev, self.s)
        return ok


@dataclass(frozen=True)
class ProtectedMeasurements:
    """Perturbed measurement vector plus the realized noise draws.

    ``noise_applied`` exists for test oracles only; the estimator-facing
    interface receives just the protected values.
    """

    values: np.ndarray
    noise_applied: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        noise = np.asarray(self.noise_applied, dtype=float).reshape(-1)
        if values.shape != noise.shape:
            raise ValueError("values and noise_applied must have equal length")
        values.flags.writeable = False
        noise.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "noise_applied", noise)


def ldp_perturb(y: float, dist: TruncatedDistribution,
                rng: np.random.Generator) -> float:
    """Local model: one sensor perturbs its own scalar measurement."""
    return float(y) + sample(dist, rng)


def cdp_perturb(y, dist: TruncatedDistribution,
                rng: np.random.Generator) -> ProtectedMeasurements:
    """Central model: perturb the aggregated vector with IID coordinates."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] == 0:
        raise ValueError("measurement vector must be non-empty")
    noise = sample(dist, rng, size=y.shape[0])
    return ProtectedMeasurements(values=y + noise, noise_applied=noise)


def privacy_noise_zonotope(dist: TruncatedDistribution) -> Zonotope:
    """1-D zonotope <0, [d]> bounding every possible noise draw."""
    return Zonotope(np.zeros(1), np.array([[dist.grid.d]]))


def sensor_streams(master_seed: int, m: int) -> list[np.random.Generator]:
    """Independent per-sensor random streams split from one master seed.

    Stream i is derived from (master_seed, sensor index), so local-model runs
    are reproducible and independent of sensor evaluation order.
    """
    children = np.random.SeedSequence(master_seed).spawn(m)
    return [np.random.default_rng(child) for child in children]
