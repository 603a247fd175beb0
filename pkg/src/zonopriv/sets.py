"""Zonotopes, interval boxes, and the set operations the estimator consumes.

A zonotope ``<c, G>`` is the set ``{c + G @ beta : beta in [-1, 1]^g}``.
All operations return new values; nothing mutates its inputs, so estimate
traces can hold snapshots safely and everything is thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

__all__ = [
    "Zonotope",
    "IntervalBox",
    "linear_map",
    "minkowski_sum",
    "cartesian_product",
    "reduce_order",
    "interval_hull",
    "contains_point",
    "sample_point",
]

CONTAINMENT_TOL = 1e-9


def _as_float_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr!r}")
    return arr


@dataclass(frozen=True)
class Zonotope:
    """Set of the form ``{center + generators @ beta : |beta|_inf <= 1}``.

    center has shape ``(n,)`` and generators ``(n, g)`` with g >= 0 columns.
    """

    center: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        c = _as_float_array(self.center, "center").reshape(-1)
        G = _as_float_array(self.generators, "generators")
        if G.size == 0:
            cols = G.shape[1] if G.ndim == 2 else 0
            G = np.zeros((c.shape[0], cols))
        if G.ndim != 2:
            raise ValueError(f"generators must be a 2-D matrix, got shape {G.shape}")
        if G.shape[0] != c.shape[0]:
            raise ValueError(
                f"generator rows {G.shape[0]} do not match dimension {c.shape[0]}"
            )
        c.flags.writeable = False
        G.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "generators", G)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def order(self) -> int:
        """Number of generator columns."""
        return self.generators.shape[1]

    @classmethod
    def point(cls, center) -> "Zonotope":
        c = np.asarray(center, dtype=float).reshape(-1)
        return cls(c, np.zeros((c.shape[0], 0)))

    def to_json_dict(self) -> dict:
        return {"center": self.center.tolist(), "generators": self.generators.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Zonotope":
        return cls(np.asarray(data["center"], dtype=float),
                   np.asarray(data["generators"], dtype=float))


@dataclass(frozen=True)
class IntervalBox:
    """Axis-aligned box ``{x : lower <= x <= upper}``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _as_float_array(self.lower, "lower").reshape(-1)
        hi = _as_float_array(self.upper, "upper").reshape(-1)
        if lo.shape != hi.shape:
            raise ValueError("lower and upper must have the same shape")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def radius(self) -> np.ndarray:
        """Per-coordinate half-widths."""
        return 0.5 * (self.upper - self.lower)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float).reshape(-1)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def distance_to_point(self, x) -> float:
        """Euclidean distance from the box to an external point (0 if inside)."""
        x = np.asarray(x, dtype=float).reshape(-1)
        gap = np.maximum(0.0, np.maximum(self.lower - x, x - self.upper))
        return float(np.linalg.norm(gap))


def linear_map(M, z: Zonotope) -> Zonotope:
    """Image ``{M @ x : x in z}`` = ``<M c, M G>``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[1] != z.dim:
        raise ValueError(f"matrix shape {M.shape} incompatible with dimension {z.dim}")
    return Zonotope(M @ z.center, M @ z.generators)


def minkowski_sum(z1: Zonotope, z2: Zonotope) -> Zonotope:
    """``{a + b : a in z1, b in z2}`` = ``<c1 + c2, [G1, G2]>``."""
    if z1.dim != z2.dim:
        raise ValueError(f"dimension mismatch: {z1.dim} vs {z2.dim}")
    return Zonotope(z1.center + z2.center,
                    np.hstack([z1.generators, z2.generators]))


def cartesian_product(z1: Zonotope, z2: Zonotope) -> Zonotope:
    """Stacked set with block-diagonal generators; dimension n1 + n2."""
    c = np.concatenate([z1.center, z2.center])
    top = np.hstack([z1.generators, np.zeros((z1.dim, z2.order))])
    bottom = np.hstack([np.zeros((z2.dim, z1.order)), z2.generators])
    return Zonotope(c, np.vstack([top, bottom]))


def reduce_order(z: Zonotope, q: int) -> Zonotope:
    """Girard reduction to at most ``q * n`` generators; result contains ``z``.

    Generators are ranked by ``|g|_1 - |g|_inf``; the smallest ones are
    over-approximated by an axis-aligned box so that n*(q-1) original columns
    survive plus at most n box columns.  Ties keep the lower column index
    among the survivors, and all-zero columns are dropped, so the output is
    deterministic.  If the zonotope already has at most q*n generators it is
    returned unchanged.
    """
    if q < 1:
        raise ValueError(f"reduction order must be >= 1, got {q}")
    n, g = z.dim, z.order
    if g <= q * n:
        return z
    G = z.generators
    nonzero = np.any(G != 0.0, axis=0)
    G = G[:, nonzero]
    g = G.shape[1]
    if g <= q * n:
        return Zonotope(z.center, G)
    keep_count = n * (q - 1)
    metric = np.abs(G).sum(axis=0) - np.abs(G).max(axis=0)
    # Ascending metric; ties ordered by descending column index so that the
    # lower-index generator lands in the kept (larger-metric) region.
    order = np.lexsort((-np.arange(g), metric))
    boxed = order[: g - keep_count]
    kept = np.sort(order[g - keep_count:])
    box_radius = np.abs(G[:, boxed]).sum(axis=1)
    box_cols = np.diag(box_radius)[:, box_radius > 0.0]
    return Zonotope(z.center, np.hstack([G[:, kept], box_cols]))


def interval_hull(z: Zonotope) -> IntervalBox:
    """Tightest axis-aligned box containing the zonotope."""
    reach = np.abs(z.generators).sum(axis=1)
    return IntervalBox(z.center - reach, z.center + reach)


def contains_point(z: Zonotope, x, tol: float = CONTAINMENT_TOL) -> bool:
    """Exact membership test: is there beta in [-1,1]^g with c + G beta = x?

    Decided by the linear program ``min |beta|_inf  s.t.  G beta = x - c``;
    membership holds iff the optimum is at most ``1 + tol``.  An interval-hull
    pre-check short-circuits obvious rejections.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != z.dim:
        raise ValueError(f"point dimension {x.shape[0]} != zonotope dimension {z.dim}")
    rhs = x - z.center
    reach = np.abs(z.generators).sum(axis=1)
    if np.any(np.abs(rhs) > reach + tol):
        return False
    g = z.order
    if g == 0:
        return bool(np.all(np.abs(rhs) <= tol))
    # Variables [beta, t]; minimize t subject to G beta = rhs, |beta_i| <= t.
    c_obj = np.zeros(g + 1)
    c_obj[-1] = 1.0
    A_eq = np.hstack([z.generators, np.zeros((z.dim, 1))])
    eye = np.eye(g)
    ones = np.ones((g, 1))
    A_ub = np.vstack([np.hstack([eye, -ones]), np.hstack([-eye, -ones])])
    b_ub = np.zeros(2 * g)
    bounds = [(None, None)] * g + [(0.0, None)]
    res = linprog(c_obj, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=rhs,
                  bounds=bounds, method="highs")
    if not res.success:
        return False
    return bool(res.fun <= 1.0 + tol)


def sample_point(z: Zonotope, rng: np.random.Generator) -> np.ndarray:
    """Draw ``c + G beta`` with beta uniform on [-1, 1]^g; always inside ``z``."""
    beta = rng.uniform(-1.0, 1.0, size=z.order)
    return z.center + z.generators @ beta
