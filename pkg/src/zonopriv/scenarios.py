"""Benchmark scenarios and ground-truth simulation.

Model callbacks are small dataclass callables (not closures) so scenarios
pickle cleanly into worker processes for per-seed parallelism.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .estimator import NoiseBounds, SystemModel
from .sets import IntervalBox, Zonotope, contains_point, interval_hull, sample_point

__all__ = [
    "Scenario",
    "quadcopter_scenario",
    "rotating_object_scenario",
    "simulate_truth",
    "scenario_to_json_dict",
    "scenario_from_json_dict",
]


@dataclass(frozen=True)
class LinearStateMap:
    matrix: np.ndarray

    def __call__(self, x):
        return self.matrix @ x


@dataclass(frozen=True)
class ConstantJacobian:
    matrix: np.ndarray

    def __call__(self, x):
        return self.matrix


@dataclass(frozen=True)
class ZeroRemainder:
    """Lagrange remainder of an affine map: the zero zonotope."""

    dim: int

    def __call__(self, box: IntervalBox) -> Zonotope:
        return Zonotope.point(np.zeros(self.dim))


@dataclass(frozen=True)
class LinearMeasurement:
    row: np.ndarray

    def __call__(self, x) -> float:
        return float(self.row @ x)


@dataclass(frozen=True)
class LinearMeasurementJacobian:
    row: np.ndarray

    def __call__(self, x):
        return self.row.reshape(1, -1)


@dataclass(frozen=True)
class RangeMeasurement:
    """Distance to a fixed anchor node."""

    anchor: np.ndarray

    def __call__(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.anchor))


@dataclass(frozen=True)
class RangeJacobian:
    anchor: np.ndarray

    def __call__(self, x):
        diff = np.asarray(x, dtype=float) - self.anchor
        dist = np.linalg.norm(diff)
        if dist <= 0.0:
            raise ValueError("range Jacobian undefined at the anchor itself")
        return (diff / dist).reshape(1, -1)


@dataclass(frozen=True)
class RangeRemainder:
    """First-order Taylor residual of the range map over a box.

    The range function is convex, so its residual against the tangent at the
    box center is nonnegative and attains its maximum at a box corner.  The
    returned interval [0, R_max] is therefore exact at the corners and sound
    everywhere in the box, stays finite for any box, and is far tighter than
    a curvature-norm bound (which feeds back quadratically and destabilizes
    the correction loop).
    """

    anchor: np.ndarray

    def __call__(self, box: IntervalBox) -> Zonotope:
        x_star = box.center
        base = x_star - self.anchor
        dist = float(np.linalg.norm(base))
        if dist <= 1e-9:
            raise ValueError("range map is not differentiable at the anchor")
        u = base / dist
        radius = box.radius
        n = radius.shape[0]
        r_max = 0.0
        for signs in np.ndindex(*(2,) * n):
            offset = radius * (2.0 * np.asarray(signs) - 1.0)
            resid = (float(np.linalg.norm(x_star + offset - self.anchor))
                     - dist - float(u @ offset))
            r_max = max(r_max, resid)
        half = 0.5 * r_max
        return Zonotope(np.array([half]), np.array([[half]]))


@dataclass
class Scenario:
    """A benchmark setup: model, noise bounds, truth generator, horizon.

    ``bounds.privacy`` stays None here; the experiment runner fills it in
    from whichever noise distribution is being evaluated.
    """

    name: str
    model: SystemModel
    anchors: np.ndarray | None
    initial_true_state: np.ndarray
    initial_set: Zonotope
    bounds: NoiseBounds
    horizon: int
    trajectory: dict = field(default_factory=dict)

    def __post_init__(self):
        self.initial_true_state = np.asarray(self.initial_true_state,
                                             dtype=float).reshape(-1)
        if not contains_point(self.initial_set, self.initial_true_state):
            raise ValueError("initial true state must lie in the initial set")
        if self.anchors is not None:
            self.anchors = np.asarray(self.anchors, dtype=float)
            if self.anchors.shape[0] != self.model.m:
                raise ValueError("anchor count must equal the sensor count")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")


# Quadcopter arena constants: a 10 x 10 x 10 m volume, anchors inset at the
# corners of [1, 9]^3, and the truth confined to [2.5, 7.5]^3 so every
# linearization box keeps a healthy distance from the anchors.
_QUAD_ARENA = 10.0
_QUAD_ANCHOR_INSET = 1.0
_QUAD_REGION = (2.5, 7.5)


def _quad_anchors() -> np.ndarray:
    lo, hi = _QUAD_ANCHOR_INSET, _QUAD_ARENA - _QUAD_ANCHOR_INSET
    return np.array([[x, y, z] for x in (lo, hi) for y in (lo, hi)
                     for z in (lo, hi)])


def quadcopter_scenario(seed: int = 0, horizon: int = 200) -> Scenario:
    """Range-based localization of a quadcopter by 8 anchor nodes.

    Identity dynamics, per-sensor range measurements with analytic Jacobians
    and curvature bounds, process noise box of half-width 0.5 m per axis, and
    measurement noise generators [0.01 0.02 0.01].
    """
    rng = np.random.default_rng(seed)
    anchors = _quad_anchors()
    n, m = 3, anchors.shape[0]
    model = SystemModel(
        n=n, m=m,
        f=LinearStateMap(np.eye(n)),
        f_jacobian=ConstantJacobian(np.eye(n)),
        f_hessian_bound=ZeroRemainder(n),
        h=[RangeMeasurement(a) for a in anchors],
        h_jacobian=[RangeJacobian(a) for a in anchors],
        h_hessian_bound=[RangeRemainder(a) for a in anchors],
    )
    bounds = NoiseBounds(
        process=Zonotope(np.zeros(n), np.diag([0.5, 0.5, 0.5])),
        measurement=tuple(Zonotope(np.zeros(1), np.array([[0.01, 0.02, 0.01]]))
                          for _ in range(m)),
    )
    lo, hi = _QUAD_REGION
    true0 = rng.uniform(lo + 1.0, hi - 1.0, size=n)
    center0 = true0 + rng.uniform(-0.3, 0.3, size=n)
    initial_set = Zonotope(center0, np.diag([0.5, 0.5, 0.5]))
    return Scenario(
        name="quadcopter",
        model=model,
        anchors=anchors,
        initial_true_state=true0,
        initial_set=initial_set,
        bounds=bounds,
        horizon=horizon,
        trajectory={"kind": "confined-walk", "region": [lo, hi],
                    "drift_scale": 1.0},
    )


def rotating_object_scenario(seed: int = 0, horizon: int = 200) -> Scenario:
    """Linear 2-D tracking of an object in (slowly decaying) circular motion.

    8 sensors alternate between measuring the first and second coordinate;
    everything is linear, so all Lagrange remainders are zero zonotopes.
    """
    rng = np.random.default_rng(seed)
    n, m = 2, 8
    F = np.array([[0.9920, -0.1247], [0.1247, 0.9920]])
    rows = [np.array([1.0, 0.0]) if i % 2 == 0 else np.array([0.0, 1.0])
            for i in range(m)]
    model = SystemModel(
        n=n, m=m,
        f=LinearStateMap(F),
        f_jacobian=ConstantJacobian(F),
        f_hessian_bound=ZeroRemainder(n),
        h=[LinearMeasurement(r) for r in rows],
        h_jacobian=[LinearMeasurementJacobian(r) for r in rows],
        h_hessian_bound=[ZeroRemainder(1) for _ in rows],
    )
    bounds = NoiseBounds(
        process=Zonotope(np.zeros(n), np.diag([0.5, 0.5])),
        measurement=tuple(Zonotope(np.zeros(1), np.array([[0.01, 0.02]]))
                          for _ in range(m)),
    )
    angle = rng.uniform(0.0, 2.0 * np.pi)
    true0 = 60.0 * np.array([np.cos(angle), np.sin(angle)])
    center0 = true0 + rng.uniform(-1.0, 1.0, size=n)
    initial_set = Zonotope(center0, np.diag([3.0, 3.0]))
    return Scenario(
        name="rotating-object",
        model=model,
        anchors=None,
        initial_true_state=true0,
        initial_set=initial_set,
        bounds=bounds,
        horizon=horizon,
        trajectory={"kind": "free-walk", "arena": 180.0, "drift_scale": 1.0},
    )


def _confined_drift(x_next_base, rng, process: Zonotope, region,
                    drift_scale: float, max_tries: int = 200) -> np.ndarray:
    lo, hi = region
    for _ in range(max_tries):
        w = drift_scale * sample_point(process, rng)
        prop = x_next_base + w
        if np.all(prop >= lo) and np.all(prop <= hi):
            return w
    # Steer toward the region center; clipping to the hull keeps the drift
    # inside the noise box (the declared process zonotopes are boxes).
    reach = drift_scale * interval_hull(process).radius
    center = np.full_like(x_next_base, 0.5 * (lo + hi))
    return np.clip(center - x_next_base, -reach, reach)


def _load_csv_truth(path: str, n: int, m: int):
    states, measurements = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            states.append([float(row[c]) for c in ("x", "y", "z")[:n]])
            measurements.append([float(row[f"y{i + 1}"]) for i in range(m)])
    return np.asarray(states), np.asarray(measurements)


def simulate_truth(scenario: Scenario, seed: int):
    """Propagate the true state and emit raw (pre-privacy) measurements.

    Process noise is drawn from the declared process zonotope and measurement
    noise from the per-sensor zonotopes, so the estimator's noise model is
    exactly matched (``trajectory["drift_scale"] > 1`` is the mismatch stress
    mode).  Returns (true_states, measurements) with one row per step;
    deterministic for a given seed.  A trajectory of kind ``csv`` is read
    from disk instead of simulated.
    """
    kind = scenario.trajectory.get("kind", "free-walk")
    if kind == "csv":
        states, measurements = _load_csv_truth(scenario.trajectory["path"],
                                               scenario.model.n,
                                               scenario.model.m)
        return states[: scenario.horizon], measurements[: scenario.horizon]

    rng = np.random.default_rng(seed)
    drift_scale = float(scenario.trajectory.get("drift_scale", 1.0))
    model = scenario.model
    process = scenario.bounds.process
    x = scenario.initial_true_state
    states = np.empty((scenario.horizon, model.n))
    measurements = np.empty((scenario.horizon, model.m))
    for k in range(scenario.horizon):
        base = np.asarray(model.f(x), dtype=float).reshape(-1)
        if kind == "confined-walk":
            w = _confined_drift(base, rng, process,
                                scenario.trajectory["region"], drift_scale)
        else:
            w = drift_scale * sample_point(process, rng)
        x = base + w
        states[k] = x
        for i in range(model.m):
            v = sample_point(scenario.bounds.measurement[i], rng)
            measurements[k, i] = float(model.h[i](x)) + float(v[0])
    return states, measurements


def scenario_to_json_dict(scenario: Scenario) -> dict:
    data = {
        "name": scenario.name,
        "kind": scenario.trajectory.get("model_kind",
                                        _infer_kind(scenario)),
        "initial_true_state": scenario.initial_true_state.tolist(),
        "initial_set": scenario.initial_set.to_json_dict(),
        "process_noise": scenario.bounds.process.to_json_dict(),
        "measurement_noise": [z.to_json_dict()
                              for z in scenario.bounds.measurement],
        "horizon": scenario.horizon,
        "trajectory": scenario.trajectory,
    }
    if scenario.anchors is not None:
        data["anchors"] = scenario.anchors.tolist()
    if isinstance(scenario.model.f, LinearStateMap):
        data["dynamics_matrix"] = scenario.model.f.matrix.tolist()
    if all(isinstance(h, LinearMeasurement) for h in scenario.model.h):
        data["measurement_rows"] = [h.row.tolist() for h in scenario.model.h]
    return data


def _infer_kind(scenario: Scenario) -> str:
    return "range" if scenario.anchors is not None else "linear"


def scenario_from_json_dict(data: dict) -> Scenario:
    """Rebuild a scenario (including callbacks) from its JSON form."""
    initial_set = Zonotope.from_json_dict(data["initial_set"])
    process = Zonotope.from_json_dict(data["process_noise"])
    measurement = tuple(Zonotope.from_json_dict(z)
                        for z in data["measurement_noise"])
    bounds = NoiseBounds(process=process, measurement=measurement)
    n = initial_set.dim
    if data["kind"] == "range":
        anchors = np.asarray(data["anchors"], dtype=float)
        m = anchors.shape[0]
        F = np.asarray(data.get("dynamics_matrix", np.eye(n)), dtype=float)
        model = SystemModel(
            n=n, m=m,
            f=LinearStateMap(F),
            f_jacobian=ConstantJacobian(F),
            f_hessian_bound=ZeroRemainder(n),
            h=[RangeMeasurement(a) for a in anchors],
            h_jacobian=[RangeJacobian(a) for a in anchors],
            h_hessian_bound=[RangeRemainder(a) for a in anchors],
        )
    elif data["kind"] == "linear":
        anchors = None
        rows = [np.asarray(r, dtype=float) for r in data["measurement_rows"]]
        F = np.asarray(data["dynamics_matrix"], dtype=float)
        model = SystemModel(
            n=n, m=len(rows),
            f=LinearStateMap(F),
            f_jacobian=ConstantJacobian(F),
            f_hessian_bound=ZeroRemainder(n),
            h=[LinearMeasurement(r) for r in rows],
            h_jacobian=[LinearMeasurementJacobian(r) for r in rows],
            h_hessian_bound=[ZeroRemainder(1) for _ in rows],
        )
    else:
        raise ValueError(f"unknown scenario kind {data['kind']!r}")
    return Scenario(
        name=data["name"],
        model=model,
        anchors=anchors,
        initial_true_state=np.asarray(data["initial_true_state"], dtype=float),
        initial_set=initial_set,
        bounds=bounds,
        horizon=int(data["horizon"]),
        trajectory=dict(data.get("trajectory", {})),
    )
