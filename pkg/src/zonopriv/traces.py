"""Per-step estimate records and their JSON-lines / CSV serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .estimator import StateSetEstimate
from .sets import Zonotope, interval_hull

__all__ = [
    "EstimateTrace",
    "trace_record",
    "traces_to_jsonl",
    "traces_to_csv",
]

_DIM_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class EstimateTrace:
    """One time step of a benchmark run: the estimate plus ground truth."""

    k: int
    predicted: Zonotope
    corrected: Zonotope
    lam: np.ndarray
    true_state: np.ndarray
    contained: bool
    center_error: float

    @classmethod
    def from_estimate(cls, estimate: StateSetEstimate, true_state,
                      contained: bool) -> "EstimateTrace":
        true_state = np.asarray(true_state, dtype=float).reshape(-1)
        err = float(np.linalg.norm(estimate.corrected.center - true_state))
        return cls(k=estimate.step, predicted=estimate.predicted,
                   corrected=estimate.corrected, lam=estimate.lam,
                   true_state=true_state, contained=bool(contained),
                   center_error=err)


def dim_name(i: int) -> str:
    return _DIM_NAMES[i] if i < len(_DIM_NAMES) else f"x{i}"


def trace_record(t: EstimateTrace) -> dict:
    return {
        "k": t.k,
        "predicted": t.predicted.to_json_dict(),
        "corrected": t.corrected.to_json_dict(),
        "lambda": t.lam.tolist(),
        "true_state": t.true_state.tolist(),
        "contained": t.contained,
    }


def traces_to_jsonl(traces) -> str:
    """One JSON record per line per time step."""
    return "".join(json.dumps(trace_record(t)) + "\n" for t in traces)


def traces_to_csv(traces) -> str:
    """Bounds summary: k, per-dim lower/upper/true, and the center error."""
    traces = list(traces)
    if not traces:
        return ""
    n = traces[0].corrected.dim
    header = ["k"]
    for i in range(n):
        name = dim_name(i)
        header += [f"lower_{name}", f"upper_{name}", f"true_{name}"]
    header.append("center_error")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for t in traces:
        hull = interval_hull(t.corrected)
        row = [t.k]
        for i in range(n):
            row += [repr(float(hull.lower[i])), repr(float(hull.upper[i])),
                    repr(float(t.true_state[i]))]
        row.append(repr(float(t.center_error)))
        writer.writerow(row)
    return buf.getvalue()
