"""Trace record serialization: JSON-lines and the CSV bounds summary."""

import json

import numpy as np
import pytest

from zonopriv.estimator import StateSetEstimate
from zonopriv.sets import Zonotope
from zonopriv.traces import EstimateTrace, traces_to_csv, traces_to_jsonl


def make_trace(k=1):
    predicted = Zonotope([1.0, 2.0], np.diag([0.5, 0.5]))
    corrected = Zonotope([1.1, 1.9], np.diag([0.2, 0.3]))
    est = StateSetEstimate(predicted=predicted, corrected=corrected,
                           lam=np.array([[0.5, 0.1], [0.0, 0.4]]), step=k)
    return EstimateTrace.from_estimate(est, [1.0, 2.0], True)


def test_jsonl_record_fields():
    text = traces_to_jsonl([make_trace(3)])
    record = json.loads(text.strip())
    assert set(record) == {"k", "predicted", "corrected", "lambda",
                           "true_state", "contained"}
    assert record["k"] == 3
    assert record["contained"] is True
    assert record["corrected"]["center"] == [1.1, 1.9]
    assert record["predicted"]["generators"] == [[0.5, 0.0], [0.0, 0.5]]
    assert record["lambda"] == [[0.5, 0.1], [0.0, 0.4]]


def test_jsonl_one_line_per_step():
    text = traces_to_jsonl([make_trace(1), make_trace(2)])
    assert len(text.strip().split("\n")) == 2


def test_csv_summary_columns():
    text = traces_to_csv([make_trace(1)])
    lines = text.strip().split("\n")
    assert lines[0] == ("k,lower_x,upper_x,true_x,lower_y,upper_y,true_y,"
                        "center_error")
    values = lines[1].split(",")
    assert values[0] == "1"
    assert float(values[1]) == pytest.approx(0.9)   # corrected hull lower x
    assert float(values[2]) == pytest.approx(1.3)
    assert float(values[3]) == 1.0   # true x
    err = float(values[-1])
    assert err == pytest.approx(np.hypot(0.1, 0.1))


def test_csv_empty_trace():
    assert traces_to_csv([]) == ""


def test_center_error_computed():
    t = make_trace()
    assert t.center_error == pytest.approx(np.hypot(0.1, 0.1))
