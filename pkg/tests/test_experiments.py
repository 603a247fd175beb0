"""Experiment runner: reproducibility, metrics, matched baseline, table."""

import numpy as np
import pytest

from zonopriv.experiments import (
    delta_table_to_csv,
    matched_laplace_distribution,
    metrics_to_csv,
    reproduce_delta_table,
    run_experiment,
    run_single,
)
from zonopriv.noise import build_grid, truncated_laplace_distribution
from zonopriv.noise.laplace import truncated_laplace_closed_form_delta
from zonopriv.noise.training import TrainingSchedule
from zonopriv.scenarios import quadcopter_scenario, rotating_object_scenario


@pytest.fixture(scope="module")
def small_dist():
    grid = build_grid(0.25, 200)
    return truncated_laplace_distribution(grid, 0.3, 0.05)


@pytest.fixture(scope="module")
def quad():
    return quadcopter_scenario(seed=7, horizon=40)


class TestRunSingle:
    def test_reproducible(self, quad, small_dist):
        m1, t1 = run_single(quad, small_dist, "cdp", seed=3)
        m2, t2 = run_single(quad, small_dist, "cdp", seed=3)
        assert m1.mean_center_error == m2.mean_center_error
        assert np.array_equal(m1.per_step_error, m2.per_step_error)
        assert all(np.array_equal(a.corrected.generators,
                                  b.corrected.generators)
                   for a, b in zip(t1, t2))

    def test_modes_share_ground_truth(self, quad, small_dist):
        _, t_cdp = run_single(quad, small_dist, "cdp", seed=3)
        _, t_np = run_single(quad, None, "nonprivate", seed=3)
        assert all(np.array_equal(a.true_state, b.true_state)
                   for a, b in zip(t_cdp, t_np))

    def test_nonprivate_containment(self, quad):
        metrics, traces = run_single(quad, None, "nonprivate", seed=1)
        assert metrics.containment_rate == 1.0
        assert len(traces) == quad.horizon
        assert metrics.per_step_error.shape == (quad.horizon,)
        assert metrics.mean_hull_width.shape == (3,)

    def test_private_modes_contained(self, quad, small_dist):
        for mode in ("cdp", "ldp"):
            metrics, _ = run_single(quad, small_dist, mode, seed=2)
            assert metrics.containment_rate == 1.0

    def test_missing_distribution_rejected(self, quad):
        with pytest.raises(ValueError):
            run_single(quad, None, "cdp", seed=0)

    def test_rotating_scenario_with_privacy(self, small_dist):
        sc = rotating_object_scenario(seed=1, horizon=40)
        metrics, _ = run_single(sc, small_dist, "ldp", seed=0)
        assert metrics.containment_rate == 1.0

    def test_rotating_scenario_wide_noise_configuration(self):
        # The linear benchmark runs the wide-noise operating point
        # (epsilon 0.3, range 7, sensitivity 1): no remainders, so even a
        # +-7 m privacy range keeps the estimator sound and bounded.
        from zonopriv.noise import default_half_bins
        from zonopriv.noise.training import TrainingSchedule, train
        grid = build_grid(7.0, default_half_bins(7.0, 1.0))
        dist = train(grid, 0.3, 1.0, TrainingSchedule(epochs=400),
                     init_seed=0, stack_depth=7)
        sc = rotating_object_scenario(seed=2, horizon=100)
        metrics, traces = run_single(sc, dist, "cdp", seed=0)
        assert metrics.containment_rate == 1.0
        assert metrics.mean_hull_width.max() < 50.0


class TestRunExperiment:
    def test_order_matches_seeds(self, quad, small_dist):
        seeds = [5, 1, 9]
        results = run_experiment(quad, small_dist, "cdp", seeds)
        assert [m.seed for m in results] == seeds
        single = run_single(quad, small_dist, "cdp", 1)[0]
        assert results[1].mean_center_error == single.mean_center_error


class TestMatchedLaplace:
    def test_support_matches_closed_form_range(self, small_dist):
        lap = matched_laplace_distribution(small_dist)
        assert lap.epsilon == small_dist.epsilon
        assert lap.sensitivity == small_dist.sensitivity
        # delta of the discretized baseline stays near the target.
        assert lap.delta == pytest.approx(small_dist.delta, rel=0.05)

    def test_grid_alignment(self, small_dist):
        lap = matched_laplace_distribution(small_dist)
        k = lap.sensitivity * lap.grid.N / lap.grid.d
        assert abs(k - round(k)) < 1e-9


class TestReproduceDeltaTable:
    def test_small_grid(self):
        rows = reproduce_delta_table(
            [0.3], [2.0], 1.0, TrainingSchedule(epochs=120), init_seed=0)
        assert len(rows) == 1
        row = rows[0]
        assert row["delta_laplace_closed_form"] == pytest.approx(
            truncated_laplace_closed_form_delta(0.3, 2.0, 1.0))
        assert 0.0 < row["delta_trained"] <= 1.0

    def test_csv_shape(self):
        rows = [
            {"epsilon": 0.1, "d": 3.0, "delta_trained": 0.2,
             "delta_laplace_closed_form": 0.15},
            {"epsilon": 0.1, "d": 5.0, "delta_trained": 0.1,
             "delta_laplace_closed_form": 0.08},
            {"epsilon": 0.3, "d": 3.0, "delta_trained": 0.12,
             "delta_laplace_closed_form": 0.12},
            {"epsilon": 0.3, "d": 5.0, "delta_trained": 0.05,
             "delta_laplace_closed_form": 0.05},
        ]
        text = delta_table_to_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0] == "epsilon,d=3,d=5"
        assert lines[1].startswith("0.1,")
        assert lines[2].startswith("0.3,")


class TestMetricsCsv:
    def test_header_and_rows(self, quad, small_dist):
        metrics, _ = run_single(quad, small_dist, "cdp", seed=0)
        text = metrics_to_csv([{
            "scenario": "quadcopter", "mode": "cdp", "noise_type": "optimal",
            "epsilon": 0.3, "d": 0.25, "delta": small_dist.delta,
            "metrics": metrics,
        }])
        lines = text.strip().split("\n")
        assert lines[0] == ("scenario,mode,noise_type,epsilon,d,delta,seed,"
                            "containment_rate,mean_center_error,"
                            "mean_hull_width_x,mean_hull_width_y,"
                            "mean_hull_width_z")
        assert lines[1].startswith("quadcopter,cdp,optimal,0.3,0.25,")
