"""Zonotope operations against enumeration and LP oracles."""

import itertools

import numpy as np
import pytest

from zonopriv.sets import (
    IntervalBox,
    Zonotope,
    cartesian_product,
    contains_point,
    interval_hull,
    linear_map,
    minkowski_sum,
    reduce_order,
    sample_point,
)


def corner_points(z):
    """All 2^g extreme candidates c + G s, s in {-1, 1}^g (oracle helper)."""
    pts = []
    for signs in itertools.product((-1.0, 1.0), repeat=z.order):
        pts.append(z.center + z.generators @ np.array(signs))
    return np.array(pts)


def random_zonotope(rng, n, g, scale=1.0):
    return Zonotope(rng.normal(0, scale, n), rng.normal(0, scale, (n, g)))


class TestConstruction:
    def test_shapes(self):
        z = Zonotope([1.0, 2.0], [[1.0, 0.0], [0.0, 1.0]])
        assert z.dim == 2 and z.order == 2

    def test_point_zonotope(self):
        z = Zonotope.point([3.0, 4.0])
        assert z.order == 0 and z.generators.shape == (2, 0)

    def test_row_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Zonotope([1.0], [[1.0], [2.0]])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            Zonotope([np.nan], [[1.0]])
        with pytest.raises(ValueError):
            Zonotope([0.0], [[np.inf]])

    def test_immutable(self):
        z = Zonotope([0.0], [[1.0]])
        with pytest.raises(ValueError):
            z.center[0] = 5.0

    def test_json_round_trip(self):
        z = Zonotope([1.0, -2.0], [[1.0, 0.5], [0.0, 2.0]])
        back = Zonotope.from_json_dict(z.to_json_dict())
        assert np.array_equal(back.center, z.center)
        assert np.array_equal(back.generators, z.generators)


class TestLinearMap:
    def test_identity(self):
        z = Zonotope([1.0, 2.0], [[1.0, 0.0], [0.0, 1.0]])
        out = linear_map(np.eye(2), z)
        assert np.array_equal(out.center, z.center)
        assert np.array_equal(out.generators, z.generators)

    def test_scalar_case(self):
        out = linear_map([[2.0]], Zonotope([3.0], [[1.0]]))
        assert out.center[0] == 6.0 and out.generators[0, 0] == 2.0

    def test_projection_hull(self):
        # Sum of coordinates of the unit box: hull [-2, 2].
        out = linear_map([[1.0, 1.0]], Zonotope([0.0, 0.0], np.eye(2)))
        pts = corner_points(out)
        hull = interval_hull(out)
        assert hull.lower[0] == pytest.approx(pts.min()) == pytest.approx(-2.0)
        assert hull.upper[0] == pytest.approx(pts.max()) == pytest.approx(2.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            linear_map(np.eye(3), Zonotope([0.0, 0.0], np.eye(2)))

    def test_composition_exact(self):
        rng = np.random.default_rng(5)
        z = random_zonotope(rng, 3, 4)
        A = rng.normal(size=(2, 3))
        B = rng.normal(size=(3, 3))
        lhs = linear_map(A, linear_map(B, z))
        rhs = linear_map(A @ B, z)
        assert np.allclose(lhs.center, rhs.center, atol=1e-14)
        assert np.allclose(lhs.generators, rhs.generators, atol=1e-14)


class TestMinkowskiSum:
    def test_additive_identity(self):
        z = Zonotope([1.0, 2.0], [[1.0, 0.5], [0.0, 1.0]])
        out = minkowski_sum(Zonotope.point([0.0, 0.0]), z)
        assert np.array_equal(out.center, z.center)
        assert np.array_equal(out.generators, z.generators)

    def test_scalar_concatenation(self):
        out = minkowski_sum(Zonotope([1.0], [[1.0]]), Zonotope([2.0], [[3.0]]))
        assert out.center[0] == 3.0
        assert np.array_equal(out.generators, [[1.0, 3.0]])

    def test_hull_additivity_via_vertices(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            z1 = random_zonotope(rng, 2, 3)
            z2 = random_zonotope(rng, 2, 2)
            total = minkowski_sum(z1, z2)
            # Oracle: sums of all corner pairs span the same box.
            sums = (corner_points(z1)[:, None, :]
                    + corner_points(z2)[None, :, :]).reshape(-1, 2)
            hull = interval_hull(total)
            assert np.allclose(hull.lower, sums.min(axis=0), atol=1e-12)
            assert np.allclose(hull.upper, sums.max(axis=0), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            minkowski_sum(Zonotope([0.0], [[1.0]]),
                          Zonotope([0.0, 0.0], np.eye(2)))


class TestCartesianProduct:
    def test_block_structure(self):
        out = cartesian_product(Zonotope([1.0], [[1.0]]),
                                Zonotope([2.0], [[1.0]]))
        assert np.array_equal(out.center, [1.0, 2.0])
        assert np.array_equal(out.generators, [[1.0, 0.0], [0.0, 1.0]])

    def test_empty_factor(self):
        z = Zonotope([1.0, 2.0], [[1.0, 0.5], [0.0, 1.0]])
        empty = Zonotope(np.zeros(0), np.zeros((0, 0)))
        out = cartesian_product(z, empty)
        assert np.array_equal(out.center, z.center)
        assert np.array_equal(out.generators, z.generators)

    def test_hull_concatenation(self):
        rng = np.random.default_rng(2)
        z1 = random_zonotope(rng, 2, 3)
        z2 = random_zonotope(rng, 1, 2)
        hull = interval_hull(cartesian_product(z1, z2))
        h1, h2 = interval_hull(z1), interval_hull(z2)
        assert np.allclose(hull.lower, np.concatenate([h1.lower, h2.lower]))
        assert np.allclose(hull.upper, np.concatenate([h1.upper, h2.upper]))


class TestReduceOrder:
    def test_no_reduction_needed(self):
        z = random_zonotope(np.random.default_rng(0), 2, 4)
        out = reduce_order(z, 2)
        assert out is z

    def test_invalid_order(self):
        with pytest.raises(ValueError):
            reduce_order(Zonotope([0.0], [[1.0]]), 0)

    def test_order_one_is_interval_hull(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            z = random_zonotope(rng, 2, 4)
            out = reduce_order(z, 1)
            hull = interval_hull(z)
            assert out.order <= 2
            assert np.allclose(interval_hull(out).lower, hull.lower)
            assert np.allclose(interval_hull(out).upper, hull.upper)
            # Box generators: one axis-aligned column per coordinate.
            assert np.count_nonzero(out.generators) == out.order

    def test_generator_cap(self):
        rng = np.random.default_rng(4)
        z = random_zonotope(rng, 3, 17)
        out = reduce_order(z, 2)
        assert out.order <= 6

    def test_zero_columns_dropped(self):
        G = np.array([[1.0, 0.0, 0.2, 0.3, 0.4], [0.0, 0.0, 0.1, 0.2, 0.1]])
        out = reduce_order(Zonotope([0.0, 0.0], G), 2)
        assert out.order <= 4
        assert not np.any(np.all(out.generators == 0.0, axis=0))

    def test_over_approximation_vertices(self):
        # Every corner of the original lies inside the reduced set.
        rng = np.random.default_rng(6)
        for _ in range(50):
            z = random_zonotope(rng, 2, 5)
            out = reduce_order(z, 1 + int(rng.integers(0, 2)))
            for pt in corner_points(z):
                assert contains_point(out, pt, tol=1e-7)

    def test_deterministic_tie_break_keeps_lower_index(self):
        # Columns 0 and 1 tie on |g|_1 - |g|_inf; with room to keep two
        # originals (n*(q-1) = 2), the tie is broken toward column 0.
        G = np.array([[2.0, -2.0, 0.1, 0.1, 0.1],
                      [1.0, 1.0, 0.05, 0.02, 0.01]])
        z = Zonotope([0.0, 0.0], G)
        out = reduce_order(z, 2)
        kept = out.generators[:, :2]
        assert np.array_equal(kept[:, 0], G[:, 0])
        assert np.array_equal(kept[:, 1], G[:, 1])
        assert np.array_equal(out.generators,
                              reduce_order(z, 2).generators)


class TestIntervalHull:
    def test_absolute_row_sum(self):
        hull = interval_hull(Zonotope([0.0], [[1.0, 2.0]]))
        assert hull.lower[0] == -3.0 and hull.upper[0] == 3.0

    def test_point_zonotope_degenerate(self):
        hull = interval_hull(Zonotope.point([1.5, -2.0]))
        assert np.array_equal(hull.lower, hull.upper)

    def test_contains_samples(self):
        rng = np.random.default_rng(7)
        z = random_zonotope(rng, 3, 6)
        hull = interval_hull(z)
        for _ in range(200):
            assert hull.contains(sample_point(z, rng), tol=1e-12)

    def test_tightness_via_sign_witness(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            z = random_zonotope(rng, 2, 4)
            hull = interval_hull(z)
            for i in range(2):
                beta = -np.sign(z.generators[i])
                low = z.center[i] + z.generators[i] @ beta
                high = z.center[i] - z.generators[i] @ beta
                assert low == pytest.approx(hull.lower[i], abs=1e-12)
                assert high == pytest.approx(hull.upper[i], abs=1e-12)


class TestContainsPoint:
    def test_center(self):
        z = random_zonotope(np.random.default_rng(9), 3, 5)
        assert contains_point(z, z.center)

    def test_outside_interval(self):
        assert not contains_point(Zonotope([0.0], [[1.0]]), [1.5])

    def test_constructive_witness(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            z = random_zonotope(rng, 3, 6)
            beta = rng.uniform(-1.0, 1.0, z.order)
            assert contains_point(z, z.center + z.generators @ beta)

    def test_outside_support_plane(self):
        # Support-function oracle: the farthest reach of Z along a unit
        # direction u is u.c + sum_i |u.g_i|; any point beyond it is outside.
        rng = np.random.default_rng(12)
        for _ in range(50):
            z = random_zonotope(rng, 2, 4)
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            support = float(u @ z.center + np.abs(u @ z.generators).sum())
            pt = z.center + u * (support - u @ z.center) * 1.001 + u * 1e-6
            assert float(u @ pt) > support
            assert not contains_point(z, pt)

    def test_degenerate_no_generators(self):
        z = Zonotope.point([1.0, 2.0])
        assert contains_point(z, [1.0, 2.0])
        assert not contains_point(z, [1.0, 2.1])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            contains_point(Zonotope([0.0], [[1.0]]), [0.0, 0.0])


class TestSamplePoint:
    def test_point_zonotope(self):
        rng = np.random.default_rng(0)
        z = Zonotope.point([2.0, 3.0])
        assert np.array_equal(sample_point(z, rng), [2.0, 3.0])

    def test_samples_inside_unit_box(self):
        rng = np.random.default_rng(1)
        z = Zonotope(np.zeros(2), np.eye(2))
        pts = np.array([sample_point(z, rng) for _ in range(10_000)])
        assert np.all(np.abs(pts) <= 1.0)

    def test_coordinate_means_clt(self):
        # Mean of c + G beta is c; per-coordinate variance sum_j G_ij^2 / 3.
        rng = np.random.default_rng(2)
        z = Zonotope([1.0, -2.0], np.array([[1.0, 0.5], [0.0, 2.0]]))
        n = 20_000
        pts = np.array([sample_point(z, rng) for _ in range(n)])
        sigma = np.sqrt((z.generators ** 2).sum(axis=1) / 3.0 / n)
        assert np.all(np.abs(pts.mean(axis=0) - z.center) <= 3.0 * sigma)


class TestInvariantProperties:
    def test_reduce_order_over_approximation_sampled(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            z = random_zonotope(rng, 2, 7)
            out = reduce_order(z, 2)
            for _ in range(50):
                pt = sample_point(z, rng)
                assert contains_point(out, pt, tol=1e-7)

    def test_minkowski_hull_commutation(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            z1 = random_zonotope(rng, 3, 4)
            z2 = random_zonotope(rng, 3, 3)
            h = interval_hull(minkowski_sum(z1, z2))
            h1, h2 = interval_hull(z1), interval_hull(z2)
            assert np.allclose(h.lower, h1.lower + h2.lower, atol=1e-12)
            assert np.allclose(h.upper, h1.upper + h2.upper, atol=1e-12)
