import numpy as np
import pytest
from numpy.testing import assert_allclose

from soco import exact, geometry, selftest
from soco.errors import DegenerateDirection, DimensionMismatch, InvalidConfig, InvalidDelta
from soco.geometry import Ball, Box, HalfspacePolytope, Simplex, shrunk_member
from soco.rng import CounterRng


class TestSeparationOracle:
    def test_ball_center_inside(self, unit_ball):
        assert unit_ball.separation_oracle(np.zeros(2)).inside

    def test_ball_outside_separator_direction(self, unit_ball):
        res = unit_ball.separation_oracle(np.array([2.0, 0.0]))
        assert not res.inside
        sep = res.separator / np.linalg.norm(res.separator)
        assert_allclose(sep, [1.0, 0.0], atol=1e-12)

    def test_box_violated_face_normal(self, unit_box):
        res = unit_box.separation_oracle(np.array([0.5, 1.5]))
        assert not res.inside
        sep = res.separator / np.linalg.norm(res.separator)
        assert_allclose(sep, [0.0, 1.0], atol=1e-12)

    def test_dimension_mismatch(self, unit_ball):
        with pytest.raises(DimensionMismatch):
            unit_ball.separation_oracle(np.zeros(3))

    def test_non_finite_rejected(self, unit_ball):
        with pytest.raises(ValueError):
            unit_ball.separation_oracle(np.array([np.nan, 0.0]))

    def test_boundary_point_counts_inside(self, unit_ball):
        # membership tolerance keeps exact boundary points from separating
        assert unit_ball.separation_oracle(np.array([1.0, 0.0])).inside


class TestAffineProjection:
    def test_full_dimensional_identity(self, unit_ball):
        y = np.array([3.0, 4.0])
        assert_allclose(unit_ball.affine_projection(y), y)

    def test_simplex_origin(self, simplex3):
        assert_allclose(simplex3.affine_projection(np.zeros(3)), np.full(3, 1 / 3))

    def test_simplex_symmetric(self, simplex3):
        assert_allclose(simplex3.affine_projection(np.ones(3)), np.full(3, 1 / 3))

    def test_direction_identity_full_dim(self, unit_ball):
        g = np.array([1.0, 2.0])
        assert_allclose(unit_ball.affine_direction_projection(g), g)

    def test_direction_normal_raises(self, simplex3):
        with pytest.raises(DegenerateDirection):
            simplex3.affine_direction_projection(np.ones(3))

    def test_direction_in_subspace_unchanged(self, simplex3):
        g = np.array([1.0, -1.0, 0.0])
        assert_allclose(simplex3.affine_direction_projection(g), g, atol=1e-15)


class TestShrunkSet:
    def test_identity_at_zero(self, unit_box):
        x = np.array([0.3, 0.7])
        assert_allclose(shrunk_member(unit_box, 0.0, x), x)

    def test_ball_interpolation(self, unit_ball):
        assert_allclose(shrunk_member(unit_ball, 0.5, np.array([1.0, 0.0])), [0.5, 0.0])

    def test_box_interpolation(self, unit_box):
        assert_allclose(shrunk_member(unit_box, 0.2, np.array([1.0, 1.0])), [0.9, 0.9])

    def test_invalid_delta(self, unit_ball):
        for bad in (-0.1, 1.0, 1.5):
            with pytest.raises(InvalidDelta):
                shrunk_member(unit_ball, bad, np.zeros(2))

    def test_distance_ball(self, unit_ball):
        d = geometry.distance_to_shrunk(unit_ball, 0.5, np.array([2.0, 0.0]))
        assert_allclose(d, 1.5, atol=1e-12)

    def test_distance_zero_inside(self, unit_box):
        assert geometry.distance_to_shrunk(unit_box, 0.3, np.array([0.5, 0.5])) == 0.0

    def test_distance_shrunk_box(self, unit_box):
        # shrunk box is [0.1, 0.9]^2; distance from (2, 0.5) is 1.1
        d = geometry.distance_to_shrunk(unit_box, 0.2, np.array([2.0, 0.5]))
        assert_allclose(d, 1.1, atol=1e-9)

    def test_distance_shrunk_simplex_matches_sampling(self, simplex3):
        # exact projection distance must lower-bound distances to samples
        y = np.array([1.0, -0.5, 0.2])
        d = geometry.distance_to_shrunk(simplex3, 0.2, y)
        pts = exact.sample_inside(simplex3, 9, 2000, delta=0.2)
        assert d <= np.min(np.linalg.norm(pts - y, axis=1)) + 1e-9


class TestGeometryConstants:
    def test_ball_constants(self):
        b = Ball(np.array([1.0, -1.0]), 2.0)
        assert b.inner_radius_r == 2.0
        assert b.diameter_D == 4.0
        assert b.contains(b.anchor_c)

    def test_box_constants(self):
        b = Box(np.array([0.0, -1.0]), np.array([2.0, 3.0]))
        assert b.inner_radius_r == 1.0
        assert_allclose(b.diameter_D, np.sqrt(4 + 16))
        assert_allclose(b.anchor_c, [1.0, 1.0])

    def test_simplex_constants(self, simplex3):
        assert_allclose(simplex3.inner_radius_r, 1.0 / np.sqrt(6.0))
        assert_allclose(simplex3.diameter_D, np.sqrt(2.0))
        assert simplex3.contains(simplex3.anchor_c)

    def test_polytope_chebyshev(self, pentagon):
        # regular pentagon with unit apothem: r = 1, anchor at the origin
        assert_allclose(pentagon.anchor_c, [0.0, 0.0], atol=1e-8)
        assert_allclose(pentagon.inner_radius_r, 1.0, atol=1e-8)
        assert pentagon.vertices.shape == (5, 2)

    def test_invalid_bodies(self):
        with pytest.raises(InvalidConfig):
            Ball(np.zeros(2), -1.0)
        with pytest.raises(InvalidConfig):
            Box(np.ones(2), np.zeros(2))
        with pytest.raises(InvalidConfig):
            Simplex(1)
        with pytest.raises(InvalidConfig):
            # unbounded: only one halfspace
            HalfspacePolytope(np.array([[1.0, 0.0]]), np.array([1.0]))

    @pytest.mark.parametrize("idx", range(7))
    def test_radius_and_diameter_match_brute_force(self, idx):
        body = selftest.standard_bodies()[idx]
        pts = exact.sample_inside(body, 101 + idx, 20000)
        # diametral pairs have extreme support in some direction, so probing
        # from directional extremes lower-bounds D without a full n^2 sweep
        dirs = CounterRng(300 + idx).unit_vectors(0, 128, body.dimension_d)
        extremes = pts[np.unique(np.argmax(pts @ dirs.T, axis=0))]
        far = 0.0
        for e in extremes:
            diffs = pts - e
            far = max(far, float(np.max(np.sum(diffs * diffs, axis=1))))
        sampled_D = np.sqrt(far)
        assert sampled_D <= body.diameter_D + 1e-9
        assert sampled_D >= 0.95 * body.diameter_D
        # max feasible step from the anchor along random directions, inside aff(K)
        rng = CounterRng(55 + idx)
        r_hat = np.inf
        for j in range(64):
            u = rng.split(j).normals(0, body.dimension_d)
            try:
                u = body.affine_direction_projection(u)
            except DegenerateDirection:
                continue
            u = u / np.linalg.norm(u)
            lo, hi = 0.0, body.diameter_D
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                if body.contains(body.anchor_c + mid * u):
                    lo = mid
                else:
                    hi = mid
            r_hat = min(r_hat, lo)
        assert body.inner_radius_r <= r_hat + 1e-6
        assert r_hat <= 1.05 * body.inner_radius_r + 1e-6


class TestInvariantSuites:
    def test_separator_validity(self):
        ok, detail = selftest.check_separator_validity(trials=200, samples=50)
        assert ok, detail

    def test_affine_idempotence(self):
        ok, detail = selftest.check_affine_idempotence(trials=100)
        assert ok, detail

    def test_shrunk_containment(self):
        ok, detail = selftest.check_shrunk_containment(trials=100)
        assert ok, detail
