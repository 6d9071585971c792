import numpy as np
import pytest
from numpy.testing import assert_allclose

from soco import exact, selftest
from soco.errors import InvalidConfig, InvalidDelta, IterationCapExceeded
from soco.geometry import Box, ConvexBody, SeparationResult
from soco.ipso import HAVE_KERNELS, IpsoConfig, default_max_iterations, infeasible_project
from soco.rng import CounterRng


class TestConfig:
    def test_delta_range(self, unit_ball):
        with pytest.raises(InvalidDelta):
            IpsoConfig(delta=1.0, max_iterations=10)
        with pytest.raises(InvalidDelta):
            IpsoConfig(delta=-0.1, max_iterations=10)
        with pytest.raises(InvalidConfig):
            IpsoConfig(delta=0.1, max_iterations=0)

    def test_cap_must_cover_guaranteed_bound(self, unit_ball):
        # D/(delta r) = 20, so fewer than 401 iterations could truncate a run
        cfg = IpsoConfig(delta=0.1, max_iterations=100)
        with pytest.raises(InvalidConfig):
            infeasible_project(unit_ball, cfg, np.array([2.0, 0.0]))

    def test_default_cap_is_ten_times_bound(self, unit_ball):
        assert default_max_iterations(unit_ball, 0.1) == int(np.ceil(10 * (400 + 1)))


class TestBasics:
    def test_inside_point_returned_unchanged(self, unit_ball):
        y0 = np.array([0.3, -0.2])
        out = infeasible_project(unit_ball, IpsoConfig.for_body(unit_ball, 0.1), y0)
        assert out.so_calls == 1 and out.steps_taken == 0
        assert np.array_equal(out.point, y0)

    def test_call_accounting(self, unit_ball):
        cfg = IpsoConfig.for_body(unit_ball, 0.1)
        out = infeasible_project(unit_ball, cfg, np.array([2.0, 0.0]))
        assert out.so_calls == out.steps_taken + 1
        assert unit_ball.contains(out.point)

    def test_ball_bound_and_nonexpansiveness(self, unit_ball):
        # dist((2,0), K_0.1)^2 / (0.1^2 * 1) + 1 = 1.1^2/0.01 + 1 = 122
        cfg = IpsoConfig.for_body(unit_ball, 0.1)
        y0 = np.array([2.0, 0.0])
        out = infeasible_project(unit_ball, cfg, y0)
        assert out.so_calls <= 122
        xs = exact.sample_inside(unit_ball, 77, 500, delta=0.1)
        d_new = np.linalg.norm(xs - out.point, axis=1)
        d_old = np.linalg.norm(xs - y0, axis=1)
        assert np.all(d_new <= d_old + 1e-9)

    def test_box_step_length(self, unit_box):
        cfg = IpsoConfig.for_body(unit_box, 0.05)
        out = infeasible_project(
            unit_box, cfg, np.array([1.3, 0.5]), record_path=True, use_kernel=False
        )
        assert unit_box.contains(out.point)
        step = 0.05 * unit_box.inner_radius_r
        assert_allclose(step, 0.025)
        for a, b in zip(out.path, out.path[1:]):
            assert_allclose(np.linalg.norm(b - a), step, atol=1e-12)

    def test_far_point_gets_clipped_first(self, unit_ball):
        # preamble clips to the D-ball around the anchor before stepping
        cfg = IpsoConfig.for_body(unit_ball, 0.1)
        out = infeasible_project(unit_ball, cfg, np.array([500.0, 0.0]), record_path=True,
                                 use_kernel=False)
        assert np.linalg.norm(out.path[0] - unit_ball.anchor_c) <= unit_ball.diameter_D + 1e-9
        assert unit_ball.contains(out.point)

    def test_delta_zero_degenerates(self, unit_ball):
        cfg = IpsoConfig.for_body(unit_ball, 0.0)
        inside = infeasible_project(unit_ball, cfg, np.array([0.5, 0.0]))
        assert inside.so_calls == 1
        with pytest.raises(IterationCapExceeded):
            infeasible_project(unit_ball, cfg, np.array([1.5, 0.0]))


class _OrthogonalSeparatorBody(ConvexBody):
    """Claims every point is outside, with a separator the hull projection kills."""

    def __init__(self):
        super().__init__(np.zeros(2), 1.0, 2.0)

    def separation_oracle(self, y):
        return SeparationResult(False, np.array([1.0, 1.0]))

    def affine_direction_projection(self, g):
        from soco.errors import DegenerateDirection

        raise DegenerateDirection("separator orthogonal to aff(K)")


def test_degenerate_direction_is_cap_class_failure():
    body = _OrthogonalSeparatorBody()
    cfg = IpsoConfig.for_body(body, 0.1)
    with pytest.raises(IterationCapExceeded):
        infeasible_project(body, cfg, np.array([0.3, 0.1]))


def test_contract_suite():
    ok, detail = selftest.check_ipso_contract(trials=250, samples=60)
    assert ok, detail


@pytest.mark.skipif(not HAVE_KERNELS, reason="compiled kernels not built")
class TestKernelParity:
    @pytest.mark.parametrize("idx", range(7))
    def test_matches_pure_path(self, idx):
        body = selftest.standard_bodies()[idx]
        rng = CounterRng(900 + idx)
        for trial in range(40):
            sub = rng.split(trial)
            delta = 0.03 + 0.4 * float(sub.uniforms(0, 1)[0])
            u = sub.normals(1, body.dimension_d)
            y0 = body.anchor_c + 2.2 * body.diameter_D * float(sub.uniforms(2, 1)[0]) * u / max(
                np.linalg.norm(u), 1e-12
            )
            cfg = IpsoConfig.for_body(body, delta)
            fast = infeasible_project(body, cfg, y0, use_kernel=True)
            pure = infeasible_project(body, cfg, y0, use_kernel=False)
            assert fast.so_calls == pure.so_calls
            assert fast.steps_taken == pure.steps_taken
            assert_allclose(fast.point, pure.point, atol=1e-9, rtol=0.0)

    def test_kernel_cap_error(self, unit_ball):
        cfg = IpsoConfig.for_body(unit_ball, 0.0)
        with pytest.raises(IterationCapExceeded):
            infeasible_project(unit_ball, cfg, np.array([1.5, 0.0]), use_kernel=True)


def test_pure_env_override(monkeypatch, unit_box):
    # the selector honors use_kernel=False regardless of build availability
    cfg = IpsoConfig.for_body(unit_box, 0.2)
    out = infeasible_project(unit_box, cfg, np.array([2.0, 2.0]), use_kernel=False)
    assert unit_box.contains(out.point)
