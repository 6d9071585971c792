import numpy as np
import pytest
from numpy.testing import assert_allclose

from soco import adversary, exact
from soco.adversary import ScenarioSpec, aggregate_constraints, generate
from soco.errors import InvalidScenario


def _collect(rounds, x):
    return np.array([[r.eval_f(x), r.eval_g(x)] for r in rounds])


class TestGenerate:
    @pytest.mark.parametrize("kind", adversary.KINDS)
    def test_bit_identical_reproducibility(self, kind, unit_ball):
        spec = ScenarioSpec(kind=kind, seed=11, horizon_T=48, dimension_d=2)
        x = np.array([0.2, -0.4])
        a = _collect(generate(spec, unit_ball), x)
        b = _collect(generate(spec, unit_ball), x)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("kind", adversary.KINDS)
    def test_seeds_differ(self, kind, unit_ball):
        x = np.array([0.2, -0.4])
        a = _collect(generate(ScenarioSpec(kind=kind, seed=1, horizon_T=32, dimension_d=2), unit_ball), x)
        b = _collect(generate(ScenarioSpec(kind=kind, seed=2, horizon_T=32, dimension_d=2), unit_ball), x)
        assert not np.array_equal(a, b)

    @pytest.mark.parametrize("kind", adversary.KINDS)
    def test_anchor_feasible_every_round(self, kind, unit_box):
        spec = ScenarioSpec(kind=kind, seed=3, horizon_T=128, dimension_d=2)
        rounds = generate(spec, unit_box)
        worst = max(r.eval_g(unit_box.anchor_c) for r in rounds)
        assert worst <= 1e-12

    def test_inactive_constraints_never_bind(self, unit_ball):
        spec = ScenarioSpec(kind="switching_halfspace", seed=5, horizon_T=64, dimension_d=2,
                            inactive_constraints=True)
        rounds = generate(spec, unit_ball)
        pts = exact.sample_inside(unit_ball, 17, 50)
        for r in rounds[::7]:
            assert all(r.eval_g(p) < 0 for p in pts)

    def test_gradient_bound_and_quad_form(self, unit_ball):
        spec = ScenarioSpec(kind="rotating_quadratic", seed=7, horizon_T=64, dimension_d=2,
                            params={"theta": 0.5})
        rounds = generate(spec, unit_ball)
        pts = exact.sample_inside(unit_ball, 23, 40)
        for r in rounds[::5]:
            a, w, c = r.quad_form
            for p in pts:
                assert np.linalg.norm(r.grad_f(p)) <= r.declared_M1 + 1e-9
                assert_allclose(r.eval_f(p), 0.5 * a * p @ p + w @ p + c, atol=1e-12)
                assert_allclose(r.grad_f(p), a * p + w, atol=1e-12)

    def test_drifting_linear_unit_gradients(self, unit_ball):
        spec = ScenarioSpec(kind="drifting_linear", seed=2, horizon_T=64, dimension_d=2)
        rounds = generate(spec, unit_ball)
        for r in rounds[::9]:
            g = r.grad_f(unit_ball.anchor_c)
            assert_allclose(np.linalg.norm(g), 1.0, atol=1e-12)

    def test_dimension_mismatch_rejected(self, unit_ball):
        spec = ScenarioSpec(kind="custom", seed=1, horizon_T=8, dimension_d=3)
        with pytest.raises(InvalidScenario):
            generate(spec, unit_ball)

    def test_anchor_outside_rejected(self, unit_ball):
        spec = ScenarioSpec(kind="custom", seed=1, horizon_T=8, dimension_d=2,
                            feasible_anchor=np.array([3.0, 0.0]))
        with pytest.raises(InvalidScenario):
            generate(spec, unit_ball)

    def test_bad_kind_rejected(self):
        with pytest.raises(InvalidScenario):
            ScenarioSpec(kind="nope", seed=1, horizon_T=8, dimension_d=2)

    def test_multi_constraint_aggregation_in_rounds(self, unit_ball):
        spec = ScenarioSpec(kind="custom", seed=6, horizon_T=32, dimension_d=2,
                            params={"num_constraints": 3})
        rounds = generate(spec, unit_ball)
        x = np.array([0.5, 0.5])
        for r in rounds[::5]:
            pieces = r.constraint_affine
            assert len(pieces) == 3
            vals = [float(a @ x) - b for a, b in pieces]
            assert_allclose(r.eval_g(x), max(vals), atol=1e-12)

    def test_lower_dimensional_body_supported(self, simplex3):
        spec = ScenarioSpec(kind="switching_halfspace", seed=8, horizon_T=32, dimension_d=3)
        rounds = generate(spec, simplex3)
        # constraint normals live in the sum-zero subspace
        for r in rounds[::6]:
            a = r.grad_g(simplex3.anchor_c)
            assert abs(np.sum(a)) < 1e-9


class TestAggregateConstraints:
    def test_single_returned_unchanged(self):
        pair = (lambda x: 1.0, lambda x: np.array([1.0, 0.0]))
        assert aggregate_constraints([pair]) is pair

    def test_max_and_argmax_gradient(self):
        c1 = (lambda x: 0.3, lambda x: np.array([1.0, 0.0]))
        c2 = (lambda x: 0.7, lambda x: np.array([0.0, 1.0]))
        ev, gr = aggregate_constraints([c1, c2])
        assert ev(None) == 0.7
        assert_allclose(gr(None), [0.0, 1.0])

    def test_tie_breaks_to_lowest_index(self):
        c1 = (lambda x: 0.5, lambda x: np.array([1.0, 0.0]))
        c2 = (lambda x: 0.5, lambda x: np.array([0.0, 1.0]))
        ev, gr = aggregate_constraints([c1, c2])
        assert_allclose(gr(None), [1.0, 0.0])

    def test_empty_rejected(self):
        with pytest.raises(InvalidScenario):
            aggregate_constraints([])
