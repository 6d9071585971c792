import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from soco import adversary, evaluation, ogd, selftest
from soco.errors import BlockOverflow, InvalidConfig
from soco.ogd import BlockLearner, ConvexStep, StronglyConvexStep


class TestStepRules:
    def test_convex_formula(self):
        # D=2, eps=1, first block with |avg grad|^2 = 3 -> eta = 2/sqrt(4) = 1
        rule = ConvexStep(epsilon=1.0, diameter=2.0)
        assert_allclose(rule.eta(1, 3.0), 1.0)

    def test_strongly_convex_formula(self):
        rule = StronglyConvexStep(theta=0.5)
        assert_allclose(rule.eta(4, 123.0), 0.5)

    def test_epsilon_zero_empty_sum(self):
        rule = ConvexStep(epsilon=0.0, diameter=2.0)
        assert rule.eta(1, 0.0) == math.inf

    def test_validation(self):
        with pytest.raises(InvalidConfig):
            ConvexStep(epsilon=-1.0, diameter=2.0)
        with pytest.raises(InvalidConfig):
            StronglyConvexStep(theta=0.0)


class TestBlockLearner:
    def _learner(self, body, T=8, K=2, delta=0.1):
        return BlockLearner(body, T, K, delta, ConvexStep(1.0, body.diameter_D), body.anchor_c)

    def test_initial_state(self, unit_ball):
        lrn = self._learner(unit_ball)
        assert lrn.block_index_m == 1
        assert_allclose(lrn.action, unit_ball.anchor_c)

    def test_divisibility_enforced(self, unit_ball):
        with pytest.raises(InvalidConfig):
            BlockLearner(unit_ball, 10, 3, 0.1, ConvexStep(1.0, 2.0), unit_ball.anchor_c)

    def test_bad_start_and_delta(self, unit_ball):
        with pytest.raises(InvalidConfig):
            BlockLearner(unit_ball, 8, 2, 0.1, ConvexStep(1.0, 2.0), np.array([5.0, 0.0]))
        with pytest.raises(InvalidConfig):
            BlockLearner(unit_ball, 8, 2, 0.0, ConvexStep(1.0, 2.0), unit_ball.anchor_c)

    def test_gradient_accumulation(self, unit_ball):
        lrn = self._learner(unit_ball)
        lrn.feed_gradient(np.array([1.0, 0.0]))
        lrn.feed_gradient(np.array([0.0, 1.0]))
        assert_allclose(lrn.grad_sum, [1.0, 1.0])
        rec = lrn.end_block()
        assert_allclose(rec.mean_grad, [0.5, 0.5])

    def test_block_overflow(self, unit_ball):
        lrn = self._learner(unit_ball)
        lrn.feed_gradient(np.zeros(2))
        lrn.feed_gradient(np.zeros(2))
        with pytest.raises(BlockOverflow):
            lrn.feed_gradient(np.zeros(2))

    def test_zero_gradients_fix_the_action(self, unit_ball):
        lrn = self._learner(unit_ball)
        start = lrn.action.copy()
        for _ in range(2):
            lrn.feed_gradient(np.zeros(2))
        lrn.end_block()
        assert np.array_equal(lrn.action, start)
        assert lrn.total_so_calls == 1

    def test_interior_update_no_correction(self, unit_ball):
        # eta = 2/sqrt(15+1) = 0.5: tentative (-0.5, 0) is in K, one call only
        lrn = BlockLearner(unit_ball, 4, 1, 0.1, ConvexStep(15.0, 2.0), unit_ball.anchor_c)
        lrn.feed_gradient(np.array([1.0, 0.0]))
        rec = lrn.end_block()
        assert rec.so_calls == 1
        assert_allclose(lrn.action, [-0.5, 0.0], atol=1e-12)

    def test_eta_monotone_and_feasible(self, unit_box):
        rng = np.random.default_rng(0)
        lrn = BlockLearner(unit_box, 64, 4, 0.1, ConvexStep(1.0, unit_box.diameter_D),
                           unit_box.anchor_c)
        etas = []
        for t in range(64):
            lrn.feed_gradient(rng.normal(size=2))
            if lrn.block_full():
                rec = lrn.end_block()
                etas.append(rec.eta)
                assert unit_box.contains(lrn.action)
        assert all(a >= b - 1e-15 for a, b in zip(etas, etas[1:]))

    def test_strongly_convex_etas(self, unit_ball):
        lrn = BlockLearner(unit_ball, 6, 2, 0.1, StronglyConvexStep(2.0), unit_ball.anchor_c)
        seen = []
        for t in range(6):
            lrn.feed_gradient(np.array([0.1, 0.0]))
            if lrn.block_full():
                seen.append(lrn.end_block().eta)
        assert_allclose(seen, [1.0 / 2.0, 1.0 / 4.0, 1.0 / 6.0])


class TestRunOco:
    def test_unblocked_equals_T_blocks(self, unit_ball):
        spec = adversary.ScenarioSpec(kind="custom", seed=4, horizon_T=32, dimension_d=2)
        rounds = adversary.generate(spec, unit_ball)
        rep = ogd.run_oco(unit_ball, 32, 1, 0.1, ConvexStep(1.0, 2.0), rounds)
        assert len(rep.blocks) == 32
        assert rep.total_so_calls >= 32

    def test_constant_linear_cost_converges(self, unit_ball):
        # fixed cost <g, x> on the ball: optimum is -g/|g|, regret rate decays
        g = np.array([1.0, 0.0])

        class _Lin:
            eval_f = staticmethod(lambda x: float(g @ x))
            grad_f = staticmethod(lambda x: g)
            quad_form = (0.0, g, 0.0)

        rounds = [_Lin() for _ in range(256)]
        rep = ogd.run_oco(unit_ball, 256, 1, 0.05, ConvexStep(1.0, 2.0), rounds)
        assert_allclose(rep.hindsight_point, [-1.0, 0.0], atol=1e-12)
        assert_allclose(rep.rounds[-1].action, [-1.0, 0.0], atol=0.15)
        short = ogd.run_oco(unit_ball, 64, 1, 0.05, ConvexStep(1.0, 2.0), rounds[:64])
        assert rep.regret / 256 < short.regret / 64  # per-round regret decreasing

    def test_report_consistency(self, unit_box):
        spec = adversary.ScenarioSpec(kind="drifting_linear", seed=9, horizon_T=64, dimension_d=2)
        rounds = adversary.generate(spec, unit_box)
        rep = ogd.run_oco(unit_box, 64, 4, 0.1, ConvexStep(1.0, unit_box.diameter_D), rounds)
        regret, ccv = evaluation.recompute_metrics(rep)
        assert_allclose(regret, rep.regret, atol=1e-9)
        assert ccv == 0.0
        assert rep.rounds[-1].so_calls_cum <= rep.total_so_calls


def test_regret_certificate_suite():
    ok, detail = selftest.check_regret_certificates(n_scenarios=25)
    assert ok, detail


def test_orabona_summation_lemma():
    ok, detail = selftest.check_orabona_summation(sequences=2000)
    assert ok, detail
