import random

import numpy as np
import pytest

from swaporder import (
    BinomialParams,
    EvalMode,
    LinkSpec,
    NormalParams,
    PathSpec,
    Pmf,
    SwapOrder,
    b2n,
    binomial_pmf,
    ent,
    subpath_capacity,
    swap_exact,
    swap_normal,
)
from swaporder.errors import InvalidOrder

from oracles import oracle_ent, random_order, random_small_path, swap_oracle


class TestPathTypes:
    def test_path_validation(self):
        with pytest.raises(ValueError):
            PathSpec.from_params([2, 2], [0.5, 0.5], [0.5, 0.5])  # too many swap probs
        with pytest.raises(ValueError):
            PathSpec.from_params([0], [0.5], [])  # capacity below 1
        with pytest.raises(ValueError):
            LinkSpec(3, 1.2)

    def test_node_count_and_width(self, example1_path):
        assert example1_path.node_count == 5
        assert list(example1_path.interior_nodes()) == [1, 2, 3]
        assert example1_path.width() == 100

    def test_mirrored(self, example1_path):
        mirror = example1_path.mirrored()
        assert [l.capacity for l in mirror.links] == [400, 300, 200, 100]

    def test_invalid_order_rejected(self, example1_path):
        with pytest.raises(InvalidOrder):
            ent(example1_path, (1, 2))
        with pytest.raises(InvalidOrder):
            ent(example1_path, (1, 2, 2))
        with pytest.raises(InvalidOrder):
            ent(example1_path, (1, 2, 4))

    def test_eval_mode_validation(self):
        with pytest.raises(ValueError):
            EvalMode("tail")  # missing epsilon
        with pytest.raises(ValueError):
            EvalMode("exact", 0.1)
        with pytest.raises(ValueError):
            EvalMode("hybrid", 1.5)
        with pytest.raises(ValueError):
            EvalMode("fuzzy")


class TestSwapExact:
    def test_two_point_masses(self):
        score, out = swap_exact(Pmf.point_mass(1), Pmf.point_mass(1), 0.5)
        assert score == pytest.approx(0.5)
        assert out.probs == pytest.approx([0.5, 0.5])

    def test_two_small_binomials(self):
        # E[min] over B(2,.5)^2 is 0.625; thinning by q=0.5 halves it
        left = binomial_pmf(BinomialParams(2, 0.5))
        score, _ = swap_exact(left, left, 0.5)
        assert score == pytest.approx(0.3125, abs=1e-12)

    def test_q_zero_kills_everything(self):
        left = binomial_pmf(BinomialParams(5, 0.7))
        right = binomial_pmf(BinomialParams(3, 0.4))
        score, out = swap_exact(left, right, 0.0)
        assert score == 0.0
        assert out.probs[0] == pytest.approx(1.0, abs=0)
        assert out.support == 3

    def test_support_is_min_of_operands(self):
        left = binomial_pmf(BinomialParams(7, 0.5))
        right = binomial_pmf(BinomialParams(4, 0.5))
        _, out = swap_exact(left, right, 0.8)
        assert out.support == 4

    def test_matches_literal_triple_sum(self):
        rng = random.Random(9)
        for _ in range(25):
            c1, c2 = rng.randint(1, 8), rng.randint(1, 8)
            left = binomial_pmf(BinomialParams(c1, rng.uniform(0.05, 0.95)))
            right = binomial_pmf(BinomialParams(c2, rng.uniform(0.05, 0.95)))
            q = rng.uniform(0.0, 1.0)
            _, out = swap_exact(left, right, q)
            expected = swap_oracle(list(left.probs), list(right.probs), q)
            assert out.probs == pytest.approx(expected, abs=1e-12)

    def test_commutative(self):
        rng = random.Random(10)
        for _ in range(20):
            left = binomial_pmf(BinomialParams(rng.randint(1, 9), rng.random()))
            right = binomial_pmf(BinomialParams(rng.randint(1, 9), rng.random()))
            q = rng.random()
            s_lr, out_lr = swap_exact(left, right, q)
            s_rl, out_rl = swap_exact(right, left, q)
            assert s_lr == pytest.approx(s_rl, abs=1e-12)
            assert out_lr.probs == pytest.approx(out_rl.probs, abs=1e-12)


class TestSwapNormal:
    def test_q_one_preserves_min_distribution(self):
        from swaporder import min_normal_moments

        operand = b2n(BinomialParams(400, 0.5))
        out = swap_normal(operand, operand, 1.0)
        reference = min_normal_moments(operand, operand)
        assert out.mean == pytest.approx(reference.mean, abs=1.0)

    def test_close_to_exact_engine(self):
        left_b, right_b = BinomialParams(100, 0.2), BinomialParams(400, 0.2)
        exact_score, _ = swap_exact(binomial_pmf(left_b), binomial_pmf(right_b), 0.5)
        approx = swap_normal(b2n(left_b), b2n(right_b), 0.5)
        assert approx.mean == pytest.approx(exact_score, rel=0.02)

    def test_well_separated_operands(self):
        out = swap_normal(NormalParams(5.0, 4.0), NormalParams(500.0, 100.0), 0.5)
        assert out.mean == pytest.approx(2.5, rel=0.05)


EXAMPLE1_SCORES = {
    (3, 2, 1): 7.16,
    (1, 3, 2): 5.00,
    (3, 1, 2): 5.00,
    (2, 3, 1): 4.97,
    (2, 1, 3): 4.42,
    (1, 2, 3): 2.50,
}


class TestEnt:
    @pytest.mark.parametrize("order,expected", sorted(EXAMPLE1_SCORES.items()))
    def test_example1_scores(self, example1_path, order, expected):
        score, _ = ent(example1_path, order)
        assert score == pytest.approx(expected, abs=0.005)

    def test_deterministic_chain(self):
        path = PathSpec.from_params([1, 1], [1.0, 1.0], [1.0])
        score, out = ent(path, (1,))
        assert score == pytest.approx(1.0, abs=0)
        assert out.probs == pytest.approx([0.0, 1.0])

    def test_single_link_path_degenerates(self):
        path = PathSpec.from_params([4], [0.5], [])
        score, out = ent(path, ())
        assert score == pytest.approx(2.0)
        assert out.support == 4

    def test_tail_mode_close_to_exact(self, example1_path):
        for order in EXAMPLE1_SCORES:
            exact, _ = ent(example1_path, order)
            tail, _ = ent(example1_path, order, EvalMode.tail(1e-5))
            assert tail == pytest.approx(exact, abs=1e-2)

    def test_matches_joint_enumeration_oracle(self):
        rng = random.Random(501)
        for _ in range(8):
            path = random_small_path(rng, max_links=4, max_cap=5)
            order = random_order(rng, path)
            score, _ = ent(path, order)
            assert score == pytest.approx(oracle_ent(path, order), abs=1e-9)

    def test_same_tree_orders_identical(self, example1_path):
        # [1,3,2] and [3,1,2] realize the same swap tree
        s1, d1 = ent(example1_path, (1, 3, 2))
        s2, d2 = ent(example1_path, (3, 1, 2))
        assert s1 == s2
        assert np.array_equal(d1.probs, d2.probs)

    def test_monotone_in_parameters(self):
        rng = random.Random(502)
        for _ in range(10):
            path = random_small_path(rng, max_links=4, max_cap=5)
            order = random_order(rng, path)
            base, _ = ent(path, order)
            caps = [l.capacity for l in path.links]
            ps = [l.success for l in path.links]
            qs = list(path.swap_probs)
            for i in range(len(caps)):
                bumped = PathSpec.from_params(
                    caps[:i] + [caps[i] + 1] + caps[i + 1 :], ps, qs
                )
                assert ent(bumped, order)[0] >= base - 1e-12
                raised_p = PathSpec.from_params(
                    caps, ps[:i] + [min(1.0, ps[i] + 0.1)] + ps[i + 1 :], qs
                )
                assert ent(raised_p, order)[0] >= base - 1e-12
            for j in range(len(qs)):
                raised_q = PathSpec.from_params(
                    caps, ps, qs[:j] + [min(1.0, qs[j] + 0.1)] + qs[j + 1 :]
                )
                assert ent(raised_q, order)[0] >= base - 1e-12

    def test_final_support_bounded_by_width(self):
        rng = random.Random(503)
        for _ in range(10):
            path = random_small_path(rng, max_links=5, max_cap=6)
            order = random_order(rng, path)
            _, out = ent(path, order)
            assert out.support <= subpath_capacity(path, 0, path.node_count - 1)

    def test_tail_score_within_band(self):
        rng = random.Random(504)
        for epsilon in (1e-3, 1e-5):
            for _ in range(10):
                path = random_small_path(rng, max_links=5, max_cap=30)
                order = random_order(rng, path)
                exact, _ = ent(path, order)
                tail, _ = ent(path, order, EvalMode.tail(epsilon))
                width = path.width()
                assert tail <= exact + 1e-12
                assert tail >= exact - epsilon * width * path.link_count - 1e-12


class TestHybridMode:
    def test_equals_normal_when_three_sigma_holds(self):
        # all links comfortably inside the 3-sigma regime
        path = PathSpec.from_params([500, 800, 600], [0.3, 0.4, 0.35], [0.6, 0.7])
        for order in [(1, 2), (2, 1)]:
            hybrid_score, hybrid_dist = ent(path, order, EvalMode.hybrid(1e-5))
            normal_score, normal_dist = ent(path, order, EvalMode.normal())
            assert hybrid_score == normal_score
            assert isinstance(hybrid_dist, NormalParams)
            assert hybrid_dist == normal_dist

    def test_equals_tail_when_three_sigma_fails_everywhere(self):
        # tiny capacities violate the condition on every link
        path = PathSpec.from_params([4, 5, 4], [0.5, 0.5, 0.5], [0.5, 0.5])
        for order in [(1, 2), (2, 1)]:
            hybrid_score, hybrid_dist = ent(path, order, EvalMode.hybrid(1e-4))
            tail_score, tail_dist = ent(path, order, EvalMode.tail(1e-4))
            assert hybrid_score == tail_score
            assert np.array_equal(hybrid_dist.probs, tail_dist.probs)

    def test_mixed_path_runs_and_stays_close(self):
        path = PathSpec.from_params([6, 900, 700], [0.5, 0.3, 0.3], [0.5, 0.5])
        exact, _ = ent(path, (1, 2))
        hybrid, _ = ent(path, (1, 2), EvalMode.hybrid(1e-5))
        assert hybrid == pytest.approx(exact, rel=0.05)


class TestSubpathCapacity:
    def test_example1_full_span(self, example1_path):
        assert subpath_capacity(example1_path, 0, 4) == 100

    def test_adjacent_is_link_capacity(self, example1_path):
        assert subpath_capacity(example1_path, 2, 3) == 300

    def test_min_over_span(self):
        path = PathSpec.from_params([3, 7, 2], [0.5] * 3, [0.5] * 2)
        assert subpath_capacity(path, 0, 3) == 2

    def test_rejects_bad_span(self, example1_path):
        with pytest.raises(ValueError):
            subpath_capacity(example1_path, 2, 2)
        with pytest.raises(ValueError):
            subpath_capacity(example1_path, 0, 9)
