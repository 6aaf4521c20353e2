import random

import pytest

import swaporder.swap_engine as swap_engine
from swaporder import (
    EvalMode,
    PathSpec,
    SwapOrder,
    balanced_tree,
    brute_force,
    count_trees,
    ent,
    enumerate_trees,
    greedy_swap,
    scored_orders,
    swap_exact,
    vora_swap,
)
from swaporder.errors import BudgetExceeded
from swaporder.order_search import _greedy_core

from oracles import random_small_path

CATALAN = [1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786]


class TestEnumeration:
    @pytest.mark.parametrize("links,expected", list(zip(range(2, 13), CATALAN)))
    def test_tree_counts(self, links, expected):
        assert count_trees(links) == expected
        assert sum(1 for _ in enumerate_trees(links)) == expected

    def test_single_link(self):
        trees = list(enumerate_trees(1))
        assert len(trees) == 1 and trees[0].is_leaf

    def test_canonical_orders_distinct(self):
        for links in (3, 5, 7):
            orders = [t.canonical_order().sequence for t in enumerate_trees(links)]
            assert len(set(orders)) == count_trees(links)

    def test_leaves_in_path_order(self):
        for tree in enumerate_trees(5):
            assert tree.leaves() == [0, 1, 2, 3, 4]

    def test_canonical_orders_are_valid(self):
        path = PathSpec.from_params([2] * 5, [0.5] * 5, [0.5] * 4)
        for tree in enumerate_trees(5):
            tree.canonical_order().validate_for(path)


class TestBruteForce:
    def test_example1_optimum(self, example1_path):
        best = brute_force(example1_path)
        assert best.order.sequence == (3, 2, 1)
        assert best.score == pytest.approx(7.16, abs=0.005)

    def test_example2_optimum_is_balanced(self, example2_path):
        best = brute_force(example2_path)
        assert best.order.sequence == (1, 3, 2)
        assert best.score == pytest.approx(3.72, abs=0.005)

    def test_three_node_path(self):
        path = PathSpec.from_params([2, 3], [0.5, 0.4], [0.7])
        best = brute_force(path)
        assert best.order.sequence == (1,)
        from swaporder import BinomialParams, binomial_pmf

        score, _ = swap_exact(
            binomial_pmf(BinomialParams(2, 0.5)),
            binomial_pmf(BinomialParams(3, 0.4)),
            0.7,
        )
        assert best.score == score

    def test_budget_exceeded(self, example1_path):
        with pytest.raises(BudgetExceeded):
            brute_force(example1_path, tree_budget=4)

    def test_parallel_matches_serial(self, example2_path):
        serial = brute_force(example2_path)
        parallel = brute_force(example2_path, jobs=4)
        assert serial == parallel

    def test_scored_orders_covers_all_trees(self, example2_path):
        scored = list(scored_orders(example2_path, EvalMode.tail(1e-5)))
        assert len(scored) == count_trees(4)
        assert all(s.score >= 0 for s in scored)


class TestGreedySwap:
    def test_example1_finds_optimum(self, example1_path):
        result = greedy_swap(example1_path)
        assert result.order.sequence == (3, 2, 1)
        assert result.score == pytest.approx(7.16, abs=0.005)

    def test_example2_picks_middle_first(self, example2_path):
        result = greedy_swap(example2_path)
        assert result.order.sequence == (2, 1, 3)
        assert result.score == pytest.approx(2.24, abs=0.005)

    def test_three_node_path(self):
        path = PathSpec.from_params([3, 3], [0.5, 0.5], [0.5])
        assert greedy_swap(path).order.sequence == (1,)

    def test_score_equals_ent_of_returned_order(self):
        rng = random.Random(61)
        for _ in range(10):
            path = random_small_path(rng, max_links=6, max_cap=8)
            result = greedy_swap(path)
            score, _ = ent(path, result.order)
            assert result.score == pytest.approx(score, abs=1e-12)

    def test_swap_call_budget(self, monkeypatch, example1_path):
        calls = {"n": 0}
        real = swap_engine.swap_exact

        def counting(*args, **kwargs):
            calls["n"] += 1
            return real(*args, **kwargs)

        monkeypatch.setattr(swap_engine, "swap_exact", counting)
        greedy_swap(example1_path)
        n = example1_path.link_count
        assert calls["n"] <= 3 * (n - 1)

    def test_mirror_invariance_without_ties(self):
        rng = random.Random(62)
        checked = 0
        for _ in range(30):
            path = random_small_path(rng, max_links=6, max_cap=9)
            order, _, ties = _greedy_core(path, EvalMode.exact())
            m_order, _, m_ties = _greedy_core(path.mirrored(), EvalMode.exact())
            if ties or m_ties:
                continue
            n = path.node_count - 1
            mirrored = tuple(n - s for s in order.sequence)
            assert m_order.sequence == mirrored
            checked += 1
        assert checked >= 20  # ties should be rare on random instances


class TestBalancedTree:
    def test_five_node_path(self, example1_path):
        assert balanced_tree(example1_path).sequence == (1, 3, 2)

    def test_three_node_path(self):
        path = PathSpec.from_params([2, 2], [0.5, 0.5], [0.5])
        assert balanced_tree(path).sequence == (1,)

    def test_six_node_root_is_midpoint(self):
        path = PathSpec.from_params([3] * 5, [0.5] * 5, [0.5] * 4)
        order = balanced_tree(path)
        assert len(order) == 4
        assert order.sequence[-1] == 3  # ceil((0 + 5) / 2)

    def test_six_node_mirror_tree_equivalent_on_homogeneous(self):
        path = PathSpec.from_params([3] * 5, [0.5] * 5, [0.5] * 4)
        order = balanced_tree(path)
        mirrored = SwapOrder(tuple(5 - s for s in order.sequence))
        assert ent(path, order)[0] == pytest.approx(ent(path, mirrored)[0], abs=1e-12)

    def test_balanced_beats_sequential_on_homogeneous_pow2(self):
        rng = random.Random(63)
        for _ in range(50):
            links = rng.choice([2, 4, 8])
            cap = rng.randint(1, 12)
            p = rng.uniform(0.05, 0.95)
            q = rng.uniform(0.05, 0.95)
            path = PathSpec.from_params([cap] * links, [p] * links, [q] * (links - 1))
            bal, _ = ent(path, balanced_tree(path))
            seq, _ = ent(path, tuple(path.interior_nodes()))
            assert bal >= seq - 1e-12


class TestVoraSwap:
    def test_example2_balanced_wins(self, example2_path):
        result = vora_swap(example2_path)
        assert result.order.sequence == (1, 3, 2)
        assert result.score == pytest.approx(3.72, abs=0.005)

    def test_example1_greedy_wins(self, example1_path):
        result = vora_swap(example1_path)
        assert result.order.sequence == (3, 2, 1)
        assert result.score == pytest.approx(7.16, abs=0.005)

    def test_is_max_of_greedy_and_balanced(self):
        path = PathSpec.from_params([10] * 3, [0.3] * 3, [0.5] * 2)
        greedy = greedy_swap(path)
        bal_score, _ = ent(path, balanced_tree(path))
        assert vora_swap(path).score == max(greedy.score, bal_score)

    def test_dominance_chain(self):
        rng = random.Random(64)
        for _ in range(15):
            path = random_small_path(rng, max_links=6, max_cap=8)
            best = brute_force(path)
            vora = vora_swap(path)
            greedy = greedy_swap(path)
            bal_score, _ = ent(path, balanced_tree(path))
            assert best.score >= vora.score - 1e-12
            assert vora.score >= max(greedy.score, bal_score) - 1e-12
