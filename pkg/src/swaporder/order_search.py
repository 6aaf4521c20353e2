"""Swap-order selection: exhaustive tree search and greedy heuristics.

Swapping orders on an n-link path correspond to full binary trees with the
links as leaves; there are Catalan(n-1) of them.  `brute_force` scores every
tree, `greedy_swap` repeatedly swaps the node with the highest swapping
score, and `vora_swap` takes the better of greedy and a balanced tree.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

from . import swap_engine
from .errors import BudgetExceeded
from .swap_engine import Distribution, EvalMode, PathSpec, SwapOrder

__all__ = [
    "SwapTree",
    "ScoredOrder",
    "catalan",
    "count_trees",
    "enumerate_trees",
    "scored_orders",
    "brute_force",
    "greedy_swap",
    "balanced_tree",
    "vora_swap",
]


@dataclass(frozen=True)
class ScoredOrder:
    """A swapping order together with its expected end-to-end count."""

    order: SwapOrder
    score: float


@dataclass(frozen=True)
class SwapTree:
    """Full binary swap tree: leaves are links, internal vertices swap nodes.

    `node` is the interior node merging the two child segments (None for a
    leaf); `link` is the link index (None for an internal vertex).
    """

    node: Optional[int] = None
    link: Optional[int] = None
    left: Optional["SwapTree"] = None
    right: Optional["SwapTree"] = None

    @classmethod
    def leaf(cls, link: int) -> "SwapTree":
        return cls(link=link)

    @classmethod
    def merge(cls, node: int, left: "SwapTree", right: "SwapTree") -> "SwapTree":
        return cls(node=node, left=left, right=right)

    @property
    def is_leaf(self) -> bool:
        return self.node is None

    def canonical_order(self) -> SwapOrder:
        """Post-order traversal of the internal vertices (children first)."""
        out: list[int] = []
        self._post_order(out)
        return SwapOrder(tuple(out))

    def _post_order(self, out: list[int]) -> None:
        if self.is_leaf:
            return
        self.left._post_order(out)
        self.right._post_order(out)
        out.append(self.node)

    def leaves(self) -> list[int]:
        if self.is_leaf:
            return [self.link]
        return self.left.leaves() + self.right.leaves()


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def count_trees(link_count: int) -> int:
    """Number of distinct swap trees on a path with `link_count` links."""
    if link_count < 1:
        raise ValueError("link_count must be >= 1")
    return catalan(link_count - 1)


def _trees(lo: int, hi: int) -> Iterator[SwapTree]:
    if hi - lo == 1:
        yield SwapTree.leaf(lo)
        return
    for split in range(lo + 1, hi):
        for left in _trees(lo, split):
            for right in _trees(split, hi):
                yield SwapTree.merge(split, left, right)


def enumerate_trees(link_count: int) -> Iterator[SwapTree]:
    """Yield every swap tree over links 0..link_count-1, Catalan-many in total."""
    if link_count < 1:
        raise ValueError("link_count must be >= 1")
    yield from _trees(0, link_count)


def scored_orders(path: PathSpec, mode: EvalMode = EvalMode.exact()) -> Iterator[ScoredOrder]:
    """Score the canonical order of every swap tree of the path."""
    for tree in enumerate_trees(path.link_count):
        order = tree.canonical_order()
        score, _ = swap_engine.ent(path, order, mode)
        yield ScoredOrder(order, score)


def brute_force(
    path: PathSpec,
    mode: EvalMode = EvalMode.exact(),
    tree_budget: int = 10**6,
    jobs: int = 1,
) -> ScoredOrder:
    """Best canonical order over all swap trees.

    Raises BudgetExceeded when the Catalan count is above `tree_budget`.
    Ties break to the lexicographically smallest order, independent of
    `jobs` (evaluations may fan out, the reduction is sequential).
    """
    total = count_trees(path.link_count)
    if total > tree_budget:
        raise BudgetExceeded(f"{total} trees exceed budget {tree_budget}")

    if jobs > 1:
        orders = [tree.canonical_order() for tree in enumerate_trees(path.link_count)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(lambda o: swap_engine.ent(path, o, mode)[0], orders))
        candidates = (ScoredOrder(o, s) for o, s in zip(orders, scores))
    else:
        candidates = scored_orders(path, mode)

    best: ScoredOrder | None = None
    for cand in candidates:
        if (
            best is None
            or cand.score > best.score
            or (cand.score == best.score and cand.order.sequence < best.order.sequence)
        ):
            best = cand
    return best


def _greedy_core(path: PathSpec, mode: EvalMode) -> tuple[SwapOrder, float, bool]:
    """Greedy highest-score-first selection; also reports whether any argmax tied."""
    n = path.link_count
    dist = {x: swap_engine._init_dist(path.links[x], mode) for x in range(n)}
    succ = {x: x + 1 for x in range(n)}
    pred = {x + 1: x for x in range(n)}

    score: dict[int, float] = {}
    pending: dict[int, Distribution] = {}

    def rescore(node: int) -> None:
        s, out = swap_engine._swap_pair(
            dist[pred[node]], dist[node], path.swap_probs[node - 1], mode
        )
        score[node] = s
        pending[node] = out

    active = list(path.interior_nodes())
    if not active:
        raise ValueError("greedy needs at least one interior node")
    for x in active:
        rescore(x)

    order: list[int] = []
    ties_seen = False
    last_score = 0.0
    remaining = set(active)
    while remaining:
        best = max(remaining, key=lambda x: (score[x], -x))
        if sum(1 for x in remaining if score[x] == score[best]) > 1:
            ties_seen = True
        order.append(best)
        last_score = score[best]

        left_node, right_node = pred[best], succ[best]
        dist[left_node] = pending.pop(best)
        del dist[best], score[best]
        remaining.discard(best)
        succ[left_node] = right_node
        pred[right_node] = left_node

        if left_node > 0:
            rescore(left_node)
        if right_node < n:
            rescore(right_node)

    return SwapOrder(tuple(order)), last_score, ties_seen


def greedy_swap(path: PathSpec, mode: EvalMode = EvalMode.exact()) -> ScoredOrder:
    """Repeatedly swap the node with the highest swapping score.

    At each step the candidate score of a node is the expected count its
    swap would produce on the current segments; after a swap only the
    order-neighbors of the removed node are rescored, so the whole search
    costs at most 3(n-1) swap evaluations.  Argmax ties break to the
    smallest node id.
    """
    order, score, _ = _greedy_core(path, mode)
    return ScoredOrder(order, score)


def balanced_tree(path: PathSpec) -> SwapOrder:
    """Midpoint-splitting (doubling) order: merge halves level by level."""
    if path.node_count < 3:
        raise ValueError("balanced tree needs at least one interior node")
    out: list[int] = []

    def emit(lo: int, hi: int) -> None:
        if hi - lo < 2:
            return
        mid = (lo + hi + 1) // 2
        emit(lo, mid)
        emit(mid, hi)
        out.append(mid)

    emit(0, path.node_count - 1)
    return SwapOrder(tuple(out))


def vora_swap(path: PathSpec, mode: EvalMode = EvalMode.exact()) -> ScoredOrder:
    """Better of greedy selection and the balanced tree (ties favor balanced)."""
    greedy = greedy_swap(path, mode)
    bal_order = balanced_tree(path)
    bal_score, _ = swap_engine.ent(path, bal_order, mode)
    if greedy.score > bal_score:
        return greedy
    return ScoredOrder(bal_order, bal_score)
