"""Per-link memory allocation under node budgets.

Each node holds a limited number of quantum memories; adjacent nodes must
commit matching memory pairs to their shared link, and a node's two links
cannot together use more than its budget.  Throughput is monotone in link
capacity, so an optimal allocation is a maximal one (no single link's share
can grow); we enumerate exactly those and score each with the order search.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import Infeasible
from .order_search import ScoredOrder, brute_force, count_trees, vora_swap
from .swap_engine import EvalMode, PathSpec, SwapOrder, ent

__all__ = [
    "MemoryBudget",
    "Allocation",
    "CapacityModel",
    "enumerate_allocations",
    "optimize_allocation",
]


@dataclass(frozen=True)
class MemoryBudget:
    """Memory count available at each node of the path (n+1 entries)."""

    per_node: tuple[int, ...]

    def __post_init__(self) -> None:
        per_node = tuple(int(q) for q in self.per_node)
        if len(per_node) < 2:
            raise ValueError("budget needs at least two nodes")
        if any(q < 1 for q in per_node):
            raise ValueError("every node budget must be >= 1")
        object.__setattr__(self, "per_node", per_node)

    @property
    def link_count(self) -> int:
        return len(self.per_node) - 1


@dataclass(frozen=True)
class Allocation:
    """Memory pairs committed to each link (n entries, all >= 1)."""

    per_link: tuple[int, ...]

    def __post_init__(self) -> None:
        per_link = tuple(int(m) for m in self.per_link)
        if len(per_link) < 1:
            raise ValueError("allocation needs at least one link")
        if any(m < 1 for m in per_link):
            raise ValueError("every link must get at least one memory pair")
        object.__setattr__(self, "per_link", per_link)

    def satisfies(self, budget: MemoryBudget) -> bool:
        m, q = self.per_link, budget.per_node
        if len(m) != budget.link_count:
            return False
        if m[0] > q[0] or m[-1] > q[-1]:
            return False
        return all(m[i - 1] + m[i] <= q[i] for i in range(1, len(m)))


@dataclass(frozen=True)
class CapacityModel:
    """Linear capacity-per-memory-pair model: c_i = round(kappa_i * m_i), floor 1.

    The floor keeps every link usable; a zero-capacity link would disconnect
    the path.  Subclass and override `capacity` for nonlinear hardware.
    """

    kappa_per_link: tuple[float, ...]

    def __post_init__(self) -> None:
        kappas = tuple(float(k) for k in self.kappa_per_link)
        if any(k <= 0.0 for k in kappas):
            raise ValueError("every kappa must be > 0")
        object.__setattr__(self, "kappa_per_link", kappas)

    def capacity(self, link: int, pairs: int) -> int:
        return max(1, round(self.kappa_per_link[link] * pairs))


def _check_feasible(budget: MemoryBudget) -> None:
    q = budget.per_node
    if budget.link_count >= 2 and any(qi < 2 for qi in q[1:-1]):
        raise Infeasible("an interior node cannot serve both of its links")


def _upper_bound(budget: MemoryBudget, link: int, prev_pairs: int) -> int:
    """Largest m for `link` given the pairs already placed on its left."""
    q = budget.per_node
    n = budget.link_count
    hi = q[link] if link == 0 else q[link] - prev_pairs
    if link == n - 1:
        hi = min(hi, q[link + 1])
    else:
        hi = min(hi, q[link + 1] - 1)  # the next link still needs one pair
    return hi


def _is_maximal(pairs: tuple[int, ...], budget: MemoryBudget) -> bool:
    q = budget.per_node
    n = len(pairs)
    for i in range(n):
        left_blocked = (pairs[i] + 1 > q[0]) if i == 0 else (pairs[i - 1] + pairs[i] + 1 > q[i])
        right_blocked = (
            (pairs[i] + 1 > q[n]) if i == n - 1 else (pairs[i] + 1 + pairs[i + 1] > q[i + 1])
        )
        if not (left_blocked or right_blocked):
            return False
    return True


def enumerate_allocations(budget: MemoryBudget) -> Iterator[Allocation]:
    """Yield every maximal allocation, in lexicographic order.

    Maximal means no single link's pair count can be incremented without
    violating a node budget.  Raises Infeasible when some interior node
    cannot give both adjacent links at least one pair.
    """
    _check_feasible(budget)
    n = budget.link_count

    def extend(prefix: list[int]) -> Iterator[tuple[int, ...]]:
        link = len(prefix)
        if link == n:
            yield tuple(prefix)
            return
        prev = prefix[-1] if prefix else 0
        hi = _upper_bound(budget, link, prev)
        if hi < 1:
            return
        for m in range(1, hi + 1):
            prefix.append(m)
            yield from extend(prefix)
            prefix.pop()

    for pairs in extend([]):
        if _is_maximal(pairs, budget):
            yield Allocation(pairs)


def _balanced_start(budget: MemoryBudget) -> Allocation:
    """Round-robin growth from all-ones until maximal; the fallback seed."""
    _check_feasible(budget)
    pairs = [1] * budget.link_count
    grew = True
    while grew:
        grew = False
        for i in sorted(range(len(pairs)), key=lambda i: (pairs[i], i)):
            bumped = list(pairs)
            bumped[i] += 1
            if Allocation(tuple(bumped)).satisfies(budget):
                pairs = bumped
                grew = True
                break
    return Allocation(tuple(pairs))


def score_allocation(
    alloc: Allocation,
    model: CapacityModel,
    link_probs: Sequence[float],
    swap_probs: Sequence[float],
    mode: EvalMode,
    tree_cap: int,
) -> ScoredOrder:
    caps = [model.capacity(i, m) for i, m in enumerate(alloc.per_link)]
    path = PathSpec.from_params(caps, link_probs, swap_probs)
    if path.link_count == 1:
        score, _ = ent(path, SwapOrder(()), mode)
        return ScoredOrder(SwapOrder(()), score)
    if count_trees(path.link_count) <= tree_cap:
        return brute_force(path, mode)
    return vora_swap(path, mode)


def optimize_allocation(
    budget: MemoryBudget,
    model: CapacityModel,
    link_probs: Sequence[float],
    swap_probs: Sequence[float],
    mode: EvalMode = EvalMode.exact(),
    allocation_cap: int = 10**5,
    tree_cap: int = 1000,
) -> tuple[Allocation, ScoredOrder]:
    """Joint best (memory allocation, swapping order) under the budget.

    Scores every maximal allocation with brute-force order search (when the
    tree count is within `tree_cap`) or vora_swap otherwise, and returns the
    argmax; ties break to the lexicographically smallest allocation.  When
    the number of maximal allocations exceeds `allocation_cap`, a
    coordinate-ascent local search from the balanced allocation is used
    instead and a RuntimeWarning flags the result as heuristic.
    """
    if len(link_probs) != budget.link_count:
        raise ValueError("need one link probability per link")
    if len(swap_probs) != budget.link_count - 1:
        raise ValueError("need one swap probability per interior node")

    candidates = []
    for alloc in enumerate_allocations(budget):
        candidates.append(alloc)
        if len(candidates) > allocation_cap:
            warnings.warn(
                f"more than {allocation_cap} maximal allocations; "
                "falling back to coordinate-ascent local search (heuristic result)",
                RuntimeWarning,
                stacklevel=2,
            )
            return _local_search(budget, model, link_probs, swap_probs, mode, tree_cap)

    best: tuple[Allocation, ScoredOrder] | None = None
    for alloc in candidates:
        scored = score_allocation(alloc, model, link_probs, swap_probs, mode, tree_cap)
        if (
            best is None
            or scored.score > best[1].score
            or (scored.score == best[1].score and alloc.per_link < best[0].per_link)
        ):
            best = (alloc, scored)
    return best


def _local_search(
    budget: MemoryBudget,
    model: CapacityModel,
    link_probs: Sequence[float],
    swap_probs: Sequence[float],
    mode: EvalMode,
    tree_cap: int,
) -> tuple[Allocation, ScoredOrder]:
    current = _balanced_start(budget)
    current_scored = score_allocation(current, model, link_probs, swap_probs, mode, tree_cap)
    improved = True
    while improved:
        improved = False
        pairs = current.per_link
        for i in range(len(pairs)):
            for j in range(len(pairs)):
                if i == j or pairs[i] <= 1:
                    continue
                moved = list(pairs)
                moved[i] -= 1
                moved[j] += 1
                cand = Allocation(tuple(moved))
                if not cand.satisfies(budget):
                    continue
                scored = score_allocation(cand, model, link_probs, swap_probs, mode, tree_cap)
                if scored.score > current_scored.score:
                    current, current_scored = cand, scored
                    improved = True
    return current, current_scored
