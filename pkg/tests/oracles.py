"""Independent slow-path oracles and generators shared by the test modules.

The throughput oracle enumerates every joint link outcome and folds the
swap cascade with plain-dict distributions built from the conditional
binomial rule, deliberately avoiding the engine's vectorized
min-factorization.  Everything here is pure Python + math.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache

from swaporder import PathSpec, SwapOrder


@lru_cache(maxsize=None)
def _binom_row(m: int, q: float) -> tuple[float, ...]:
    return tuple(
        math.comb(m, k) * q**k * (1.0 - q) ** (m - k) for k in range(m + 1)
    )


def _fold_counts(counts: tuple[int, ...], swap_probs, order) -> float:
    """E[end-to-end count | initial link counts], via dict distributions."""
    n = len(counts)
    seg = {i: {counts[i]: 1.0} for i in range(n)}
    succ = {i: i + 1 for i in range(n)}
    pred = {i + 1: i for i in range(n)}
    for s in order:
        left_node, right_node = pred[s], succ[s]
        q = swap_probs[s - 1]
        merged: dict[int, float] = {}
        for lv, lp in seg[left_node].items():
            for rv, rp in seg[s].items():
                row = _binom_row(min(lv, rv), q)
                weight = lp * rp
                for k, pk in enumerate(row):
                    merged[k] = merged.get(k, 0.0) + weight * pk
        seg[left_node] = merged
        del seg[s]
        succ[left_node] = right_node
        pred[right_node] = left_node
    return sum(k * p for k, p in seg[0].items())


def oracle_ent(path: PathSpec, order) -> float:
    """Expected end-to-end count by full joint-state enumeration.

    Only practical for capacities <= ~6 and a handful of links.
    """
    seq = order.sequence if isinstance(order, SwapOrder) else tuple(order)
    caps = [link.capacity for link in path.links]
    ps = [link.success for link in path.links]

    def scan(i: int, counts: list[int], prob: float) -> float:
        if prob == 0.0:
            return 0.0
        if i == len(caps):
            return prob * _fold_counts(tuple(counts), path.swap_probs, seq)
        total = 0.0
        for k in range(caps[i] + 1):
            pk = math.comb(caps[i], k) * ps[i] ** k * (1.0 - ps[i]) ** (caps[i] - k)
            counts.append(k)
            total += scan(i + 1, counts, prob * pk)
            counts.pop()
        return total

    return scan(0, [], 1.0)


def swap_oracle(left_probs, right_probs, q: float) -> list[float]:
    """Literal triple-sum swap outcome, down to the conditional rule."""
    c1, c2 = len(left_probs) - 1, len(right_probs) - 1
    support = min(c1, c2)
    out = [0.0] * (support + 1)
    for k in range(1, support + 1):
        acc = 0.0
        for i in range(k, c1 + 1):
            inner = 0.0
            for j in range(k, c2 + 1):
                m = min(i, j)
                inner += right_probs[j] * math.comb(m, k) * q**k * (1.0 - q) ** (m - k)
            acc += left_probs[i] * inner
        out[k] = acc
    out[0] = 1.0 - sum(out[1:])
    return out


def random_small_path(
    rng: random.Random,
    min_links: int = 2,
    max_links: int = 5,
    max_cap: int = 6,
) -> PathSpec:
    """A path small enough for the joint-state oracle."""
    n = rng.randint(min_links, max_links)
    caps = [rng.randint(1, max_cap) for _ in range(n)]
    ps = [rng.uniform(0.05, 0.95) for _ in range(n)]
    qs = [rng.uniform(0.05, 0.95) for _ in range(n - 1)]
    return PathSpec.from_params(caps, ps, qs)


def random_order(rng: random.Random, path: PathSpec) -> SwapOrder:
    nodes = list(path.interior_nodes())
    rng.shuffle(nodes)
    return SwapOrder(tuple(nodes))
