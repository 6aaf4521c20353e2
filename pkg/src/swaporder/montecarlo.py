"""Seeded slot-model Monte Carlo oracle.

Samples per-link entanglement counts and swap outcomes for a path and
reports empirical throughput statistics.  Trials are processed in
fixed-size blocks, each driven by its own counter-based Philox stream keyed
by (seed, block index), so results are bit-identical for a given seed
regardless of how many workers execute the blocks.  Counts are accumulated
as exact integers before the final mean/variance, which also keeps the
reduction order irrelevant.

Binomial variates come from numpy's Generator.binomial (inversion for small
parameters, exact BTPE rejection for large ones); the sampler is exact in
distribution, never a normal shortcut.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import sqrt
from typing import Iterable, Sequence

import numpy as np

from .swap_engine import PathSpec, SwapOrder, _coerce_order

__all__ = ["SlotOutcome", "simulate_order", "simulate_asap"]

# Fixed block size: part of the stream contract.  Changing it changes which
# Philox stream serves a given trial, i.e. the sampled values for a seed.
_BLOCK = 4096
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SlotOutcome:
    """Empirical end-to-end count statistics over `trials` slots."""

    mean: float
    variance: float
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.variance < 0.0:
            raise ValueError("variance must be >= 0")

    @property
    def std_error(self) -> float:
        return sqrt(self.variance / self.trials)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _fold(
    rng: np.random.Generator,
    counts: np.ndarray,
    order_seq: Iterable[int],
    swap_probs: Sequence[float],
) -> np.ndarray:
    """Apply swaps to a (rows, links) count matrix; returns end-to-end counts."""
    n = counts.shape[1]
    seg = {x: counts[:, x] for x in range(n)}
    succ = {x: x + 1 for x in range(n)}
    pred = {x + 1: x for x in range(n)}
    for s in order_seq:
        left_node, right_node = pred[s], succ[s]
        survivors = np.minimum(seg[left_node], seg[s])
        seg[left_node] = rng.binomial(survivors, swap_probs[s - 1])
        del seg[s]
        succ[left_node] = right_node
        pred[right_node] = left_node
    return seg[0]


def _sim_block(
    path: PathSpec,
    order_seq: tuple[int, ...] | None,
    seed: int,
    block: int,
    used_rows: int,
) -> tuple[int, int]:
    """One full block of trials; returns exact (sum, sum of squares).

    Full blocks are always drawn (and sliced to `used_rows`) so a trial's
    draws depend only on the seed and its index, not on the trial total.
    """
    rng = _block_rng(seed, block)
    caps = np.array([link.capacity for link in path.links])
    probs = np.array([link.success for link in path.links])
    counts = rng.binomial(caps, probs, size=(_BLOCK, path.link_count))

    interior = tuple(path.interior_nodes())
    if order_seq is None and len(interior) > 1:
        tiles = np.tile(np.array(interior), (_BLOCK, 1))
        perms = rng.permuted(tiles, axis=1)
        uniq, inverse = np.unique(perms, axis=0, return_inverse=True)
        inverse = np.asarray(inverse).ravel()
        e2e = np.empty(_BLOCK, dtype=np.int64)
        for idx in range(uniq.shape[0]):
            rows = np.nonzero(inverse == idx)[0]
            e2e[rows] = _fold(rng, counts[rows], uniq[idx].tolist(), path.swap_probs)
    else:
        seq = order_seq if order_seq is not None else interior
        e2e = _fold(rng, counts, seq, path.swap_probs)

    used = e2e[:used_rows].astype(np.int64)
    return int(used.sum()), int((used * used).sum())


def _run(
    path: PathSpec,
    order_seq: tuple[int, ...] | None,
    trials: int,
    seed: int,
    jobs: int,
) -> SlotOutcome:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_blocks = (trials + _BLOCK - 1) // _BLOCK

    def one(block: int) -> tuple[int, int]:
        used = min(_BLOCK, trials - block * _BLOCK)
        return _sim_block(path, order_seq, seed, block, used)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(one, range(n_blocks)))
    else:
        parts = [one(block) for block in range(n_blocks)]

    total = sum(s for s, _ in parts)
    total_sq = sum(ss for _, ss in parts)
    mean = total / trials
    if trials > 1:
        variance = max((total_sq - total * total / trials) / (trials - 1), 0.0)
    else:
        variance = 0.0
    return SlotOutcome(mean, variance, trials, seed)


def simulate_order(
    path: PathSpec,
    order: SwapOrder | Iterable[int],
    trials: int,
    seed: int,
    jobs: int = 1,
) -> SlotOutcome:
    """Sample the end-to-end count of a fixed swapping order.

    Per trial: draw each link's count from its binomial, then apply the
    swaps in `order`, each surviving Binomial(min(left, right), q).
    """
    order = _coerce_order(order)
    order.validate_for(path)
    return _run(path, order.sequence, trials, seed, jobs)


def simulate_asap(path: PathSpec, trials: int, seed: int, jobs: int = 1) -> SlotOutcome:
    """Sample a swap-as-soon-as-possible stand-in: a fresh uniformly random
    interleaving of the interior nodes per trial.

    The slot model has no arrival times, so random interleaving approximates
    the locally-driven policy; it is not a discrete-event replication.  With
    a single interior node this reduces exactly to simulate_order([1]).
    """
    return _run(path, None, trials, seed, jobs)
