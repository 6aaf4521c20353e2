"""Path model and swap-cascade evaluation.

A repeater path is a chain of links, each generating a binomial number of
elementary entanglements per time slot, plus per-node swap success
probabilities.  `ent` folds the links through a sequence of swaps (the
swapping order) and returns the expected end-to-end entanglement count for
that slot, together with the final count distribution.

Four evaluation modes are supported:

* ``exact``      - full pmf arithmetic
* ``tail(eps)``  - pmf arithmetic on epsilon-truncated tails
* ``normal``     - constant-time Gaussian surrogates (moment matching)
* ``hybrid(eps)``- Gaussian surrogates, reverting to truncated pmfs for any
  swap whose operands violate the 3-standard-deviation condition

All functions are pure; path objects and distributions are immutable, so
evaluations over distinct orders may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .distributions import (
    BinomialParams,
    NormalParams,
    Pmf,
    approx_tail,
    b2n,
    binomial_pmf,
    min_normal_moments,
    n2b,
)
from .errors import DegenerateTheta, InvalidMoments, InvalidOrder

__all__ = [
    "LinkSpec",
    "PathSpec",
    "SwapOrder",
    "EvalMode",
    "swap_exact",
    "swap_normal",
    "ent",
    "subpath_capacity",
]

Distribution = Union[Pmf, NormalParams]


@dataclass(frozen=True)
class LinkSpec:
    """One link: max entanglement attempts per slot and per-attempt success."""

    capacity: int
    success: float

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if not 0.0 <= self.success <= 1.0:
            raise ValueError("success must lie in [0, 1]")


@dataclass(frozen=True)
class PathSpec:
    """A repeater path: n links between nodes 0..n, swap probabilities at 1..n-1."""

    links: tuple[LinkSpec, ...]
    swap_probs: tuple[float, ...]

    def __post_init__(self) -> None:
        links = tuple(self.links)
        probs = tuple(float(q) for q in self.swap_probs)
        if len(links) < 1:
            raise ValueError("a path needs at least one link")
        if len(probs) != len(links) - 1:
            raise ValueError("need exactly one swap probability per interior node")
        if any(not 0.0 <= q <= 1.0 for q in probs):
            raise ValueError("swap probabilities must lie in [0, 1]")
        object.__setattr__(self, "links", links)
        object.__setattr__(self, "swap_probs", probs)

    @classmethod
    def from_params(
        cls,
        capacities: Sequence[int],
        successes: Sequence[float],
        swap_probs: Sequence[float],
    ) -> "PathSpec":
        if len(capacities) != len(successes):
            raise ValueError("capacities and successes must have equal length")
        links = tuple(LinkSpec(int(c), float(p)) for c, p in zip(capacities, successes))
        return cls(links, tuple(swap_probs))

    @property
    def node_count(self) -> int:
        return len(self.links) + 1

    @property
    def link_count(self) -> int:
        return len(self.links)

    def interior_nodes(self) -> range:
        return range(1, self.node_count - 1)

    def width(self) -> int:
        """Minimum link capacity; upper bound on the end-to-end count."""
        return min(link.capacity for link in self.links)

    def mirrored(self) -> "PathSpec":
        """The same path traversed right to left."""
        return PathSpec(tuple(reversed(self.links)), tuple(reversed(self.swap_probs)))


@dataclass(frozen=True)
class SwapOrder:
    """Sequence of interior node ids; a full swap schedule for a path."""

    sequence: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sequence", tuple(int(s) for s in self.sequence))

    def __iter__(self):
        return iter(self.sequence)

    def __len__(self) -> int:
        return len(self.sequence)

    def validate_for(self, path: PathSpec) -> None:
        if sorted(self.sequence) != list(path.interior_nodes()):
            raise InvalidOrder(
                f"order {list(self.sequence)} is not a permutation of interior "
                f"nodes {list(path.interior_nodes())}"
            )


def _coerce_order(order: SwapOrder | Iterable[int]) -> SwapOrder:
    return order if isinstance(order, SwapOrder) else SwapOrder(tuple(order))


_MODE_KINDS = ("exact", "tail", "normal", "hybrid")


@dataclass(frozen=True)
class EvalMode:
    """Evaluation mode selector; `epsilon` applies to tail and hybrid."""

    kind: str
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _MODE_KINDS:
            raise ValueError(f"kind must be one of {_MODE_KINDS}")
        if self.kind in ("tail", "hybrid"):
            if self.epsilon is None or not 0.0 < self.epsilon < 1.0:
                raise ValueError(f"{self.kind} mode needs epsilon in (0, 1)")
        elif self.epsilon is not None:
            raise ValueError(f"{self.kind} mode takes no epsilon")

    @classmethod
    def exact(cls) -> "EvalMode":
        return cls("exact")

    @classmethod
    def tail(cls, epsilon: float = 1e-5) -> "EvalMode":
        return cls("tail", epsilon)

    @classmethod
    def normal(cls) -> "EvalMode":
        return cls("normal")

    @classmethod
    def hybrid(cls, epsilon: float = 1e-5) -> "EvalMode":
        return cls("hybrid", epsilon)


# Thinning kernels above this support are rebuilt per call instead of cached
# (a cached 1024x1024 float64 kernel is 8 MB; larger ones would hoard memory).
_KERNEL_CACHE_LIMIT = 1024


def _build_thin_kernel(support: int, q: float) -> np.ndarray:
    """Lower-triangular matrix K[m, k] = C(m, k) q^k (1-q)^(m-k)."""
    kernel = np.zeros((support + 1, support + 1))
    kernel[0, 0] = 1.0
    comp = 1.0 - q
    for m in range(1, support + 1):
        prev = kernel[m - 1]
        kernel[m, 1 : m + 1] = comp * prev[1 : m + 1] + q * prev[0:m]
        kernel[m, 0] = comp * prev[0]
    kernel.flags.writeable = False
    return kernel


@lru_cache(maxsize=64)
def _thin_kernel_cached(support: int, q: float) -> np.ndarray:
    return _build_thin_kernel(support, q)


def _thin_kernel(support: int, q: float) -> np.ndarray:
    if support <= _KERNEL_CACHE_LIMIT:
        return _thin_kernel_cached(support, q)
    return _build_thin_kernel(support, q)


def swap_exact(left: Pmf, right: Pmf, q: float) -> tuple[float, Pmf]:
    """Exact outcome distribution of swapping two entanglement counts.

    Given independent counts L ~ left and R ~ right, the surviving count is
    Binomial(min(L, R), q).  Factoring through the distribution of the
    minimum makes this O(C^2) instead of the naive O(C^3) triple loop.

    Returns (expected count, outcome pmf); the outcome support equals
    min(left.support, right.support) and probs[0] is set to 1 minus the
    rest so the result sums to 1 exactly.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    a, b = left.probs, right.probs
    support = min(left.support, right.support)

    a_tail = np.zeros(a.size + 1)
    a_tail[:-1] = np.cumsum(a[::-1])[::-1]
    b_tail = np.zeros(b.size + 1)
    b_tail[:-1] = np.cumsum(b[::-1])[::-1]

    # P(min(L, R) = m) = P(L = m) P(R >= m) + P(R = m) P(L >= m + 1)
    m = support + 1
    w = a[:m] * b_tail[:m] + b[:m] * a_tail[1 : m + 1]

    out = w @ _thin_kernel(support, q)
    out = np.asarray(out).copy()
    out[0] = 1.0 - out[1:].sum()
    score = float(np.arange(1, m) @ out[1:])
    return score, Pmf(out)


def swap_normal(left: NormalParams, right: NormalParams, q: float) -> NormalParams:
    """Constant-time swap outcome on Gaussian surrogates.

    Takes the closed-form moments of min(L, R), moment-matches them back to
    a binomial (C, p), and thins the success probability by q.  Raises
    InvalidMoments or DegenerateTheta when moment matching fails; callers
    should fall back to exact or tail evaluation.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    min_params = min_normal_moments(left, right, rho=0.0)
    matched = n2b(min_params)
    return b2n(BinomialParams(matched.trials, q * matched.success))


def _three_sigma_ok(params: BinomialParams) -> bool:
    p = params.success
    if p <= 0.0 or p >= 1.0:
        return False
    return params.trials > 9.0 * max((1.0 - p) / p, p / (1.0 - p))


def _as_pmf(dist: Distribution, epsilon: float) -> Pmf:
    """Materialize a Gaussian surrogate as a truncated pmf (hybrid bridge)."""
    if isinstance(dist, Pmf):
        return dist
    if dist.mean <= 0.0:
        return Pmf.point_mass(0)
    return approx_tail(binomial_pmf(n2b(dist)), epsilon)


def _init_dist(link: LinkSpec, mode: EvalMode) -> Distribution:
    params = BinomialParams(link.capacity, link.success)
    if mode.kind == "exact":
        return binomial_pmf(params)
    if mode.kind == "tail":
        return approx_tail(binomial_pmf(params), mode.epsilon)
    if mode.kind == "normal":
        return b2n(params)
    if _three_sigma_ok(params):
        return b2n(params)
    return approx_tail(binomial_pmf(params), mode.epsilon)


def _swap_pair(
    left: Distribution, right: Distribution, q: float, mode: EvalMode
) -> tuple[float, Distribution]:
    if mode.kind == "exact":
        return swap_exact(left, right, q)
    if mode.kind == "tail":
        _, out = swap_exact(left, right, q)
        out = approx_tail(out, mode.epsilon)
        return out.mean(), out
    if mode.kind == "normal":
        result = swap_normal(left, right, q)
        return result.mean, result
    # hybrid: Gaussian fast path when both operands look binomial enough,
    # otherwise run this one swap through the truncated-pmf machinery
    if isinstance(left, NormalParams) and isinstance(right, NormalParams):
        try:
            if _three_sigma_ok(n2b(left)) and _three_sigma_ok(n2b(right)):
                result = swap_normal(left, right, q)
                return result.mean, result
        except (InvalidMoments, DegenerateTheta):
            pass
    left_pmf = _as_pmf(left, mode.epsilon)
    right_pmf = _as_pmf(right, mode.epsilon)
    _, out = swap_exact(left_pmf, right_pmf, q)
    out = approx_tail(out, mode.epsilon)
    return out.mean(), out


def _dist_mean(dist: Distribution) -> float:
    return dist.mean() if isinstance(dist, Pmf) else dist.mean


def ent(
    path: PathSpec,
    order: SwapOrder | Iterable[int],
    mode: EvalMode = EvalMode.exact(),
) -> tuple[float, Distribution]:
    """Expected end-to-end entanglements per slot for a swapping order.

    Folds the per-link distributions through the swaps in `order`,
    maintaining the surviving segments of the path; the score of the final
    swap is the path throughput.  Returns (score, final distribution).

    Raises InvalidOrder if `order` is not a permutation of the path's
    interior nodes.
    """
    order = _coerce_order(order)
    order.validate_for(path)

    n = path.link_count
    dist: dict[int, Distribution] = {
        x: _init_dist(path.links[x], mode) for x in range(n)
    }
    succ = {x: x + 1 for x in range(n)}
    pred = {x + 1: x for x in range(n)}

    score: float | None = None
    for s in order:
        left_node, right_node = pred[s], succ[s]
        score, merged = _swap_pair(
            dist[left_node], dist[s], path.swap_probs[s - 1], mode
        )
        dist[left_node] = merged
        del dist[s]
        succ[left_node] = right_node
        pred[right_node] = left_node

    final = dist[0]
    if score is None:  # single-link path: no swaps to do
        score = _dist_mean(final)
    return score, final


def subpath_capacity(path: PathSpec, x: int, y: int) -> int:
    """Minimum link capacity strictly between nodes x and y."""
    if not 0 <= x < y <= path.node_count - 1:
        raise ValueError("need 0 <= x < y <= n")
    return min(link.capacity for link in path.links[x:y])


def clear_caches() -> None:
    """Drop memoized swap kernels."""
    _thin_kernel_cached.cache_clear()
