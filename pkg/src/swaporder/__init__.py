"""Throughput evaluation, swap-order search, and memory allocation for
quantum repeater paths.

The slot model: each link of a path generates a binomial number of
elementary entanglements per time slot; interior nodes merge adjacent
segments by entanglement swapping, each swap surviving with its node's
success probability.  The library computes the expected end-to-end count
exactly or via fast approximations, searches swapping orders, allocates
per-link memory under node budgets, maps physical hardware parameters into
the model, and validates everything against a seeded Monte Carlo oracle.
"""

from . import errors
from .allocation import (
    Allocation,
    CapacityModel,
    MemoryBudget,
    enumerate_allocations,
    optimize_allocation,
)
from .distributions import (
    BinomialParams,
    NormalParams,
    Pmf,
    approx_tail,
    b2n,
    binomial_pmf,
    hoeffding_support,
    min_normal_moments,
    n2b,
    norm_cdf,
    norm_pdf,
)
from .documents import SCHEMA_VERSION, PathDocument, load_document, parse_document
from .estimator import (
    HardwareProfile,
    PhysicalLink,
    TimingParams,
    estimate_path_throughput,
    expected_wait_both,
    link_rates,
    select_time_slot,
)
from .montecarlo import SlotOutcome, simulate_asap, simulate_order
from .order_search import (
    ScoredOrder,
    SwapTree,
    balanced_tree,
    brute_force,
    count_trees,
    enumerate_trees,
    greedy_swap,
    scored_orders,
    vora_swap,
)
from .swap_engine import (
    EvalMode,
    LinkSpec,
    PathSpec,
    SwapOrder,
    ent,
    subpath_capacity,
    swap_exact,
    swap_normal,
)

__version__ = "0.1.0"


def clear_caches() -> None:
    """Drop all memoized tables (binomial pmfs and swap kernels)."""
    from . import distributions as _distributions
    from . import swap_engine as _swap_engine

    _distributions.clear_caches()
    _swap_engine.clear_caches()


__all__ = [
    "Allocation",
    "BinomialParams",
    "CapacityModel",
    "EvalMode",
    "HardwareProfile",
    "LinkSpec",
    "MemoryBudget",
    "NormalParams",
    "PathDocument",
    "PathSpec",
    "PhysicalLink",
    "Pmf",
    "SCHEMA_VERSION",
    "ScoredOrder",
    "SlotOutcome",
    "SwapOrder",
    "SwapTree",
    "TimingParams",
    "approx_tail",
    "b2n",
    "balanced_tree",
    "binomial_pmf",
    "brute_force",
    "clear_caches",
    "count_trees",
    "enumerate_allocations",
    "enumerate_trees",
    "ent",
    "errors",
    "estimate_path_throughput",
    "expected_wait_both",
    "greedy_swap",
    "hoeffding_support",
    "link_rates",
    "load_document",
    "min_normal_moments",
    "n2b",
    "norm_cdf",
    "norm_pdf",
    "optimize_allocation",
    "parse_document",
    "scored_orders",
    "select_time_slot",
    "simulate_asap",
    "simulate_order",
    "subpath_capacity",
    "swap_exact",
    "swap_normal",
    "vora_swap",
]
