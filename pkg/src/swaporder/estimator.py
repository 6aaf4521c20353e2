"""Physical-parameter front end: map hardware to the slot model.

Takes link lengths, memory counts, and hardware rates, picks a time slot
compatible with the memory coherence time, converts per-second rates to
per-slot capacities, and reports throughput in entanglements per second.
Measured attempt/success rates, when available, always take precedence over
the formula-based estimates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import SlotNonpositive
from .order_search import vora_swap
from .swap_engine import EvalMode, PathSpec, SwapOrder

__all__ = [
    "PhysicalLink",
    "HardwareProfile",
    "TimingParams",
    "link_rates",
    "expected_wait_both",
    "select_time_slot",
    "estimate_path_throughput",
]

LOW_CAPACITY_WARNING = 5


@dataclass(frozen=True)
class PhysicalLink:
    """A fiber link: length, committed memory pairs, optional measured rates."""

    length_km: float
    memory_pairs: int = 1
    attempt_rate_per_s: float | None = None
    success_per_attempt: float | None = None

    def __post_init__(self) -> None:
        if self.length_km <= 0.0:
            raise ValueError("length_km must be > 0")
        if self.memory_pairs < 1:
            raise ValueError("memory_pairs must be >= 1")
        if self.attempt_rate_per_s is not None and self.attempt_rate_per_s <= 0.0:
            raise ValueError("attempt_rate_per_s must be > 0 when given")
        if self.success_per_attempt is not None and not 0.0 < self.success_per_attempt <= 1.0:
            raise ValueError("success_per_attempt must lie in (0, 1] when given")


@dataclass(frozen=True)
class HardwareProfile:
    """Fiber and device constants.

    `attempt_latency_factor` is the number of link round trips one heralded
    generation attempt costs (3 or 4 for two-photon protocols; 3.5 splits
    the difference).  `protocol_prefactor` absorbs the heralding scheme's
    intrinsic success ceiling.  Measured link rates bypass all of these.
    """

    attenuation_db_per_km: float = 0.2
    light_speed_km_per_s: float = 2e5
    detector_efficiency: float = 0.95
    memory_efficiency: float = 0.95
    attempt_latency_factor: float = 3.5
    protocol_prefactor: float = 0.5

    def __post_init__(self) -> None:
        for name in (
            "attenuation_db_per_km",
            "light_speed_km_per_s",
            "detector_efficiency",
            "memory_efficiency",
            "attempt_latency_factor",
            "protocol_prefactor",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.detector_efficiency > 1.0 or self.memory_efficiency > 1.0:
            raise ValueError("efficiencies must be <= 1")


@dataclass(frozen=True)
class TimingParams:
    """Coherence time and signaling delays, all in seconds."""

    coherence_time_s: float
    herald_delay_s: float = 0.0
    app_delay_s: float = 0.0

    def __post_init__(self) -> None:
        if self.coherence_time_s < 0 or self.herald_delay_s < 0 or self.app_delay_s < 0:
            raise ValueError("timing values must be >= 0")
        if self.coherence_time_s <= self.herald_delay_s + self.app_delay_s:
            raise ValueError("coherence time must exceed the signaling delays")

    @property
    def cutoff_s(self) -> float:
        return self.coherence_time_s - self.herald_delay_s - self.app_delay_s


def link_rates(link: PhysicalLink, hw: HardwareProfile) -> tuple[float, float]:
    """(attempts per second, success per attempt) for one link.

    Measured values pass through untouched.  Otherwise the attempt rate is
    memory_pairs * c0 / (latency_factor * length) and the success
    probability combines the protocol prefactor, detector and memory
    efficiencies (squared: both photons must survive), and fiber loss
    10^(-attenuation * length / 10).
    """
    attempts = link.attempt_rate_per_s
    if attempts is None:
        attempts = (
            link.memory_pairs
            * hw.light_speed_km_per_s
            / (hw.attempt_latency_factor * link.length_km)
        )
    success = link.success_per_attempt
    if success is None:
        loss = 10.0 ** (-hw.attenuation_db_per_km * link.length_km / 10.0)
        success = (
            hw.protocol_prefactor
            * (hw.detector_efficiency * hw.memory_efficiency) ** 2
            * loss
        )
    return attempts, success


def expected_wait_both(rate1: float, rate2: float) -> float:
    """Expected time until both of two exponential clocks have fired.

    E[max(T1, T2)] = 1/r1 + 1/r2 - 1/(r1 + r2).
    """
    if rate1 <= 0.0 or rate2 <= 0.0:
        raise ValueError("rates must be > 0")
    return 1.0 / rate1 + 1.0 / rate2 - 1.0 / (rate1 + rate2)


def select_time_slot(rates: tuple[float, float], timing: TimingParams) -> float:
    """Slot duration for a two-link path: min(expected joint wait, cutoff)."""
    return min(expected_wait_both(*rates), timing.cutoff_s)


def estimate_path_throughput(
    links: Sequence[PhysicalLink],
    swap_probs: Sequence[float],
    hw: HardwareProfile,
    timing: TimingParams,
    mode: EvalMode = EvalMode.exact(),
) -> tuple[float, float, PathSpec, SwapOrder]:
    """End-to-end throughput estimate in entanglements per second.

    For two links the slot is min(expected joint wait, coherence cutoff);
    for longer paths it is coherence time minus the end-to-end round trip
    time (raises SlotNonpositive when the path is too long for the
    coherence time).  Per-slot capacities are round(rate * slot), floored
    at 1, and the swapping order comes from vora_swap.

    Returns (entanglements per second, slot seconds, the slot-model path,
    the chosen order).  A single link degenerates to its raw entanglement
    rate.
    """
    if len(links) < 1:
        raise ValueError("need at least one link")
    if len(swap_probs) != len(links) - 1:
        raise ValueError("need one swap probability per interior node")

    rates = [link_rates(link, hw) for link in links]
    ent_rates = [a * r for a, r in rates]

    if len(links) == 1:
        slot = timing.cutoff_s
        path = _slot_path(rates, [], slot)
        return ent_rates[0], slot, path, SwapOrder(())

    if len(links) == 2:
        slot = select_time_slot((ent_rates[0], ent_rates[1]), timing)
    else:
        total_length = sum(link.length_km for link in links)
        rtt = 2.0 * total_length / hw.light_speed_km_per_s
        slot = timing.coherence_time_s - rtt
    if slot <= 0.0:
        raise SlotNonpositive(
            f"slot {slot:.3g}s is not positive; coherence time too small for the path"
        )

    path = _slot_path(rates, swap_probs, slot)
    best = vora_swap(path, mode)
    per_second = best.score / (slot + timing.herald_delay_s + timing.app_delay_s)
    return per_second, slot, path, best.order


def _slot_path(
    rates: Sequence[tuple[float, float]],
    swap_probs: Sequence[float],
    slot: float,
) -> PathSpec:
    caps = [max(1, round(a * slot)) for a, _ in rates]
    small = [i for i, c in enumerate(caps) if c <= LOW_CAPACITY_WARNING]
    if small:
        warnings.warn(
            f"rounded capacity <= {LOW_CAPACITY_WARNING} on links {small}; "
            "slot-model rounding error may be non-negligible",
            RuntimeWarning,
            stacklevel=3,
        )
    return PathSpec.from_params(caps, [r for _, r in rates], swap_probs)
