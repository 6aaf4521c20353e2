"""JSON path documents: the CLI's file format.

A document is UTF-8 JSON with a versioned ``"schema": 1`` field and either a
logical path (per-link capacity and success probability) or a physical one
(lengths, memory pairs, optional measured rates, hardware and timing
blocks).  Optional ``budget`` and ``kappa_per_link`` fields feed the memory
allocator.  Documents written back out re-parse to identical values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .allocation import MemoryBudget
from .errors import SchemaError
from .estimator import HardwareProfile, PhysicalLink, TimingParams
from .swap_engine import PathSpec

__all__ = ["SCHEMA_VERSION", "PathDocument", "parse_document", "load_document"]

SCHEMA_VERSION = 1

_LOGICAL_KEYS = {"capacity", "success"}
_PHYSICAL_KEYS = {"length_km", "memory_pairs", "attempt_rate_per_s", "success_per_attempt"}


@dataclass(frozen=True)
class PathDocument:
    """Parsed document: exactly one of `logical` / `physical_links` is set."""

    kind: str
    swap_probs: tuple[float, ...]
    logical: PathSpec | None = None
    physical_links: tuple[PhysicalLink, ...] | None = None
    hardware: HardwareProfile | None = None
    timing: TimingParams | None = None
    budget: MemoryBudget | None = None
    kappa_per_link: tuple[float, ...] | None = None

    def path_spec(self) -> PathSpec:
        if self.logical is None:
            raise SchemaError("this command needs a logical-form document")
        return self.logical

    def physical(self) -> tuple[tuple[PhysicalLink, ...], HardwareProfile, TimingParams]:
        if self.physical_links is None:
            raise SchemaError("this command needs a physical-form document")
        return self.physical_links, self.hardware, self.timing

    def to_json_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"schema": SCHEMA_VERSION}
        if self.logical is not None:
            obj["links"] = [
                {"capacity": link.capacity, "success": link.success}
                for link in self.logical.links
            ]
        else:
            obj["links"] = []
            for link in self.physical_links:
                entry: dict[str, Any] = {
                    "length_km": link.length_km,
                    "memory_pairs": link.memory_pairs,
                }
                if link.attempt_rate_per_s is not None:
                    entry["attempt_rate_per_s"] = link.attempt_rate_per_s
                if link.success_per_attempt is not None:
                    entry["success_per_attempt"] = link.success_per_attempt
                obj["links"].append(entry)
        obj["swap_probs"] = list(self.swap_probs)
        if self.hardware is not None:
            hw = self.hardware
            obj["hardware"] = {
                "attenuation_db_per_km": hw.attenuation_db_per_km,
                "light_speed_km_per_s": hw.light_speed_km_per_s,
                "detector_efficiency": hw.detector_efficiency,
                "memory_efficiency": hw.memory_efficiency,
                "attempt_latency_factor": hw.attempt_latency_factor,
                "protocol_prefactor": hw.protocol_prefactor,
            }
        if self.timing is not None:
            obj["timing"] = {
                "coherence_time_s": self.timing.coherence_time_s,
                "herald_delay_s": self.timing.herald_delay_s,
                "app_delay_s": self.timing.app_delay_s,
            }
        if self.budget is not None:
            obj["budget"] = list(self.budget.per_node)
        if self.kappa_per_link is not None:
            obj["kappa_per_link"] = list(self.kappa_per_link)
        return obj

    def dump(self, target: str | Path) -> None:
        Path(target).write_text(
            json.dumps(self.to_json_obj(), indent=2) + "\n", encoding="utf-8"
        )


def _require(obj: dict, key: str, kind: type | tuple[type, ...]) -> Any:
    if key not in obj:
        raise SchemaError(f"missing required field '{key}'")
    value = obj[key]
    if not isinstance(value, kind):
        raise SchemaError(f"field '{key}' has the wrong type")
    return value


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number")
    return float(value)


def parse_document(obj: Any) -> PathDocument:
    """Build a PathDocument from a decoded JSON object.

    Raises SchemaError for anything that does not conform: wrong schema
    version, mixed link forms, inconsistent counts, or out-of-range values.
    """
    if not isinstance(obj, dict):
        raise SchemaError("document root must be a JSON object")
    schema = _require(obj, "schema", int)
    if schema != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {schema}")
    links_raw = _require(obj, "links", list)
    if not links_raw or not all(isinstance(entry, dict) for entry in links_raw):
        raise SchemaError("'links' must be a non-empty list of objects")

    logical_form = all(_LOGICAL_KEYS <= set(entry) for entry in links_raw)
    physical_form = all("length_km" in entry for entry in links_raw)
    if logical_form == physical_form:
        raise SchemaError(
            "links must be all logical ({capacity, success}) or all physical "
            "({length_km, ...})"
        )

    swap_probs = tuple(
        _number(q, "swap_probs entry") for q in _require(obj, "swap_probs", list)
    )
    if len(swap_probs) != len(links_raw) - 1:
        raise SchemaError("swap_probs must have exactly one entry per interior node")

    budget = None
    if "budget" in obj:
        raw = _require(obj, "budget", list)
        try:
            budget = MemoryBudget(tuple(int(q) for q in raw))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad budget: {exc}") from exc
        if budget.link_count != len(links_raw):
            raise SchemaError("budget must have one entry per node (links + 1)")

    kappas = None
    if "kappa_per_link" in obj:
        raw = _require(obj, "kappa_per_link", list)
        if len(raw) != len(links_raw):
            raise SchemaError("kappa_per_link must have one entry per link")
        kappas = tuple(_number(k, "kappa_per_link entry") for k in raw)

    try:
        if logical_form:
            spec = PathSpec.from_params(
                [int(_number(e["capacity"], "capacity")) for e in links_raw],
                [_number(e["success"], "success") for e in links_raw],
                swap_probs,
            )
            return PathDocument(
                kind="logical",
                swap_probs=swap_probs,
                logical=spec,
                budget=budget,
                kappa_per_link=kappas,
            )
        physical = tuple(
            PhysicalLink(
                length_km=_number(e["length_km"], "length_km"),
                memory_pairs=int(e.get("memory_pairs", 1)),
                attempt_rate_per_s=(
                    None
                    if e.get("attempt_rate_per_s") is None
                    else _number(e["attempt_rate_per_s"], "attempt_rate_per_s")
                ),
                success_per_attempt=(
                    None
                    if e.get("success_per_attempt") is None
                    else _number(e["success_per_attempt"], "success_per_attempt")
                ),
            )
            for e in links_raw
        )
        hardware = HardwareProfile(**obj["hardware"]) if "hardware" in obj else HardwareProfile()
        if "timing" not in obj:
            raise SchemaError("physical documents need a 'timing' block")
        timing = TimingParams(**obj["timing"])
    except SchemaError:
        raise
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad document value: {exc}") from exc
    return PathDocument(
        kind="physical",
        swap_probs=swap_probs,
        physical_links=physical,
        hardware=hardware,
        timing=timing,
        budget=budget,
        kappa_per_link=kappas,
    )


def load_document(source: str | Path) -> PathDocument:
    """Read and parse a document file; raises SchemaError on any problem."""
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read document: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return parse_document(obj)
