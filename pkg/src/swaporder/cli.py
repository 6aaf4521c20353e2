"""Command-line front end.

Subcommands wrap the library: `eval` scores one swapping order, `search`
picks one, `allocate` optimizes link memory, `estimate` maps physical
parameters to throughput per second, and `simulate` runs the seeded Monte
Carlo oracle.  Human output rounds to --precision decimals; --json and CSV
output keep full precision with dot decimal separators.

Exit codes: 0 ok, 2 schema/usage error, 3 invalid order, 4 search budget
exceeded, 5 infeasible allocation.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import sys
import time
from typing import Sequence

import click

from . import __version__
from .allocation import (
    CapacityModel,
    enumerate_allocations,
    optimize_allocation,
    score_allocation,
)
from .distributions import NormalParams, Pmf
from .documents import PathDocument, load_document
from .errors import (
    BudgetExceeded,
    Infeasible,
    InvalidOrder,
    SchemaError,
    SlotNonpositive,
)
from .estimator import PhysicalLink, TimingParams, estimate_path_throughput, link_rates
from .montecarlo import simulate_asap, simulate_order
from .order_search import (
    balanced_tree,
    brute_force,
    count_trees,
    greedy_swap,
    scored_orders,
    vora_swap,
    ScoredOrder,
)
from .swap_engine import EvalMode, PathSpec, SwapOrder, ent

_STRATEGIES = ("brute", "greedy", "vora", "balanced", "l2r", "r2l")


def _die(code: int, err: object) -> None:
    click.echo(f"error: {err}", err=True)
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SchemaError as err:
            _die(2, err)
        except InvalidOrder as err:
            _die(3, err)
        except BudgetExceeded as err:
            _die(4, err)
        except Infeasible as err:
            _die(5, err)

    return wrapper


def _mode_from(mode: str, epsilon: float) -> EvalMode:
    if mode in ("tail", "hybrid"):
        return EvalMode(mode, epsilon)
    return EvalMode(mode)


def _mode_label(mode: EvalMode) -> str:
    if mode.epsilon is not None:
        return f"{mode.kind}({mode.epsilon:g})"
    return mode.kind


def _parse_order(text: str) -> SwapOrder:
    try:
        return SwapOrder(tuple(int(tok) for tok in text.split(",")))
    except ValueError as exc:
        raise InvalidOrder(f"cannot parse order '{text}'") from exc


def _order_str(order: SwapOrder) -> str:
    return "[" + ",".join(str(s) for s in order.sequence) + "]"


def _order_csv(order: SwapOrder) -> str:
    return "-".join(str(s) for s in order.sequence)


def _maybe_dump(doc: PathDocument, dump: str | None) -> None:
    if dump:
        doc.dump(dump)


def _json_report(score: float, order: SwapOrder, mode: EvalMode, started: float, **extra) -> str:
    payload = {
        "score": score,
        "order": list(order.sequence),
        "mode": _mode_label(mode),
        "timing_ms": (time.perf_counter() - started) * 1e3,
    }
    payload.update(extra)
    return json.dumps(payload)


def _dist_summary(dist, precision: int) -> str:
    if isinstance(dist, Pmf):
        return (
            f"distribution: pmf(support={dist.support}) "
            f"mean={dist.mean():.{precision}f} std={math.sqrt(dist.variance()):.{precision}f}"
        )
    assert isinstance(dist, NormalParams)
    return f"distribution: normal(mean={dist.mean:.{precision}f}, variance={dist.variance:.{precision}f})"


mode_option = click.option(
    "--mode",
    type=click.Choice(["exact", "tail", "normal", "hybrid"]),
    default="exact",
    show_default=True,
    help="Evaluation mode.",
)
epsilon_option = click.option(
    "--epsilon",
    type=float,
    default=1e-5,
    show_default=True,
    help="Tail-truncation error for tail/hybrid modes.",
)
precision_option = click.option(
    "--precision", type=int, default=2, show_default=True, help="Display decimals."
)
dump_option = click.option(
    "--dump", type=click.Path(dir_okay=False), default=None, help="Re-serialize the parsed document to this file."
)
json_option = click.option("--json", "as_json", is_flag=True, help="Machine-readable JSON output.")
jobs_option = click.option("--jobs", type=int, default=1, show_default=True, help="Worker cap for engine fan-out.")


@click.group()
@click.version_option(version=__version__, prog_name="swaporder")
def cli() -> None:
    """Evaluate, search, and optimize entanglement swapping on repeater paths."""


@cli.command("eval")
@click.argument("doc", type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "order_text", required=True, help="Comma-separated interior node ids, e.g. 3,2,1.")
@mode_option
@epsilon_option
@precision_option
@json_option
@dump_option
@_guarded
def cmd_eval(doc, order_text, mode, epsilon, precision, as_json, dump) -> None:
    """Score one swapping order on a logical path document."""
    started = time.perf_counter()
    document = load_document(doc)
    _maybe_dump(document, dump)
    path = document.path_spec()
    order = _parse_order(order_text)
    eval_mode = _mode_from(mode, epsilon)
    score, dist = ent(path, order, eval_mode)
    if as_json:
        click.echo(_json_report(score, order, eval_mode, started))
        return
    click.echo(f"{score:.{precision}f}")
    click.echo(_dist_summary(dist, precision))


def _search(path: PathSpec, strategy: str, mode: EvalMode, jobs: int) -> ScoredOrder:
    if strategy == "brute":
        return brute_force(path, mode, jobs=jobs)
    if strategy == "greedy":
        return greedy_swap(path, mode)
    if strategy == "vora":
        return vora_swap(path, mode)
    if strategy == "balanced":
        order = balanced_tree(path)
    elif strategy == "l2r":
        order = SwapOrder(tuple(path.interior_nodes()))
    else:  # r2l
        order = SwapOrder(tuple(reversed(path.interior_nodes())))
    score, _ = ent(path, order, mode)
    return ScoredOrder(order, score)


@cli.command("search")
@click.argument("doc", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--strategy",
    type=click.Choice(_STRATEGIES),
    default="vora",
    show_default=True,
    help="Order selection strategy.",
)
@mode_option
@epsilon_option
@click.option("--all", "show_all", is_flag=True, help="With brute: CSV of every tree's order and score.")
@jobs_option
@precision_option
@json_option
@dump_option
@_guarded
def cmd_search(doc, strategy, mode, epsilon, show_all, jobs, precision, as_json, dump) -> None:
    """Pick a swapping order for a logical path document."""
    started = time.perf_counter()
    document = load_document(doc)
    _maybe_dump(document, dump)
    path = document.path_spec()
    eval_mode = _mode_from(mode, epsilon)

    if show_all:
        if count_trees(path.link_count) > 10**6:
            raise BudgetExceeded(f"{count_trees(path.link_count)} trees exceed budget 1000000")
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["order", "score"])
        for scored in scored_orders(path, eval_mode):
            writer.writerow([_order_csv(scored.order), repr(scored.score)])
        return

    best = _search(path, strategy, eval_mode, jobs)
    if as_json:
        click.echo(_json_report(best.score, best.order, eval_mode, started, strategy=strategy))
        return
    click.echo(f"{_order_str(best.order)} {best.score:.{precision}f}")


def _allocation_inputs(document: PathDocument) -> tuple[CapacityModel, list[float]]:
    """Capacity model and per-attempt link probabilities for the allocator."""
    if document.logical is not None:
        # logical template: capacity is read as capacity per memory pair
        kappas = document.kappa_per_link or tuple(
            float(link.capacity) for link in document.logical.links
        )
        return CapacityModel(kappas), [link.success for link in document.logical.links]
    links, hw, timing = document.physical()
    per_pair = []
    for link in links:
        one_pair = PhysicalLink(
            length_km=link.length_km,
            memory_pairs=1,
            attempt_rate_per_s=(
                None
                if link.attempt_rate_per_s is None
                else link.attempt_rate_per_s / link.memory_pairs
            ),
            success_per_attempt=link.success_per_attempt,
        )
        per_pair.append(link_rates(one_pair, hw))
    if len(links) > 2:
        rtt = 2.0 * sum(link.length_km for link in links) / hw.light_speed_km_per_s
        slot = timing.coherence_time_s - rtt
        if slot <= 0.0:
            raise Infeasible("coherence time too small for the path round trip")
    else:
        slot = timing.cutoff_s
    if document.kappa_per_link is not None:
        kappas = document.kappa_per_link
    else:
        kappas = tuple(a * slot for a, _ in per_pair)
    return CapacityModel(kappas), [r for _, r in per_pair]


@cli.command("allocate")
@click.argument("doc", type=click.Path(exists=True, dir_okay=False))
@mode_option
@epsilon_option
@click.option("--all", "show_all", is_flag=True, help="CSV of every evaluated allocation.")
@precision_option
@json_option
@dump_option
@_guarded
def cmd_allocate(doc, mode, epsilon, show_all, precision, as_json, dump) -> None:
    """Optimize per-link memory allocation for a document with a budget."""
    started = time.perf_counter()
    document = load_document(doc)
    _maybe_dump(document, dump)
    if document.budget is None:
        raise SchemaError("allocate needs a 'budget' field in the document")
    eval_mode = _mode_from(mode, epsilon)
    model, link_probs = _allocation_inputs(document)

    if show_all:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["allocation", "order", "score"])
        for alloc in enumerate_allocations(document.budget):
            scored = score_allocation(
                alloc, model, link_probs, document.swap_probs, eval_mode, 1000
            )
            writer.writerow(
                [
                    "-".join(str(m) for m in alloc.per_link),
                    _order_csv(scored.order),
                    repr(scored.score),
                ]
            )
        return

    alloc, scored = optimize_allocation(
        document.budget, model, link_probs, document.swap_probs, eval_mode
    )
    if as_json:
        click.echo(
            _json_report(
                scored.score,
                scored.order,
                eval_mode,
                started,
                allocation=list(alloc.per_link),
            )
        )
        return
    alloc_str = "[" + ",".join(str(m) for m in alloc.per_link) + "]"
    click.echo(f"allocation {alloc_str} order {_order_str(scored.order)} score {scored.score:.{precision}f}")


@cli.command("estimate")
@click.argument("doc", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--sweep",
    required=True,
    help="Comma-separated coherence times in seconds, e.g. 0.002,0.005,0.01.",
)
@mode_option
@epsilon_option
@dump_option
@_guarded
def cmd_estimate(doc, sweep, mode, epsilon, dump) -> None:
    """Throughput (entanglements/second) of a physical path over a coherence sweep."""
    document = load_document(doc)
    _maybe_dump(document, dump)
    links, hw, timing = document.physical()
    eval_mode = _mode_from(mode, epsilon)
    try:
        points = [float(tok) for tok in sweep.split(",") if tok]
    except ValueError as exc:
        raise SchemaError(f"cannot parse sweep '{sweep}'") from exc
    if not points:
        raise SchemaError("sweep must list at least one coherence time")

    if len(links) > 2:
        rtt = 2.0 * sum(link.length_km for link in links) / hw.light_speed_km_per_s
        click.echo(f"tau_rtt: {rtt:g} s", err=True)

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["coherence_s", "slot_s", "ent_per_s", "order"])
    for coherence in points:
        try:
            point_timing = TimingParams(
                coherence, timing.herald_delay_s, timing.app_delay_s
            )
            per_s, slot, _, order = estimate_path_throughput(
                links, document.swap_probs, hw, point_timing, eval_mode
            )
            writer.writerow([repr(coherence), repr(slot), repr(per_s), _order_csv(order)])
        except (SlotNonpositive, ValueError) as err:
            click.echo(f"infeasible at coherence {coherence:g}s: {err}", err=True)
            writer.writerow([repr(coherence), "nan", "nan", ""])


@cli.command("simulate")
@click.argument("doc", type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "order_text", default=None, help="Comma-separated interior node ids.")
@click.option("--asap", is_flag=True, help="Random per-trial interleaving instead of a fixed order.")
@click.option("--trials", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@jobs_option
@click.option("--check", is_flag=True, help="Also evaluate the analytic score and report the z-score.")
@precision_option
@dump_option
@_guarded
def cmd_simulate(doc, order_text, asap, trials, seed, jobs, check, precision, dump) -> None:
    """Monte Carlo estimate of the end-to-end entanglement count per slot."""
    document = load_document(doc)
    _maybe_dump(document, dump)
    path = document.path_spec()
    if asap == (order_text is not None):
        raise click.UsageError("give exactly one of --order or --asap")

    if asap:
        outcome = simulate_asap(path, trials, seed, jobs=jobs)
        label = "asap"
    else:
        order = _parse_order(order_text)
        outcome = simulate_order(path, order, trials, seed, jobs=jobs)
        label = _order_str(order)

    se = outcome.std_error
    click.echo(
        f"{label} mean {outcome.mean:.{precision}f} ± {se:.{precision}f} (SE), "
        f"trials {outcome.trials}, seed {outcome.seed}"
    )
    if check:
        if asap:
            raise click.UsageError("--check needs a fixed --order")
        check_mode = (
            EvalMode.exact()
            if max(link.capacity for link in path.links) <= 2000
            else EvalMode.hybrid(1e-5)
        )
        score, _ = ent(path, order, check_mode)
        if se > 0.0:
            z = (outcome.mean - score) / se
        else:
            z = 0.0 if outcome.mean == score else math.inf
        click.echo(f"analytic {score:.{precision}f} ({check_mode.kind}), z = {z:.2f}")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
