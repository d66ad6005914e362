"""
End-to-end driver: build the problem, run seeded restarts, keep the best
schedule per mode, verify it and emit stats.

Each restart with seed ``s`` routes the interactions (shuffle seeded by
``s``), enumerates vertex edges along the routed paths (strong mode only),
builds the conflict graph and colors it greedily in largest-first order with
ties shuffled by ``s``. Restarts are independent; the reduction keeps the
fewest colors and breaks ties by the smallest seed. Sweeps repeat the
restarts over several seeded random placements per size.
"""

from __future__ import annotations

import asyncio
import logging
import statistics
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

from .coloring import (
    Schedule,
    blocked_order,
    bottleneck_layers,
    brooks_bound,
    build_conflict_graph,
    clique_lower_bound,
    greedy_color,
    largest_first_order,
)
from .config import Mode, ModelSource, RoutingParams, RunConfig
from .encoding import explicit_support
from .models import EmbeddedModel, Model, all_to_all, embed, nn_hopping
from .routing import Interaction, PathSet, bottleneck_routes, greedy_enumerate, route
from .serialization import (
    dump_document,
    load_graph,
    load_model,
    render_csv,
    write_csv,
)
from .system_graph import (
    SIZED_FAMILIES,
    BottleneckLayout,
    SystemGraph,
    bottleneck_enumeration,
    bottleneck_layout,
    generate,
    qubit_count,
)

logger = logging.getLogger(__name__)

STATS_COLUMNS = ["seed", "mode", "colors", "clique_bound", "brooks_bound"]
SWEEP_COLUMNS = [
    "size",
    "mode",
    "placements",
    "colors",
    "colors_mean",
    "colors_max",
    "clique_bound",
    "mean_path_length",
    "qubit_count",
    "sequential",
    "sequential_ratio",
    "strong_weak_ratio",
]
TIMING_COLUMN = "wall_time"

_FIXED_ARCHITECTURES = frozenset({"heavy_hexagon", "triangular"})


class HarnessError(Exception):
    """Base exception for harness errors."""
    pass


class ScheduleVerificationError(HarnessError):
    """Raised when a schedule puts two conflicting interactions in one layer."""
    pass


@dataclass(frozen=True)
class Problem:
    """A system graph with its vertex-space interactions, ready for restarts."""

    graph: SystemGraph
    interactions: tuple[Interaction, ...]
    embedding: Optional[EmbeddedModel] = None
    placement: str = "identity"
    placement_seed: int = 0
    bottleneck: Optional[BottleneckLayout] = None

    def with_graph(self, graph: SystemGraph) -> Problem:
        return replace(self, graph=graph)


@dataclass(frozen=True)
class RestartOutcome:
    """Result of one seeded restart in one mode."""

    seed: int
    mode: Mode
    schedule: Schedule
    paths: PathSet
    graph: SystemGraph
    clique_bound: int
    brooks_bound: int

    @property
    def colors(self) -> int:
        return self.schedule.colors

    def stats_row(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "mode": self.mode,
            "colors": self.colors,
            "clique_bound": self.clique_bound,
            "brooks_bound": self.brooks_bound,
        }


@dataclass(frozen=True)
class ModeResult:
    mode: Mode
    best: RestartOutcome
    outcomes: tuple[RestartOutcome, ...]


@dataclass(frozen=True)
class RunResult:
    problem: Problem
    results: Mapping[Mode, ModeResult] = field(default_factory=dict)

    def best(self, mode: Mode) -> RestartOutcome:
        return self.results[mode].best

    def stats_rows(self) -> list[dict[str, Any]]:
        return [o.stats_row() for r in self.results.values() for o in r.outcomes]


def _resolve_model(config: RunConfig, g: SystemGraph) -> Model:
    source = config.model or ModelSource(kind="all_to_all")
    if source.kind == "file":
        return load_model(source.path)  # type: ignore[arg-type]
    if source.kind == "nn_hopping":
        return nn_hopping(source.size)  # type: ignore[arg-type]
    return all_to_all(source.size if source.size is not None else len(g.physical_vertices))


def _resolve_placement(config: RunConfig, model: Model) -> str:
    if config.placement != "auto":
        return config.placement
    if config.graph.family in _FIXED_ARCHITECTURES:
        return "lattice" if model.lattice_side is not None else "random"
    return "identity"


def prepare_problem(config: RunConfig, placement_seed: Optional[int] = None) -> Problem:
    """Load or generate the graph, build the model and place it.

    Random placement is seeded by ``placement_seed``, or by ``config.seed``
    when it is omitted. The canned enumeration also records the bottleneck
    layout, which switches restarts to matched-middle routing.
    """
    source = config.graph
    if source.path is not None:
        g = load_graph(source.path)
    else:
        g = generate(source.family, source.size)  # type: ignore[arg-type]
    layout = None
    if config.enumeration == "canned":
        g = bottleneck_enumeration(g)
        layout = bottleneck_layout(g)

    seed = config.seed if placement_seed is None else placement_seed
    model = _resolve_model(config, g)
    placement = _resolve_placement(config, model)
    embedding = embed(model, g, seed=seed, placement=placement)  # type: ignore[arg-type]
    logger.info(
        f"Prepared {model.name} on {g.name or source.describe()}: "
        f"{len(embedding.interactions)} interactions, {qubit_count(embedding.graph)} qubits, "
        f"placement {placement}" + (f" (seed {seed})" if placement == "random" else "")
    )
    return Problem(
        graph=embedding.graph,
        interactions=embedding.interactions,
        embedding=embedding,
        placement=placement,
        placement_seed=seed,
        bottleneck=layout,
    )


def run_restart(
    problem: Problem,
    mode: Mode,
    seed: int,
    params: RoutingParams,
    clique_seeds: Optional[int] = None,
    paths: Optional[PathSet] = None,
) -> RestartOutcome:
    """Route, enumerate (strong), build the conflict graph and color it for one seed.

    A given ``paths`` replaces routing; it is checked against the graph first.
    On a bottleneck problem the paths go through matched middles, and strong
    mode also colors in parity-layer order, keeping it only when it beats
    largest-first.
    """
    if paths is not None:
        paths.validate(problem.graph, problem.interactions)
    elif problem.bottleneck is not None:
        paths = bottleneck_routes(problem.graph, problem.interactions)
    else:
        paths = route(problem.graph, problem.interactions, params.model_copy(update={"seed": seed}))
    graph = problem.graph
    if mode == "strong":
        graph = greedy_enumerate(graph, paths.all_paths())
    cg = build_conflict_graph(mode, graph, problem.interactions, paths)
    schedule = greedy_color(cg, largest_first_order(cg, seed))
    if mode == "strong" and problem.bottleneck is not None:
        blocks = bottleneck_layers(problem.bottleneck, problem.interactions)
        layered = greedy_color(cg, blocked_order(cg, blocks, seed))
        if layered.colors < schedule.colors:
            logger.debug(
                f"Seed {seed}: parity layers give {layered.colors} colors, "
                f"largest-first {schedule.colors}"
            )
            schedule = layered
    brooks = brooks_bound(cg)
    if schedule.colors > brooks:
        logger.warning(
            f"Seed {seed} ({mode}): greedy used {schedule.colors} colors, above the Brooks bound {brooks}"
        )
    outcome = RestartOutcome(
        seed=seed,
        mode=mode,
        schedule=schedule,
        paths=paths,
        graph=graph,
        clique_bound=clique_lower_bound(cg, clique_seeds),
        brooks_bound=brooks,
    )
    logger.debug(f"Seed {seed} ({mode}): {outcome.colors} colors, clique bound {outcome.clique_bound}")
    return outcome


def verify_schedule(
    g: SystemGraph,
    interactions: Sequence[Interaction],
    paths: PathSet,
    schedule: Schedule,
) -> None:
    """
    Check a schedule independently of the conflict graph that produced it.

    Strong schedules need pairwise disjoint Pauli supports within a layer,
    computed by multiplying the explicit operators; weak schedules need
    pairwise disjoint vertex sets, read straight off the path tuples and
    vertex-operator targets.

    Raises:
        ScheduleVerificationError: an interaction is missing or duplicated, or two
            interactions in one layer overlap
    """
    by_id = {term.id: term for term in interactions}
    scheduled = [i for layer in schedule.layers for i in layer]
    if sorted(scheduled) != sorted(by_id):
        raise ScheduleVerificationError(
            f"Schedule covers {len(scheduled)} interactions, expected {len(by_id)}"
        )

    def footprint(term: Interaction) -> frozenset[int]:
        term_paths = paths.get(term.id) or ()
        if schedule.mode == "strong":
            return explicit_support(g, term, term_paths)
        return frozenset(term.b_targets).union(term.endpoints, *term_paths)

    for index, layer in enumerate(schedule.layers):
        seen: dict[int, int] = {}
        for interaction_id in layer:
            for element in footprint(by_id[interaction_id]):
                other = seen.get(element)
                if other is not None:
                    what = f"qubit {element}" if schedule.mode == "strong" else f"vertex {element}"
                    raise ScheduleVerificationError(
                        f"Layer {index}: interactions {other} ({by_id[other].label}) and "
                        f"{interaction_id} ({by_id[interaction_id].label}) share {what}"
                    )
                seen[element] = interaction_id


async def _launch(
    executor: Optional[Executor],
    problem: Problem,
    mode: Mode,
    seed: int,
    config: RunConfig,
) -> RestartOutcome:
    job = partial(run_restart, problem, mode, seed, config.routing, config.clique_seeds)
    if executor is None:
        return job()
    return await asyncio.get_running_loop().run_in_executor(executor, job)


async def run_async(config: RunConfig, problem: Optional[Problem] = None) -> RunResult:
    """
    Run ``config.restarts`` seeded restarts per requested mode.

    Args:
        config: validated run configuration
        problem: optional prepared problem; built from ``config`` when omitted

    Returns:
        Best outcome per mode (fewest colors, smallest seed on ties), every
        winner verified

    Raises:
        ScheduleVerificationError: a winning schedule fails verification
    """
    problem = problem or prepare_problem(config)
    seeds = [config.seed + i for i in range(config.restarts)]
    executor = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        async with asyncio.TaskGroup() as tg:
            tasks = {
                (mode, seed): tg.create_task(_launch(executor, problem, mode, seed, config))
                for mode in config.modes
                for seed in seeds
            }
    finally:
        if executor is not None:
            executor.shutdown()

    results: dict[Mode, ModeResult] = {}
    for mode in config.modes:
        outcomes = tuple(tasks[(mode, seed)].result() for seed in seeds)
        best = min(outcomes, key=lambda o: (o.colors, o.seed))
        verify_schedule(best.graph, problem.interactions, best.paths, best.schedule)
        results[mode] = ModeResult(mode=mode, best=best, outcomes=outcomes)
        logger.info(
            f"{mode}: best {best.colors} colors at seed {best.seed} over {len(seeds)} restarts "
            f"(clique bound {best.clique_bound})"
        )
    return RunResult(problem=problem, results=results)


def run(config: RunConfig, problem: Optional[Problem] = None) -> RunResult:
    """Synchronous wrapper around :func:`run_async`."""
    return asyncio.run(run_async(config, problem))


async def run_placements_async(config: RunConfig) -> list[RunResult]:
    """
    Run the restarts once per sampled placement.

    Placement ``k`` is seeded with ``config.seed + k``. Only random placement
    varies with its seed; any other placement runs once whatever
    ``config.placements`` says.

    Returns:
        One result per placement, in seed order
    """
    first = prepare_problem(config)
    count = config.placements
    if count > 1 and first.placement != "random":
        logger.warning(
            f"Placement {first.placement} does not depend on a seed; "
            f"running 1 placement instead of {count}"
        )
        count = 1
    results = [await run_async(config, first)]
    for k in range(1, count):
        problem = prepare_problem(config, placement_seed=config.seed + k)
        results.append(await run_async(config, problem))
    return results


def run_placements(config: RunConfig) -> list[RunResult]:
    return asyncio.run(run_placements_async(config))


def sweep_columns(config: RunConfig) -> list[str]:
    return SWEEP_COLUMNS + [TIMING_COLUMN] if config.record_timings else list(SWEEP_COLUMNS)


def config_for_size(config: RunConfig, size: int) -> RunConfig:
    """The run configuration for one sweep size.

    Sized generator families take the size as their parameter; a model with
    a size (or fixed architectures and graph files) takes it as N or L.
    """
    graph = config.graph
    model = config.model
    if graph.family in SIZED_FAMILIES:
        graph = graph.model_copy(update={"size": size})
        if model is not None and model.kind != "file":
            model = model.model_copy(update={"size": size})
    else:
        model = (model or ModelSource(kind="all_to_all")).model_copy(update={"size": size})
    return config.model_copy(update={"graph": graph, "model": model})


async def sweep_async(config: RunConfig, sizes: Sequence[int]) -> list[dict[str, Any]]:
    """
    One stats row per (size, mode), sizes in the order given.

    ``colors`` is the best over placements (first placement on ties), which
    also supplies the bound, path length and qubit columns; ``colors_mean``
    and ``colors_max`` summarise the per-placement bests. ``sequential`` is
    the layer count of running every term alone. ``strong_weak_ratio`` is
    filled on strong rows when both modes ran.
    """
    rows: list[dict[str, Any]] = []
    for size in sizes:
        sized = config_for_size(config, size)
        started = time.perf_counter()
        results = await run_placements_async(sized)
        elapsed = time.perf_counter() - started
        sequential = len(results[0].problem.interactions)
        fewest: dict[Mode, int] = {}
        for mode in sized.modes:
            bests = [result.best(mode) for result in results]
            best = min(bests, key=lambda o: o.colors)
            fewest[mode] = best.colors
            row: dict[str, Any] = {
                "size": size,
                "mode": mode,
                "placements": len(results),
                "colors": best.colors,
                "colors_mean": f"{statistics.fmean(o.colors for o in bests):.4f}",
                "colors_max": max(o.colors for o in bests),
                "clique_bound": best.clique_bound,
                "mean_path_length": f"{best.paths.mean_path_length():.4f}",
                "qubit_count": qubit_count(best.graph),
                "sequential": sequential,
                "sequential_ratio": f"{best.colors / sequential:.4f}",
                "strong_weak_ratio": "",
            }
            if mode == "strong" and "weak" in fewest:
                row["strong_weak_ratio"] = f"{best.colors / fewest['weak']:.4f}"
            if config.record_timings:
                row[TIMING_COLUMN] = f"{elapsed:.3f}"
            rows.append(row)
    return rows


def sweep(config: RunConfig, sizes: Sequence[int]) -> list[dict[str, Any]]:
    return asyncio.run(sweep_async(config, sizes))


def interactions_document(problem: Problem) -> dict[str, Any]:
    """Vertex-space interactions in the model file format, for later verification."""
    name = problem.embedding.model.name if problem.embedding is not None else "interactions"
    model = Model(
        name=name,
        modes=max(problem.graph.vertices) + 1,
        interactions=problem.interactions,
    )
    return model.to_dict()


def write_run_outputs(
    result: RunResult,
    directory: Union[str, Path],
    fmt: str = "yaml",
    config: Optional[RunConfig] = None,
) -> list[Path]:
    """Write the interactions, per-mode schedules, path sets and graphs, and ``stats.csv``.

    With ``config`` the resolved run configuration goes to ``run_config.<fmt>``
    so the run can be repeated with ``--config``.
    """
    out = Path(directory)
    written: list[Path] = []
    if config is not None:
        written.append(config.save_to_file(out / f"run_config.{fmt}"))
    written.append(
        dump_document(interactions_document(result.problem), out / f"interactions.{fmt}")
    )
    for mode, mode_result in result.results.items():
        best = mode_result.best
        written.append(dump_document(best.schedule.to_dict(), out / f"schedule_{mode}.{fmt}"))
        written.append(dump_document(best.paths.to_dict(), out / f"paths_{mode}.{fmt}"))
        written.append(dump_document(best.graph.to_dict(), out / f"graph_{mode}.{fmt}"))
    written.append(write_csv(result.stats_rows(), STATS_COLUMNS, out / "stats.csv"))
    return written


def render_stats(result: RunResult) -> str:
    return render_csv(result.stats_rows(), STATS_COLUMNS)
