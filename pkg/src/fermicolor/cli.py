"""
Command-line interface.

Subcommands: ``gen`` (write a system graph), ``route`` (one routed path set),
``color`` (one coloring per mode), ``run`` (best of R restarts), ``sweep``
(one CSV row per size and mode over sampled placements) and ``verify``
(check a written schedule).

Exit codes: 0 on success, 1 on any fermicolor error (including a failed
verification), 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from .coloring import ColoringError
from .config import (
    FermicolorConfigError,
    GraphSource,
    ModelSource,
    RunConfig,
    configure_logging,
    load_config,
)
from .encoding import EncodingError
from .harness import (
    HarnessError,
    Problem,
    prepare_problem,
    render_stats,
    run,
    run_restart,
    sweep,
    sweep_columns,
    verify_schedule,
    write_run_outputs,
)
from .models import ModelError
from .pauli import PauliError
from .routing import RoutingError, bottleneck_routes, route
from .serialization import (
    SerializationError,
    dump_document,
    load_graph,
    load_model,
    load_paths,
    load_schedule,
    render_csv,
    render_document,
    write_csv,
)
from .system_graph import SystemGraphError, bottleneck_enumeration, generate

logger = logging.getLogger(__name__)

FERMICOLOR_ERRORS = (
    FermicolorConfigError,
    SystemGraphError,
    EncodingError,
    RoutingError,
    ColoringError,
    ModelError,
    HarnessError,
    SerializationError,
    PauliError,
)


class ArgumentError(Exception):
    """Raised for flag values argparse accepts but fermicolor cannot use."""
    pass


def parse_sizes(text: str) -> list[int]:
    """Parse ``"3,4,8"`` and inclusive ranges ``"3..10"``; an empty string is no sizes."""
    sizes: list[int] = []
    for item in filter(None, (part.strip() for part in text.split(","))):
        low, sep, high = item.partition("..")
        try:
            if sep:
                sizes.extend(range(int(low), int(high) + 1))
            else:
                sizes.append(int(item))
        except ValueError:
            raise ArgumentError(f"Invalid size {item!r} in --sizes")
    return sizes


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="configuration file (YAML or JSON)")
    parser.add_argument("--graph", help="generator spec such as star:8 or heavy_hexagon, or a graph file")
    parser.add_argument("--model", help="all_to_all[:N], nn_hopping:L or a model file")
    parser.add_argument("--mode", choices=["weak", "strong", "both"])
    parser.add_argument("--seed", type=int, help="base seed")
    parser.add_argument("--phys-penalty", type=float, help="weight per physical endpoint of an edge")
    parser.add_argument("--used-increment", type=float, help="weight added to edges of each routed path")
    parser.add_argument("--placement", choices=["auto", "identity", "random", "lattice"])
    parser.add_argument("--enumeration", choices=["greedy", "canned"])
    parser.add_argument("--format", choices=["yaml", "json"], help="structured-text output format")
    parser.add_argument("--out", help="output file or directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermicolor",
        description="Route, color and schedule fermionic interactions on custom-encoding system graphs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="write a system graph")
    _add_common(gen)

    route_cmd = commands.add_parser("route", help="route the interactions once")
    _add_common(route_cmd)

    color = commands.add_parser("color", help="color one routed path set per mode")
    _add_common(color)
    color.add_argument("--paths", help="path set file; routed with --seed when omitted")

    run_cmd = commands.add_parser("run", help="best of R seeded restarts")
    _add_common(run_cmd)
    run_cmd.add_argument("--restarts", type=int)
    run_cmd.add_argument("--workers", type=int)

    sweep_cmd = commands.add_parser("sweep", help="one stats row per size and mode")
    _add_common(sweep_cmd)
    sweep_cmd.add_argument("--sizes", required=True, help="comma list and ranges, e.g. 3..10,12")
    sweep_cmd.add_argument("--restarts", type=int)
    sweep_cmd.add_argument("--placements", type=int, help="seeded random placements per size")
    sweep_cmd.add_argument("--workers", type=int)
    sweep_cmd.add_argument("--record-timings", action="store_true", default=None)

    verify = commands.add_parser("verify", help="check a schedule against its graph and paths")
    verify.add_argument("--graph", required=True, help="graph file with the enumeration used")
    verify.add_argument("--model", required=True, help="vertex-space interactions file")
    verify.add_argument("--paths", required=True, help="path set file")
    verify.add_argument("--schedule", required=True, help="schedule file")
    verify.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {
        "mode": args.mode,
        "seed": args.seed,
        "placement": args.placement,
        "enumeration": args.enumeration,
        "restarts": getattr(args, "restarts", None),
        "placements": getattr(args, "placements", None),
        "workers": getattr(args, "workers", None),
        "record_timings": getattr(args, "record_timings", None),
        "routing": {"phys_penalty": args.phys_penalty, "used_increment": args.used_increment},
        "output": {"format": args.format},
        "logging": {"level": "DEBUG" if args.verbose else None},
    }
    try:
        if args.graph:
            overrides["graph"] = GraphSource.parse(args.graph).model_dump()
        if args.model:
            overrides["model"] = ModelSource.parse(args.model).model_dump()
    except ValueError as e:
        raise ArgumentError(str(e))
    return overrides


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    logger.info(f"Wrote {target}")


def _document_out(data: Any, out: Optional[str], config: RunConfig) -> None:
    if out is not None and Path(out).suffix.lower() in (".yaml", ".yml", ".json"):
        dump_document(data, out)
    else:
        _emit(render_document(data, config.output.format), out)


def cmd_gen(args: argparse.Namespace, config: RunConfig) -> int:
    source = config.graph
    g = load_graph(source.path) if source.path is not None else generate(source.family, source.size)  # type: ignore[arg-type]
    if config.enumeration == "canned":
        g = bottleneck_enumeration(g)
    _document_out(g.to_dict(), args.out, config)
    return 0


def cmd_route(args: argparse.Namespace, config: RunConfig) -> int:
    problem = prepare_problem(config)
    if problem.bottleneck is not None:
        paths = bottleneck_routes(problem.graph, problem.interactions)
    else:
        params = config.routing.model_copy(update={"seed": config.seed})
        paths = route(problem.graph, problem.interactions, params)
    _document_out(paths.to_dict(), args.out, config)
    return 0


def _color_problem(problem: Problem, args: argparse.Namespace, config: RunConfig) -> dict[str, Any]:
    paths = load_paths(args.paths) if args.paths else None
    documents: dict[str, Any] = {}
    for mode in config.modes:
        outcome = run_restart(problem, mode, config.seed, config.routing, config.clique_seeds, paths)
        verify_schedule(outcome.graph, problem.interactions, outcome.paths, outcome.schedule)
        documents[mode] = outcome.schedule.to_dict()
    return documents


def cmd_color(args: argparse.Namespace, config: RunConfig) -> int:
    documents = _color_problem(prepare_problem(config), args, config)
    data = next(iter(documents.values())) if len(documents) == 1 else documents
    _document_out(data, args.out, config)
    return 0


def cmd_run(args: argparse.Namespace, config: RunConfig) -> int:
    result = run(config)
    directory = args.out or config.output.directory
    if directory is not None:
        write_run_outputs(result, directory, config.output.format, config=config)
    else:
        _emit(render_stats(result), None)
    return 0


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    rows = sweep(config, parse_sizes(args.sizes))
    columns = sweep_columns(config)
    if args.out:
        write_csv(rows, columns, args.out)
    else:
        _emit(render_csv(rows, columns), None)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    model = load_model(args.model)
    paths = load_paths(args.paths)
    schedule = load_schedule(args.schedule)
    paths.validate(g, model.interactions)
    verify_schedule(g, model.interactions, paths, schedule)
    sys.stdout.write(f"ok: {schedule.mode} schedule with {schedule.colors} layers verified\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        if args.command == "verify":
            configure_logging(RunConfig().logging.model_copy(
                update={"level": "DEBUG" if args.verbose else "WARNING"}
            ))
            return cmd_verify(args)

        config = load_config(args.config, overrides=_overrides(args))
        configure_logging(config.logging)
        handlers = {
            "gen": cmd_gen,
            "route": cmd_route,
            "color": cmd_color,
            "run": cmd_run,
            "sweep": cmd_sweep,
        }
        return handlers[args.command](args, config)
    except ArgumentError as e:
        sys.stderr.write(f"fermicolor: error: {e}\n")
        return 2
    except FERMICOLOR_ERRORS as e:
        sys.stderr.write(f"fermicolor: {type(e).__name__}: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
