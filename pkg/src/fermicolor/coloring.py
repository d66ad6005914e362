"""
Conflict graphs, greedy coloring, bounds and an exact chromatic oracle.

Two interactions conflict weakly when their vertex sets meet and strongly
when their encoded qubit supports meet. A coloring of the conflict graph is a
schedule: every color class is one layer of terms that can run in parallel.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import networkx as nx

from .config import Mode
from .encoding import checked_paths, interaction_support
from .routing import Interaction, Path, PathSet, interaction_vertices
from .system_graph import BottleneckLayout, SystemGraph

logger = logging.getLogger(__name__)

MODES: tuple[Mode, ...] = ("weak", "strong")

DEFAULT_SIZE_CAP = 18


class ColoringError(Exception):
    """Base exception for conflict graph and coloring errors."""
    pass


class TooLargeError(ColoringError):
    """Raised when the exact oracle is asked for a graph above its size cap."""
    pass


class InvalidOrderError(ColoringError):
    """Raised when a vertex order is not a permutation of the conflict graph."""
    pass


class ScheduleFormatError(ColoringError):
    """Raised when a serialized schedule is malformed."""
    pass


@dataclass(frozen=True, eq=False)
class ConflictGraph:
    """Interactions (by id) with an edge for every pair that may not share a layer."""

    graph: nx.Graph
    mode: Mode

    @property
    def vertices(self) -> list[int]:
        return sorted(self.graph.nodes)

    @property
    def edge_count(self) -> int:
        return int(self.graph.number_of_edges())

    def degree(self, v: int) -> int:
        return int(self.graph.degree(v))

    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree), default=0)

    def conflicts(self, a: int, b: int) -> bool:
        return bool(self.graph.has_edge(a, b))

    def neighbors(self, v: int) -> set[int]:
        return set(self.graph.neighbors(v))

    def edge_set(self) -> set[tuple[int, int]]:
        return {(min(a, b), max(a, b)) for a, b in self.graph.edges}


@dataclass(frozen=True)
class Schedule:
    """A proper coloring: ``coloring[id]`` is the layer index of interaction ``id``."""

    mode: Mode
    coloring: Mapping[int, int]

    def __post_init__(self) -> None:
        self._validate_fields()

    def _validate_fields(self) -> None:
        if self.mode not in MODES:
            raise ScheduleFormatError(f"Unknown schedule mode {self.mode!r}")
        used = sorted(set(self.coloring.values()))
        if used != list(range(len(used))):
            raise ScheduleFormatError(f"Layer indices must be 0..k-1, got {used}")

    @cached_property
    def layers(self) -> tuple[tuple[int, ...], ...]:
        buckets: dict[int, list[int]] = {}
        for interaction_id, color in self.coloring.items():
            buckets.setdefault(color, []).append(interaction_id)
        return tuple(tuple(sorted(buckets[c])) for c in sorted(buckets))

    @property
    def colors(self) -> int:
        return len(self.layers)

    @classmethod
    def from_layers(cls, mode: Mode, layers: Iterable[Iterable[int]]) -> Schedule:
        coloring: dict[int, int] = {}
        for index, layer in enumerate(layers):
            for interaction_id in layer:
                if interaction_id in coloring:
                    raise ScheduleFormatError(f"Interaction {interaction_id} appears in two layers")
                coloring[interaction_id] = index
        return cls(mode=mode, coloring=coloring)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "colors": self.colors,
            "layers": [list(layer) for layer in self.layers],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Schedule:
        try:
            layers = [[int(i) for i in layer] for layer in data["layers"]]
            schedule = cls.from_layers(data["mode"], layers)
        except (KeyError, TypeError, ValueError) as e:
            raise ScheduleFormatError(f"Malformed schedule: {e}")
        if any(not layer for layer in layers):
            raise ScheduleFormatError("Schedule contains an empty layer")
        declared = data.get("colors")
        if declared is not None and int(declared) != schedule.colors:
            raise ScheduleFormatError(
                f"Schedule declares {declared} colors but lists {schedule.colors} layers"
            )
        return schedule


PathLookup = PathSet | Mapping[int, Sequence[Path]]


def _build(
    interactions: Sequence[Interaction],
    footprint: Callable[[Interaction], frozenset[int]],
    mode: Mode,
) -> ConflictGraph:
    sets = [(term.id, footprint(term)) for term in interactions]
    g = nx.Graph()
    g.add_nodes_from(term_id for term_id, _ in sets)
    for i, (a, sa) in enumerate(sets):
        for b, sb in sets[i + 1:]:
            if not sa.isdisjoint(sb):
                g.add_edge(a, b)
    logger.debug(f"Built {mode} conflict graph: {g.number_of_nodes()} vertices, {g.number_of_edges()} edges")
    return ConflictGraph(graph=g, mode=mode)


def _lookup(paths: PathLookup, term: Interaction) -> Sequence[Path] | None:
    found = paths.get(term.id)
    return None if found is None else tuple(found)


def build_weak(
    g: SystemGraph, interactions: Sequence[Interaction], paths: PathLookup
) -> ConflictGraph:
    """Edge iff the vertex sets (paths plus vertex-operator targets) intersect.

    Raises:
        MissingPathError: a pair of some interaction has no path
    """
    def footprint(term: Interaction) -> frozenset[int]:
        return interaction_vertices(term, checked_paths(term, _lookup(paths, term)))

    return _build(interactions, footprint, "weak")


def build_strong(
    g: SystemGraph, interactions: Sequence[Interaction], paths: PathLookup
) -> ConflictGraph:
    """Edge iff the encoded qubit supports intersect.

    Raises:
        MissingPathError: a pair of some interaction has no path
        EnumerationUnsetError: an edge on some path has no index
    """

    def footprint(term: Interaction) -> frozenset[int]:
        return interaction_support(g, term, _lookup(paths, term))

    return _build(interactions, footprint, "strong")


def build_conflict_graph(
    mode: Mode, g: SystemGraph, interactions: Sequence[Interaction], paths: PathLookup
) -> ConflictGraph:
    builder = build_weak if mode == "weak" else build_strong
    return builder(g, interactions, paths)


def greedy_color(cg: ConflictGraph, vertex_order: Sequence[int]) -> Schedule:
    """Give each vertex, in order, the smallest color unused by its colored neighbors.

    Raises:
        InvalidOrderError: ``vertex_order`` is not a permutation of the vertices
    """
    if len(vertex_order) != cg.graph.number_of_nodes() or set(vertex_order) != set(cg.graph.nodes):
        raise InvalidOrderError(
            f"Order of length {len(vertex_order)} is not a permutation of "
            f"{cg.graph.number_of_nodes()} conflict-graph vertices"
        )

    def strategy(graph: nx.Graph, colors: Mapping[int, int]) -> Iterator[int]:
        return iter(vertex_order)

    coloring = nx.coloring.greedy_color(cg.graph, strategy=strategy)
    return Schedule(mode=cg.mode, coloring=dict(coloring))


def largest_first_order(cg: ConflictGraph, seed: int) -> list[int]:
    """Vertices by descending degree; equal degrees appear in a seeded random order."""
    order = cg.vertices
    random.Random(seed).shuffle(order)
    order.sort(key=lambda v: -cg.degree(v))
    return order


def blocked_order(cg: ConflictGraph, blocks: Sequence[Sequence[int]], seed: int) -> list[int]:
    """Block after block, each largest-first with seeded ties; unblocked vertices last.

    Greedy coloring in this order uses at most one color per block when every
    block is independent in ``cg``.
    """
    rng = random.Random(seed)
    placed: set[int] = set()
    order: list[int] = []
    for block in blocks:
        members = [v for v in block if cg.graph.has_node(v) and v not in placed]
        rng.shuffle(members)
        members.sort(key=lambda v: -cg.degree(v))
        order.extend(members)
        placed.update(members)
    rest = [v for v in cg.vertices if v not in placed]
    rng.shuffle(rest)
    rest.sort(key=lambda v: -cg.degree(v))
    return order + rest


def _round_robin(size: int) -> list[list[tuple[int, int]]]:
    """Perfect matchings of K_size (size even) covering every edge once."""
    if size < 2:
        return []
    odd = size - 1
    rounds: list[list[tuple[int, int]]] = []
    for r in range(odd):
        matching = [(odd, r)]
        matching.extend(((r + k) % odd, (r - k) % odd) for k in range(1, size // 2))
        rounds.append(matching)
    return rounds


def bottleneck_layers(layout: BottleneckLayout, interactions: Sequence[Interaction]) -> list[list[int]]:
    """
    Parallel layers for hopping terms on a bottleneck graph.

    Crossing terms from one side are shifted matchings onto the other side,
    ``half`` layers per direction. Terms inside the halves follow a
    round-robin matching of each half, run in both directions with both halves
    side by side. One more layer holds the single-target vertex terms. For the
    all-to-all model that is ``2N - 1`` layers, each free of strong conflicts
    under matched-middle routing and the parity center enumeration.

    Terms that fit no layer (several pairs, or vertex operators off their own
    endpoints) are left out for the caller to order.
    """
    half = layout.half
    by_pair: dict[tuple[int, int], list[int]] = {}
    singles: dict[int, int] = {}
    for term in interactions:
        if len(term.pairs) == 1 and term.b_targets <= term.endpoints:
            by_pair.setdefault(term.pairs[0], []).append(term.id)
        elif not term.pairs and len(term.b_targets) == 1:
            (target,) = term.b_targets
            singles.setdefault(target, term.id)

    def layer(arcs: Iterable[tuple[int, int]]) -> list[int]:
        ids = []
        for arc in arcs:
            ids.extend(by_pair.get(arc, [])[:1])
        return ids

    t1, t2 = layout.halves
    arc_lists: list[list[tuple[int, int]]] = []
    for shift in range(half):
        arc_lists.append([(t1[a], t2[(a + shift) % half]) for a in range(half)])
        arc_lists.append([(t2[a], t1[(a + shift) % half]) for a in range(half)])
    for matching in _round_robin(half):
        arc_lists.append([(side[x], side[y]) for side in (t1, t2) for x, y in matching])
        arc_lists.append([(side[y], side[x]) for side in (t1, t2) for x, y in matching])

    layers = [layer(arcs) for arcs in arc_lists]
    layers.append(list(singles.values()))
    return [ids for ids in layers if ids]


def greedy_clique(cg: ConflictGraph, max_seeds: int | None = None) -> list[int]:
    """Largest clique found by growing from each seed vertex.

    Seeds are tried in descending degree order; each step adds the candidate
    with the largest degree (smallest id on ties) and keeps only its neighbors.
    """
    seeds = sorted(cg.vertices, key=lambda v: (-cg.degree(v), v))
    if max_seeds is not None:
        seeds = seeds[:max_seeds]
    best: list[int] = []
    for seed in seeds:
        clique = [seed]
        candidates = cg.neighbors(seed)
        while candidates:
            pick = min(candidates, key=lambda v: (-cg.degree(v), v))
            clique.append(pick)
            candidates &= cg.neighbors(pick)
        if len(clique) > len(best):
            best = clique
    return best


def clique_lower_bound(cg: ConflictGraph, max_seeds: int | None = None) -> int:
    """Size of a greedily grown clique; never exceeds the chromatic number."""
    return len(greedy_clique(cg, max_seeds))


def max_degree_bound(cg: ConflictGraph) -> int:
    """maxdeg + 1, the bound every greedy order meets."""
    if cg.graph.number_of_nodes() == 0:
        return 0
    return cg.max_degree() + 1


def brooks_bound(cg: ConflictGraph) -> int:
    """Brooks bound, per connected component.

    A component has chromatic number at most its max degree unless it is
    complete or an odd cycle, where one more color is needed.
    """
    bound = 0
    for nodes in nx.connected_components(cg.graph):
        component = cg.graph.subgraph(nodes)
        n = component.number_of_nodes()
        delta = max((d for _, d in component.degree), default=0)
        complete = component.number_of_edges() == n * (n - 1) // 2
        odd_cycle = n % 2 == 1 and n >= 3 and all(d == 2 for _, d in component.degree)
        bound = max(bound, delta + 1 if complete or odd_cycle else delta)
    return bound


def exact_chromatic(cg: ConflictGraph, size_cap: int = DEFAULT_SIZE_CAP) -> int:
    """
    Exact chromatic number by DSATUR branch and bound.

    A greedy clique is precolored (its size is the lower bound) and a
    largest-first greedy coloring supplies the initial upper bound.

    Raises:
        TooLargeError: more than ``size_cap`` vertices
    """
    n = cg.graph.number_of_nodes()
    if n > size_cap:
        raise TooLargeError(f"Conflict graph has {n} vertices, exact oracle cap is {size_cap}")
    if n == 0:
        return 0

    nodes = cg.vertices
    index = {v: i for i, v in enumerate(nodes)}
    adjacency = [{index[w] for w in cg.graph.neighbors(v)} for v in nodes]

    clique = [index[v] for v in greedy_clique(cg)]
    lower = len(clique)
    best = greedy_color(cg, largest_first_order(cg, seed=0)).colors
    if best == lower:
        return best

    color = [-1] * n
    for c, v in enumerate(clique):
        color[v] = c

    def pick_vertex() -> int:
        chosen, key = -1, (-1, -1)
        for v in range(n):
            if color[v] != -1:
                continue
            saturation = len({color[w] for w in adjacency[v] if color[w] != -1})
            uncolored_degree = sum(1 for w in adjacency[v] if color[w] == -1)
            if (saturation, uncolored_degree) > key:
                chosen, key = v, (saturation, uncolored_degree)
        return chosen

    def search(colored: int, used: int) -> None:
        nonlocal best
        if used >= best:
            return
        if colored == n:
            best = used
            return
        v = pick_vertex()
        blocked = {color[w] for w in adjacency[v]}
        for c in range(min(used + 1, best - 1)):
            if c in blocked:
                continue
            color[v] = c
            search(colored + 1, max(used, c + 1))
            color[v] = -1
            if best == lower:
                return

    search(len(clique), lower)
    return best
