"""
Interaction routing and greedy edge enumeration.

``route`` assigns every endpoint pair of every interaction a path through the
system graph with a penalty-weighted Dijkstra search, visiting interactions in
a seeded random order and making each used edge more expensive for the rest of
the run. ``greedy_enumerate`` then orders the edges at each vertex so paths
routed early land on low, shared-qubit-free Majorana indices.
``bottleneck_routes`` is the fixed alternative for the bottleneck graph with
its parity enumeration.
"""

from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .config import RoutingParams
from .system_graph import SystemGraph, bottleneck_layout, default_enumeration, set_enumeration

logger = logging.getLogger(__name__)

Path = tuple[int, ...]


class RoutingError(Exception):
    """Base exception for routing errors."""
    pass


class UnreachableEndpointError(RoutingError):
    """Raised when no path joins an endpoint pair."""
    pass


class NonPhysicalEndpointError(RoutingError):
    """Raised when an interaction names a vertex that does not host a mode."""
    pass


class InvalidInteractionError(RoutingError):
    """Raised when an interaction is malformed."""
    pass


class PathFormatError(RoutingError):
    """Raised when a path set is malformed or does not fit its graph."""
    pass


@dataclass(frozen=True)
class Interaction:
    """One Hamiltonian term.

    ``pairs`` are the endpoint pairs that need a path (empty for a bare vertex
    operator, two or more for k-body terms); ``b_targets`` carry a vertex
    operator. The hopping term A_uv B_v is ``pairs=((u, v),)``,
    ``b_targets={v}``.
    """

    id: int
    pairs: tuple[tuple[int, int], ...] = ()
    b_targets: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple((int(u), int(v)) for u, v in self.pairs))
        object.__setattr__(self, "b_targets", frozenset(self.b_targets))
        self._validate_fields()

    def _validate_fields(self) -> None:
        if not self.pairs and not self.b_targets:
            raise InvalidInteractionError(f"Interaction {self.id} has no pairs and no vertex operators")
        for u, v in self.pairs:
            if u == v:
                raise InvalidInteractionError(f"Interaction {self.id} pairs vertex {u} with itself")

    @property
    def endpoints(self) -> frozenset[int]:
        return frozenset(x for pair in self.pairs for x in pair)

    @property
    def label(self) -> str:
        parts = [f"A({u},{v})" for u, v in self.pairs]
        parts.extend(f"B({v})" for v in sorted(self.b_targets))
        return "".join(parts)

    def relabeled(self, mapping: Mapping[int, int]) -> Interaction:
        """The same term with every vertex id passed through ``mapping``."""
        return Interaction(
            id=self.id,
            pairs=tuple((mapping[u], mapping[v]) for u, v in self.pairs),
            b_targets=frozenset(mapping[v] for v in self.b_targets),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "pairs": [[u, v] for u, v in self.pairs],
            "b_targets": sorted(self.b_targets),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], default_id: int = 0) -> Interaction:
        try:
            return cls(
                id=int(data.get("id", default_id)),
                pairs=tuple((int(u), int(v)) for u, v in data.get("pairs", [])),
                b_targets=frozenset(int(v) for v in data.get("b_targets", [])),
            )
        except (TypeError, ValueError) as e:
            raise InvalidInteractionError(f"Malformed interaction data {dict(data)!r}: {e}")


@dataclass(frozen=True)
class PathSet:
    """Paths per interaction id, one per endpoint pair, kept in routed order."""

    paths: Mapping[int, tuple[Path, ...]] = field(default_factory=dict)

    def __getitem__(self, interaction_id: int) -> tuple[Path, ...]:
        return self.paths[interaction_id]

    def __contains__(self, interaction_id: object) -> bool:
        return interaction_id in self.paths

    def __len__(self) -> int:
        return len(self.paths)

    def get(self, interaction_id: int) -> tuple[Path, ...] | None:
        return self.paths.get(interaction_id)

    @property
    def routed_order(self) -> list[int]:
        return list(self.paths)

    def all_paths(self) -> list[Path]:
        """Every path, in routed order."""
        return [p for paths in self.paths.values() for p in paths]

    def mean_path_length(self) -> float:
        """Mean number of edges per path; 0.0 when no interaction needs a path."""
        lengths = [len(p) - 1 for p in self.all_paths()]
        return sum(lengths) / len(lengths) if lengths else 0.0

    def validate(self, g: SystemGraph, interactions: Iterable[Interaction]) -> None:
        """Check every pair has a simple path on ``g`` with matching endpoints.

        Raises:
            PathFormatError: on the first violation
        """
        for term in interactions:
            paths = self.paths.get(term.id)
            if paths is None:
                if term.pairs:
                    raise PathFormatError(f"No paths for interaction {term.id}")
                continue
            if len(paths) != len(term.pairs):
                raise PathFormatError(
                    f"Interaction {term.id} has {len(term.pairs)} pairs but {len(paths)} paths"
                )
            for (u, v), path in zip(term.pairs, paths):
                if path[0] != u or path[-1] != v:
                    raise PathFormatError(
                        f"Path {list(path)} of interaction {term.id} does not join {u} and {v}"
                    )
                if len(set(path)) != len(path):
                    raise PathFormatError(f"Path {list(path)} repeats a vertex")
                for a, b in zip(path, path[1:]):
                    if not g.has_edge(a, b):
                        raise PathFormatError(f"Path {list(path)} uses non-edge ({a}, {b})")

    def to_dict(self) -> dict[int, list[list[int]]]:
        return {i: [list(p) for p in paths] for i, paths in self.paths.items()}

    @classmethod
    def from_dict(cls, data: Mapping[Any, Any]) -> PathSet:
        try:
            return cls(
                paths={
                    int(i): tuple(tuple(int(v) for v in p) for p in paths)
                    for i, paths in data.items()
                }
            )
        except (TypeError, ValueError, AttributeError) as e:
            raise PathFormatError(f"Malformed path set: {e}")


def interaction_vertices(interaction: Interaction, paths: Sequence[Path]) -> frozenset[int]:
    """Vertex set used by the weak conflict rule: path vertices plus vertex-operator targets."""
    vertices = set(interaction.b_targets)
    for p in paths:
        vertices.update(p)
    return frozenset(vertices)


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def initial_weights(g: SystemGraph, params: RoutingParams) -> dict[tuple[int, int], float]:
    """Base weight plus the physical penalty once per physical endpoint."""
    weights: dict[tuple[int, int], float] = {}
    for u, v in sorted(g.edges):
        physical_ends = int(g.is_physical(u)) + int(g.is_physical(v))
        weights[(u, v)] = params.base_weight + params.phys_penalty * physical_ends
    return weights


def shortest_path(
    g: SystemGraph, weights: Mapping[tuple[int, int], float], source: int, target: int
) -> Path:
    """Dijkstra over ``weights``; equal distances prefer the smaller predecessor id.

    Raises:
        UnreachableEndpointError: if ``target`` cannot be reached
    """
    dist: dict[int, float] = {source: 0.0}
    pred: dict[int, int] = {}
    done: set[int] = set()
    frontier: list[tuple[float, int]] = [(0.0, source)]

    while frontier:
        d, node = heapq.heappop(frontier)
        if node in done:
            continue
        done.add(node)
        if node == target:
            break
        for nxt in g.neighbors(node):
            if nxt in done:
                continue
            candidate = d + weights[_edge_key(node, nxt)]
            best = dist.get(nxt, math.inf)
            if candidate < best:
                dist[nxt] = candidate
                pred[nxt] = node
                heapq.heappush(frontier, (candidate, nxt))
            elif candidate == best and node < pred[nxt]:
                pred[nxt] = node

    if target not in done:
        raise UnreachableEndpointError(f"No path from {source} to {target}")

    path = [target]
    while path[-1] != source:
        path.append(pred[path[-1]])
    return tuple(reversed(path))


def _check_physical(g: SystemGraph, interactions: Sequence[Interaction]) -> None:
    for term in interactions:
        for v in sorted(term.endpoints | term.b_targets):
            if not g.is_physical(v):
                raise NonPhysicalEndpointError(
                    f"Interaction {term.id} ({term.label}) uses non-physical vertex {v}"
                )


def route(
    g: SystemGraph, interactions: Sequence[Interaction], params: RoutingParams
) -> PathSet:
    """
    Route every endpoint pair in a seeded random interaction order.

    Args:
        g: system graph
        interactions: terms whose endpoints and vertex-operator targets are physical
        params: edge weights and the shuffle seed

    Returns:
        PathSet in routed order; pairs of a k-body term are routed as listed

    Raises:
        NonPhysicalEndpointError: an endpoint or target is not a physical vertex
        UnreachableEndpointError: only on a disconnected graph
    """
    _check_physical(g, interactions)

    order = list(interactions)
    random.Random(params.seed).shuffle(order)
    weights = initial_weights(g, params)

    routed: dict[int, tuple[Path, ...]] = {}
    for term in order:
        if not term.pairs:
            continue
        term_paths: list[Path] = []
        for u, v in term.pairs:
            path = shortest_path(g, weights, u, v)
            for a, b in zip(path, path[1:]):
                weights[_edge_key(a, b)] += params.used_increment
            term_paths.append(path)
        routed[term.id] = tuple(term_paths)

    result = PathSet(paths=routed)
    logger.debug(
        f"Routed {len(routed)} interactions on {g.name or 'graph'} with seed {params.seed}, "
        f"mean path length {result.mean_path_length():.3f}"
    )
    return result


def bottleneck_routes(g: SystemGraph, interactions: Sequence[Interaction]) -> PathSet:
    """
    Route on a bottleneck graph through matched middles.

    A pair inside one half takes its clique edge. A pair crossing the center
    from position ``a`` of its own half goes through middle ``a`` of its own
    side, the center and middle ``a`` of the far side, so with the parity
    enumeration at the center it activates the single center qubit ``a + 1``.

    Raises:
        NonPhysicalEndpointError: an endpoint or target is not a physical vertex
        BadSizeError: ``g`` is not a bottleneck graph
    """
    _check_physical(g, interactions)
    layout = bottleneck_layout(g)

    def path_for(u: int, v: int) -> Path:
        side_u, pos_u = layout.side_of(u)  # type: ignore[misc]
        side_v, _ = layout.side_of(v)  # type: ignore[misc]
        if side_u == side_v:
            return (u, v)
        return (u, layout.middles[side_u][pos_u], layout.center, layout.middles[side_v][pos_u], v)

    routed = {
        term.id: tuple(path_for(u, v) for u, v in term.pairs)
        for term in interactions
        if term.pairs
    }
    result = PathSet(paths=routed)
    logger.debug(
        f"Routed {len(routed)} interactions through matched middles on {g.name or 'graph'}, "
        f"mean path length {result.mean_path_length():.3f}"
    )
    return result


def greedy_enumerate(g: SystemGraph, paths_in_order: Iterable[Path]) -> SystemGraph:
    """
    Enumerate vertex edges along routed paths, then fill the rest ascending.

    Preset indices are kept. For each path vertex whose path edges are still
    unenumerated: the start takes the smallest free index for its out-edge,
    an interior vertex takes the smallest free index for its in-edge and the
    next smallest for its out-edge, the end takes the largest free index for
    its in-edge.

    Returns:
        ``g`` with a full enumeration
    """
    assigned: dict[int, dict[int, int]] = {u: dict(a) for u, a in g.enumeration.items()}

    def free(u: int) -> list[int]:
        used = set(assigned.get(u, {}).values())
        return [i for i in range(1, g.degree(u) + 1) if i not in used]

    def take(u: int, v: int, largest: bool = False) -> None:
        slots = assigned.setdefault(u, {})
        if v in slots:
            return
        available = free(u)
        slots[v] = available[-1] if largest else available[0]

    for path in paths_in_order:
        last = len(path) - 1
        for i, w in enumerate(path):
            if i == 0:
                take(w, path[1])
            elif i == last:
                take(w, path[i - 1], largest=True)
            else:
                take(w, path[i - 1])
                take(w, path[i + 1])

    return default_enumeration(set_enumeration(g, assigned))
