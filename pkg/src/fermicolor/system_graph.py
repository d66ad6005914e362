"""
System graphs: typed vertices, oriented edges, edge enumeration and qubit layout.

A system graph fixes a custom fermion-to-qubit encoding. Every vertex holds
``ceil(d/2)`` qubits, every edge carries an orientation (head = larger vertex
id) and every vertex orders its incident edges with an enumeration
``xi_u: neighbors(u) -> {1..d(u)}`` that may be partial until routing fills it.

Graphs are immutable; ``set_enumeration``, ``default_enumeration`` and
``with_kinds`` return new instances.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Any, Iterable, Literal, Mapping, cast

import networkx as nx
import yaml

logger = logging.getLogger(__name__)

VertexKind = Literal["physical", "virtual"]

VERTEX_KINDS: tuple[VertexKind, ...] = ("physical", "virtual")


class SystemGraphError(Exception):
    """Base exception for system graph errors."""
    pass


class DisconnectedGraphError(SystemGraphError):
    """Raised when the vertex set does not form one connected component."""
    pass


class DuplicateEdgeError(SystemGraphError):
    """Raised when an edge is listed more than once."""
    pass


class SelfLoopError(SystemGraphError):
    """Raised when an edge joins a vertex to itself."""
    pass


class UnknownVertexError(SystemGraphError):
    """Raised when an edge or assignment names a vertex that does not exist."""
    pass


class BadSizeError(SystemGraphError):
    """Raised when a generator or analytic formula gets an unsupported size."""
    pass


class NotABijectionError(SystemGraphError):
    """Raised when an edge enumeration is not a partial bijection onto 1..d(u)."""
    pass


class GraphFormatError(SystemGraphError):
    """Raised when a serialized graph is malformed."""
    pass


@dataclass(frozen=True)
class QubitLayout:
    """Qubit counts per vertex and the vertex-major global id assignment."""

    counts: Mapping[int, int]
    offsets: Mapping[int, int]

    @classmethod
    def for_degrees(cls, degrees: Mapping[int, int]) -> QubitLayout:
        counts: dict[int, int] = {}
        offsets: dict[int, int] = {}
        next_id = 0
        for v in sorted(degrees):
            counts[v] = math.ceil(degrees[v] / 2)
            offsets[v] = next_id
            next_id += counts[v]
        return cls(counts=counts, offsets=offsets)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def qubit(self, v: int, j: int) -> int:
        """Global id of internal qubit ``j`` (1-based) of vertex ``v``."""
        if not 1 <= j <= self.counts[v]:
            raise IndexError(f"Vertex {v} has {self.counts[v]} qubits, no qubit {j}")
        return self.offsets[v] + j - 1

    def qubits_of(self, v: int) -> range:
        return range(self.offsets[v], self.offsets[v] + self.counts[v])

    def owner(self, qubit: int) -> tuple[int, int]:
        """Inverse of :meth:`qubit`: ``(vertex, internal index)``."""
        for v, start in self.offsets.items():
            if start <= qubit < start + self.counts[v]:
                return v, qubit - start + 1
        raise IndexError(f"Qubit {qubit} is outside the layout")


@dataclass(frozen=True)
class SystemGraph:
    """Validated, connected, simple system graph.

    ``enumeration[u][v]`` is the index of neighbor ``v`` in the edge order of
    ``u``; vertices without an entry are unenumerated. ``lattice`` optionally
    ships a locality-preserving square-lattice placement (rows of vertex ids).
    """

    kinds: Mapping[int, VertexKind]
    edges: frozenset[tuple[int, int]]
    enumeration: Mapping[int, Mapping[int, int]] = field(default_factory=dict)
    name: str = ""
    lattice: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        self._validate_fields()

    def _validate_fields(self) -> None:
        if not self.kinds:
            raise BadSizeError("A system graph needs at least one vertex")
        for v, kind in self.kinds.items():
            if kind not in VERTEX_KINDS:
                raise GraphFormatError(f"Vertex {v} has unknown kind {kind!r}")
        for u, v in self.edges:
            if u == v:
                raise SelfLoopError(f"Self-loop on vertex {u}")
            for end in (u, v):
                if end not in self.kinds:
                    raise UnknownVertexError(f"Edge ({u}, {v}) names unknown vertex {end}")
        if not nx.is_connected(self.graph):
            components = nx.number_connected_components(self.graph)
            raise DisconnectedGraphError(
                f"System graph has {components} connected components, expected 1"
            )
        for u, assigned in self.enumeration.items():
            _check_partial_bijection(self, u, assigned)
        if self.lattice is not None:
            for row in self.lattice:
                for v in row:
                    if v not in self.kinds:
                        raise UnknownVertexError(f"Lattice placement names unknown vertex {v}")

    @cached_property
    def graph(self) -> nx.Graph:
        """Read-only networkx view used for connectivity and neighbor queries."""
        g = nx.Graph()
        g.add_nodes_from(sorted(self.kinds))
        g.add_edges_from(sorted(self.edges))
        return nx.freeze(g)

    @cached_property
    def layout(self) -> QubitLayout:
        return QubitLayout.for_degrees({v: self.graph.degree(v) for v in self.kinds})

    @property
    def vertices(self) -> list[int]:
        return sorted(self.kinds)

    @property
    def physical_vertices(self) -> list[int]:
        return [v for v in self.vertices if self.kinds[v] == "physical"]

    @property
    def virtual_vertices(self) -> list[int]:
        return [v for v in self.vertices if self.kinds[v] == "virtual"]

    def is_physical(self, v: int) -> bool:
        return self.kinds.get(v) == "physical"

    def neighbors(self, u: int) -> list[int]:
        return sorted(self.graph.neighbors(u))

    def degree(self, u: int) -> int:
        return int(self.graph.degree(u))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.graph.has_edge(u, v))

    def n_qubits(self, v: int) -> int:
        return self.layout.counts[v]

    def head(self, u: int, v: int) -> int:
        """Designated head of edge (u, v): the endpoint with the larger id."""
        return max(u, v)

    def orientation(self, u: int, v: int) -> int:
        """Sign of the edge operator A_uv: +1 when ``u`` is the head, else -1."""
        return 1 if self.head(u, v) == u else -1

    def enumeration_index(self, u: int, v: int) -> int | None:
        return self.enumeration.get(u, {}).get(v)

    def is_enumerated(self, u: int | None = None) -> bool:
        """True when every edge of ``u`` (or of every vertex) has an index."""
        targets = [u] if u is not None else self.vertices
        return all(len(self.enumeration.get(w, {})) == self.degree(w) for w in targets)

    def to_dict(self) -> dict[str, Any]:
        """Graph file representation; partial enumerations keep ``None`` slots."""
        data: dict[str, Any] = {}
        if self.name:
            data["name"] = self.name
        data["vertices"] = [{"id": v, "kind": self.kinds[v]} for v in self.vertices]
        data["edges"] = [[u, v] for u, v in sorted(self.edges)]
        enumeration: dict[int, list[int | None]] = {}
        for u in self.vertices:
            assigned = self.enumeration.get(u)
            if not assigned:
                continue
            slots: list[int | None] = [None] * self.degree(u)
            for v, index in assigned.items():
                slots[index - 1] = v
            enumeration[u] = slots
        if enumeration:
            data["enumeration"] = enumeration
        if self.lattice is not None:
            data["lattice"] = [list(row) for row in self.lattice]
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SystemGraph:
        try:
            vertices = [(int(entry["id"]), entry["kind"]) for entry in data["vertices"]]
            edges = [(int(u), int(v)) for u, v in data.get("edges", [])]
            enumeration: dict[int, dict[int, int]] = {}
            for u, slots in (data.get("enumeration") or {}).items():
                enumeration[int(u)] = {
                    int(v): i for i, v in enumerate(slots, start=1) if v is not None
                }
            lattice = data.get("lattice")
        except (KeyError, TypeError, ValueError) as e:
            raise GraphFormatError(f"Malformed graph data: {e}")
        g = build(vertices, edges, enumeration, name=str(data.get("name", "")))
        if lattice is not None:
            g = _replace(g, lattice=tuple(tuple(int(v) for v in row) for row in lattice))
        return g


def _check_partial_bijection(g: SystemGraph, u: int, assigned: Mapping[int, int]) -> None:
    if u not in g.kinds:
        raise UnknownVertexError(f"Enumeration given for unknown vertex {u}")
    d = g.degree(u)
    seen: dict[int, int] = {}
    for v, index in assigned.items():
        if not g.has_edge(u, v):
            raise NotABijectionError(f"Vertex {v} is not a neighbor of {u}")
        if not 1 <= index <= d:
            raise NotABijectionError(f"Index {index} at vertex {u} is outside 1..{d}")
        if index in seen:
            raise NotABijectionError(
                f"Index {index} at vertex {u} assigned to both {seen[index]} and {v}"
            )
        seen[index] = v


def build(
    vertices: Iterable[tuple[int, VertexKind]],
    edges: Iterable[tuple[int, int]],
    enumeration: Mapping[int, Mapping[int, int]] | None = None,
    name: str = "",
) -> SystemGraph:
    """Validate and build a system graph.

    Args:
        vertices: ``(id, kind)`` pairs, kind ``"physical"`` or ``"virtual"``
        edges: undirected ``(u, v)`` pairs
        enumeration: optional preset (possibly partial) edge enumeration
        name: label used in logs and files

    Returns:
        The validated graph, default orientation, enumeration as given

    Raises:
        BadSizeError: no vertices
        GraphFormatError: duplicate vertex id or unknown kind
        SelfLoopError, DuplicateEdgeError, UnknownVertexError: bad edge list
        DisconnectedGraphError: more than one connected component
        NotABijectionError: preset enumeration is inconsistent
    """
    kinds: dict[int, VertexKind] = {}
    for v, kind in vertices:
        if v in kinds:
            raise GraphFormatError(f"Duplicate vertex id {v}")
        kinds[v] = kind
    normalized: set[tuple[int, int]] = set()
    for u, v in edges:
        if u == v:
            raise SelfLoopError(f"Self-loop on vertex {u}")
        key = (min(u, v), max(u, v))
        if key in normalized:
            raise DuplicateEdgeError(f"Edge ({u}, {v}) listed more than once")
        normalized.add(key)
    g = SystemGraph(
        kinds=dict(sorted(kinds.items())),
        edges=frozenset(normalized),
        enumeration={u: dict(a) for u, a in (enumeration or {}).items() if a},
        name=name,
    )
    logger.debug(
        f"Built system graph {name or '<unnamed>'}: {len(kinds)} vertices, "
        f"{len(normalized)} edges, {g.layout.total} qubits"
    )
    return g


def qubit_count(g: SystemGraph) -> int:
    """Total qubits: sum over vertices of ceil(d(v)/2)."""
    return g.layout.total


def _replace(g: SystemGraph, **changes: Any) -> SystemGraph:
    fields = {
        "kinds": g.kinds,
        "edges": g.edges,
        "enumeration": g.enumeration,
        "name": g.name,
        "lattice": g.lattice,
    }
    fields.update(changes)
    return SystemGraph(**fields)


def set_enumeration(
    g: SystemGraph, assignments: Mapping[int, Mapping[int, int]]
) -> SystemGraph:
    """Return ``g`` with explicit indices merged over its current enumeration.

    An assignment for neighbor ``v`` at ``u`` replaces any previous index of
    ``v``; the merged result must still be a partial bijection.

    Raises:
        NotABijectionError: duplicate index, out-of-range index or non-neighbor
    """
    merged: dict[int, dict[int, int]] = {u: dict(a) for u, a in g.enumeration.items()}
    for u, assigned in assignments.items():
        if u not in g.kinds:
            raise UnknownVertexError(f"Enumeration given for unknown vertex {u}")
        current = merged.setdefault(u, {})
        current.update(assigned)
    return _replace(g, enumeration={u: a for u, a in merged.items() if a})


def default_enumeration(g: SystemGraph) -> SystemGraph:
    """Fill every unset slot: unassigned neighbors ascending take the smallest free indices."""
    filled: dict[int, dict[int, int]] = {}
    for u in g.vertices:
        assigned = dict(g.enumeration.get(u, {}))
        free = sorted(set(range(1, g.degree(u) + 1)) - set(assigned.values()))
        pending = [v for v in g.neighbors(u) if v not in assigned]
        for v, index in zip(pending, free):
            assigned[v] = index
        if assigned:
            filled[u] = assigned
    return _replace(g, enumeration=filled)


def with_kinds(g: SystemGraph, physical: Iterable[int]) -> SystemGraph:
    """Relabel so exactly ``physical`` are physical; adjacency and enumeration are kept."""
    chosen = set(physical)
    unknown = chosen - set(g.kinds)
    if unknown:
        raise UnknownVertexError(f"Unknown vertices {sorted(unknown)}")
    kinds: dict[int, VertexKind] = {
        v: ("physical" if v in chosen else "virtual") for v in g.vertices
    }
    return _replace(g, kinds=kinds)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise BadSizeError(message)


def gen_star(n: int) -> SystemGraph:
    """Star S_N: physical leaves 0..N-1 around virtual hub N."""
    _require(n >= 2, f"Star graph needs N >= 2, got {n}")
    vertices: list[tuple[int, VertexKind]] = [(v, "physical") for v in range(n)]
    vertices.append((n, "virtual"))
    return build(vertices, [(v, n) for v in range(n)], name=f"star:{n}")


def gen_complete(n: int) -> SystemGraph:
    _require(n >= 2, f"Complete graph needs N >= 2, got {n}")
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return build([(v, "physical") for v in range(n)], edges, name=f"complete:{n}")


def gen_line(n: int) -> SystemGraph:
    """Path of N physical vertices (the Jordan-Wigner limit)."""
    _require(n >= 2, f"Line graph needs N >= 2, got {n}")
    edges = [(v, v + 1) for v in range(n - 1)]
    return build([(v, "physical") for v in range(n)], edges, name=f"line:{n}")


def gen_grid(side: int) -> SystemGraph:
    """Open-boundary ``side x side`` square lattice, vertex ``r*side + c``."""
    _require(side >= 2, f"Grid needs L >= 2, got {side}")
    edges: list[tuple[int, int]] = []
    for r in range(side):
        for c in range(side):
            v = r * side + c
            if c + 1 < side:
                edges.append((v, v + 1))
            if r + 1 < side:
                edges.append((v, v + side))
    lattice = tuple(tuple(r * side + c for c in range(side)) for r in range(side))
    g = build([(v, "physical") for v in range(side * side)], edges, name=f"grid:{side}")
    return _replace(g, lattice=lattice)


def gen_bottleneck(n: int) -> SystemGraph:
    """Two physical K_{N/2} halves bridged through virtual middles and one center.

    Physical ``0..N-1`` (first half T1), T1 middles ``N..N+N/2-1``, T2 middles
    ``N+N/2..2N-1``, center ``2N``.
    """
    _require(n >= 4 and n % 4 == 0, f"Bottleneck graph needs N = 4m, got {n}")
    half = n // 2
    center = 2 * n
    halves = [list(range(0, half)), list(range(half, n))]
    middles = [list(range(n, n + half)), list(range(n + half, 2 * n))]
    edges: list[tuple[int, int]] = []
    for side in (0, 1):
        members = halves[side]
        edges.extend((u, v) for i, u in enumerate(members) for v in members[i + 1:])
        edges.extend((p, m) for m in middles[side] for p in members)
        edges.extend((m, center) for m in middles[side])
    vertices: list[tuple[int, VertexKind]] = [(v, "physical") for v in range(n)]
    vertices.extend((v, "virtual") for v in range(n, center + 1))
    return build(vertices, edges, name=f"bottleneck:{n}")


@dataclass(frozen=True)
class BottleneckLayout:
    """Vertex roles of a bottleneck graph.

    ``halves[s]`` lists the physical vertices of one side and
    ``middles[s]`` its virtual middles, both sorted; middle ``middles[s][a]``
    is the one matched to position ``a`` of either side.
    """

    center: int
    halves: tuple[tuple[int, ...], tuple[int, ...]]
    middles: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def half(self) -> int:
        return len(self.halves[0])

    def side_of(self, v: int) -> tuple[int, int] | None:
        """``(side, position)`` of a physical vertex, or None for the virtual core."""
        for side, members in enumerate(self.halves):
            if v in members:
                return side, members.index(v)
        return None


def bottleneck_layout(g: SystemGraph) -> BottleneckLayout:
    """Recover the halves, middles and center of a ``gen_bottleneck`` graph."""
    center = max(g.vertices)
    n = center // 2
    half = n // 2
    middles = (tuple(range(n, n + half)), tuple(range(n + half, 2 * n)))
    if (
        n < 4
        or g.degree(center) != n
        or not all(g.has_edge(m, center) for side in middles for m in side)
    ):
        raise BadSizeError(f"Graph {g.name or '<unnamed>'} is not a bottleneck graph")
    halves = tuple(
        tuple(sorted(set(g.neighbors(side[0])) - {center})) for side in middles
    )
    if any(len(members) != half for members in halves):
        raise BadSizeError(f"Graph {g.name or '<unnamed>'} is not a bottleneck graph")
    return BottleneckLayout(center=center, halves=halves, middles=middles)  # type: ignore[arg-type]


def bottleneck_enumeration(g: SystemGraph) -> SystemGraph:
    """Parity enumeration at the bottleneck center.

    The i-th T2 middle takes index ``2i-1`` and the i-th T1 middle takes
    ``2i``, so a path through the i-th middle of each side activates the
    single center qubit ``i``. Unmatched middles straddle two center qubits.
    Other vertices are left unset.
    """
    layout = bottleneck_layout(g)
    t1, t2 = layout.middles
    assignment = {m: 2 * i for i, m in enumerate(t1, start=1)}
    assignment.update({m: 2 * i - 1 for i, m in enumerate(t2, start=1)})
    return set_enumeration(g, {layout.center: assignment})


def gen_triangular(rows: int = 7, cols: int = 7) -> SystemGraph:
    """Triangular tiling patch: vertex ``r*cols + c`` joined right, down and down-right.

    Every vertex is physical-capable. The default 7x7 patch has 49 vertices,
    120 edges and 121 qubits (boundary vertices have degree below 6).
    """
    _require(rows >= 2 and cols >= 2, f"Triangular patch needs at least 2x2, got {rows}x{cols}")
    edges: list[tuple[int, int]] = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
                if c + 1 < cols:
                    edges.append((v, v + cols + 1))
    lattice = tuple(tuple(r * cols + c for c in range(cols)) for r in range(rows))
    g = build(
        [(v, "physical") for v in range(rows * cols)], edges, name=f"triangular:{rows}x{cols}"
    )
    return _replace(g, lattice=lattice)


def gen_heavy_hexagon() -> SystemGraph:
    """The shipped 49-vertex, 65-qubit heavy-hexagon instance."""
    text = resources.files("fermicolor").joinpath("data/heavy_hexagon.yaml").read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise GraphFormatError(f"Failed to parse shipped heavy-hexagon data: {e}")
    return SystemGraph.from_dict(cast(Mapping[str, Any], data))


GENERATORS: dict[str, Any] = {
    "star": gen_star,
    "complete": gen_complete,
    "line": gen_line,
    "grid": gen_grid,
    "bottleneck": gen_bottleneck,
    "heavy_hexagon": gen_heavy_hexagon,
    "triangular": gen_triangular,
}

SIZED_FAMILIES: frozenset[str] = frozenset({"star", "complete", "line", "grid", "bottleneck"})


def generate(family: str, size: int | None = None) -> SystemGraph:
    """Dispatch to a generator by family name."""
    if family not in GENERATORS:
        raise GraphFormatError(
            f"Unknown graph family {family!r}; expected one of {sorted(GENERATORS)}"
        )
    if family in SIZED_FAMILIES:
        if size is None:
            raise BadSizeError(f"Graph family {family!r} needs a size")
        return cast(SystemGraph, GENERATORS[family](size))
    if size is not None:
        logger.warning(f"Graph family {family!r} is fixed-size; ignoring size {size}")
    return cast(SystemGraph, GENERATORS[family]())

