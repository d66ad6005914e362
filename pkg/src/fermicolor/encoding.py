"""
Encoded operators as explicit Pauli strings, and the active-qubit rules.

Local Majoranas on a vertex use a Jordan-Wigner encoding of its internal
qubits: index ``2k-1`` is ``Z..Z X`` and ``2k`` is ``Z..Z Y`` with the X/Y on
internal qubit ``k``. Edge, vertex, path and loop operators are products of
these, so every rule below can be checked against ``fermicolor.pauli``.

The active-qubit rules give the support of a term without multiplying
strings. A path contributes one segment per vertex it visits (start, interior
or end); a vertex operator contributes a full-vertex segment. When a single
vertex carries several segments of the same term, their Majorana indices are
combined by exact parity instead of a plain union.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .pauli import PauliString, product, support
from .routing import Interaction, Path
from .system_graph import SystemGraph

logger = logging.getLogger(__name__)

SegmentTag = Literal["vertex_op", "start_a", "interior", "end_ab", "end_a"]


class EncodingError(Exception):
    """Base exception for encoding errors."""
    pass


class IndexOutOfRangeError(EncodingError):
    """Raised when a local Majorana index is outside 1..2n_v."""
    pass


class NotAnEdgeError(EncodingError):
    """Raised when an edge operator is requested for non-adjacent vertices."""
    pass


class InvalidPathError(EncodingError):
    """Raised when a vertex sequence is not a simple path of the graph."""
    pass


class NotACycleError(EncodingError):
    """Raised when a vertex sequence is not a simple cycle of the graph."""
    pass


class EdgeNotIncidentError(EncodingError):
    """Raised when a segment names an edge that does not touch its vertex."""
    pass


class MissingPathError(EncodingError):
    """Raised when an endpoint pair of an interaction has no assigned path."""
    pass


class EnumerationUnsetError(EncodingError):
    """Raised when an edge index is needed but the enumeration does not define it."""
    pass


@dataclass(frozen=True)
class Segment:
    """How one term touches one vertex.

    ``in_edge``/``out_edge`` are the neighbor ids of the incident path edges.
    """

    tag: SegmentTag
    in_edge: int | None = None
    out_edge: int | None = None

    def __post_init__(self) -> None:
        self._validate_fields()

    def _validate_fields(self) -> None:
        has_in = self.in_edge is not None
        has_out = self.out_edge is not None
        expected = {
            "vertex_op": (False, False),
            "start_a": (False, True),
            "end_a": (True, False),
            "end_ab": (True, False),
            "interior": (True, True),
        }
        if self.tag not in expected:
            raise EncodingError(f"Unknown segment tag {self.tag!r}")
        if (has_in, has_out) != expected[self.tag]:
            raise EncodingError(
                f"Segment {self.tag} takes in_edge={expected[self.tag][0]}, "
                f"out_edge={expected[self.tag][1]}"
            )
        if self.tag == "interior" and self.in_edge == self.out_edge:
            raise EncodingError("Interior segment needs two distinct edges")

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(x for x in (self.in_edge, self.out_edge) if x is not None)


def _check_vertex(g: SystemGraph, v: int) -> None:
    if v not in g.kinds:
        raise IndexOutOfRangeError(f"Vertex {v} is not in the graph")


def xi(g: SystemGraph, u: int, v: int) -> int:
    """Enumeration index of neighbor ``v`` at ``u``."""
    if not g.has_edge(u, v):
        raise NotAnEdgeError(f"({u}, {v}) is not an edge")
    index = g.enumeration_index(u, v)
    if index is None:
        raise EnumerationUnsetError(f"Edge ({u}, {v}) has no index at vertex {u}")
    return index


def a_index(g: SystemGraph, u: int, v: int) -> int:
    """ceil(xi_u(v) / 2): the internal qubit carrying the X/Y of that Majorana."""
    return math.ceil(xi(g, u, v) / 2)


def local_majorana(g: SystemGraph, v: int, j: int) -> PauliString:
    """Majorana ``j`` of vertex ``v`` on global qubit ids.

    Raises:
        IndexOutOfRangeError: ``j`` outside ``1..2 n_v``
    """
    _check_vertex(g, v)
    n = g.n_qubits(v)
    if not 1 <= j <= 2 * n:
        raise IndexOutOfRangeError(f"Majorana index {j} outside 1..{2 * n} at vertex {v}")
    k = math.ceil(j / 2)
    layout = g.layout
    letters: dict[int, str] = {layout.qubit(v, i): "Z" for i in range(1, k)}
    letters[layout.qubit(v, k)] = "X" if j % 2 == 1 else "Y"
    return PauliString.from_mapping(letters)  # type: ignore[arg-type]


def vertex_operator(g: SystemGraph, u: int) -> PauliString:
    """(-i)^n times the product of all 2n Majoranas of ``u``: Z on every qubit of ``u``."""
    _check_vertex(g, u)
    n = g.n_qubits(u)
    majoranas = product(local_majorana(g, u, j) for j in range(1, 2 * n + 1))
    return majoranas.scaled(-n)


def edge_operator(g: SystemGraph, u: int, v: int) -> PauliString:
    """eps_uv * gamma_u^{xi_u(v)} * gamma_v^{xi_v(u)}; antisymmetric in (u, v).

    Raises:
        NotAnEdgeError: u and v are not adjacent
        EnumerationUnsetError: either endpoint lacks an index for the edge
    """
    left = local_majorana(g, u, xi(g, u, v))
    right = local_majorana(g, v, xi(g, v, u))
    sign = 0 if g.orientation(u, v) == 1 else 2
    return (left * right).scaled(sign)


def _check_path(g: SystemGraph, path: Sequence[int]) -> None:
    if len(path) < 2:
        raise InvalidPathError(f"Path {list(path)} needs at least two vertices")
    if len(set(path)) != len(path):
        raise InvalidPathError(f"Path {list(path)} repeats a vertex")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise InvalidPathError(f"Path {list(path)} steps across non-edge ({a}, {b})")


def path_operator(g: SystemGraph, path: Sequence[int]) -> PauliString:
    """Ordered product of edge operators along ``path``."""
    _check_path(g, path)
    return product(edge_operator(g, a, b) for a, b in zip(path, path[1:]))


def _normalize_cycle(g: SystemGraph, cycle: Sequence[int]) -> list[int]:
    vertices = list(cycle)
    if len(vertices) > 1 and vertices[0] == vertices[-1]:
        vertices = vertices[:-1]
    if len(vertices) < 3:
        raise NotACycleError(f"Cycle {list(cycle)} needs at least three distinct vertices")
    if len(set(vertices)) != len(vertices):
        raise NotACycleError(f"Cycle {list(cycle)} repeats an interior vertex")
    for a, b in zip(vertices, vertices[1:] + vertices[:1]):
        if not g.has_edge(a, b):
            raise NotACycleError(f"Cycle {list(cycle)} steps across non-edge ({a}, {b})")
    return vertices


def loop_operator(g: SystemGraph, cycle: Sequence[int]) -> PauliString:
    """i^|C| times the product of edge operators around ``cycle``.

    The closing vertex may be repeated at the end or left implicit.
    """
    vertices = _normalize_cycle(g, cycle)
    edges = zip(vertices, vertices[1:] + vertices[:1])
    return product(edge_operator(g, a, b) for a, b in edges).scaled(len(vertices))


def _require_incident(g: SystemGraph, u: int, segment: Segment) -> None:
    for x in segment.edges:
        if not g.has_edge(u, x):
            raise EdgeNotIncidentError(f"Edge ({u}, {x}) of {segment.tag} segment does not touch {u}")


def active_qubits(g: SystemGraph, u: int, segment: Segment) -> frozenset[int]:
    """Internal (1-based) qubit indices of ``u`` touched by one segment.

    vertex_op: 1..n; start_a/end_a: 1..a; interior: min(a_x, a_y)..max(a_x, a_y);
    end_ab: a..n, with a = ceil(xi/2) of the incident edge.
    """
    _check_vertex(g, u)
    _require_incident(g, u, segment)
    n = g.n_qubits(u)
    if segment.tag == "vertex_op":
        return frozenset(range(1, n + 1))
    if segment.tag == "interior":
        ax = a_index(g, u, segment.in_edge)  # type: ignore[arg-type]
        ay = a_index(g, u, segment.out_edge)  # type: ignore[arg-type]
        return frozenset(range(min(ax, ay), max(ax, ay) + 1))
    x = segment.out_edge if segment.tag == "start_a" else segment.in_edge
    a = a_index(g, u, x)  # type: ignore[arg-type]
    if segment.tag == "end_ab":
        return frozenset(range(a, n + 1))
    return frozenset(range(1, a + 1))


def majorana_indices(g: SystemGraph, u: int, segment: Segment) -> list[int]:
    """Majorana indices of ``u`` whose product the segment places on ``u``."""
    _require_incident(g, u, segment)
    full = list(range(1, 2 * g.n_qubits(u) + 1))
    indices = [xi(g, u, x) for x in segment.edges]
    if segment.tag in ("vertex_op", "end_ab"):
        indices.extend(full)
    return indices


def merged_active_qubits(g: SystemGraph, u: int, segments: Iterable[Segment]) -> frozenset[int]:
    """Support on ``u`` of the product of several segments, by Majorana parity.

    Qubit k carries an X-component when exactly one of 2k-1, 2k appears an odd
    number of times, and a Z-component from 2k plus every odd-count index whose
    X/Y sits above k.
    """
    counts: Counter[int] = Counter()
    for segment in segments:
        counts.update(majorana_indices(g, u, segment))
    odd = {j for j, c in counts.items() if c % 2 == 1}
    active: set[int] = set()
    for k in range(1, g.n_qubits(u) + 1):
        xbit = ((2 * k - 1) in odd) != ((2 * k) in odd)
        above = sum(1 for j in odd if math.ceil(j / 2) > k)
        zbit = ((2 * k) in odd) != (above % 2 == 1)
        if xbit or zbit:
            active.add(k)
    return frozenset(active)


def checked_paths(interaction: Interaction, assigned_paths: Sequence[Path] | None) -> Sequence[Path]:
    if not interaction.pairs:
        return ()
    if assigned_paths is None or len(assigned_paths) != len(interaction.pairs):
        have = 0 if assigned_paths is None else len(assigned_paths)
        raise MissingPathError(
            f"Interaction {interaction.id} ({interaction.label}) needs "
            f"{len(interaction.pairs)} paths, got {have}"
        )
    for (u, v), path in zip(interaction.pairs, assigned_paths):
        if len(path) < 2 or path[0] != u or path[-1] != v:
            raise InvalidPathError(
                f"Path {list(path)} does not join {u} and {v} for interaction {interaction.id}"
            )
    return assigned_paths


def interaction_segments(
    interaction: Interaction, assigned_paths: Sequence[Path] | None
) -> dict[int, list[Segment]]:
    """Segments per vertex for one term.

    A path end that is a vertex-operator target absorbs that target as an
    ``end_ab`` segment; targets left over become ``vertex_op`` segments.
    """
    paths = checked_paths(interaction, assigned_paths)
    pending = set(interaction.b_targets)
    segments: dict[int, list[Segment]] = defaultdict(list)
    for path in paths:
        segments[path[0]].append(Segment("start_a", out_edge=path[1]))
        for prev, here, nxt in zip(path, path[1:], path[2:]):
            segments[here].append(Segment("interior", in_edge=prev, out_edge=nxt))
        end = path[-1]
        if end in pending:
            pending.discard(end)
            segments[end].append(Segment("end_ab", in_edge=path[-2]))
        else:
            segments[end].append(Segment("end_a", in_edge=path[-2]))
    for v in sorted(pending):
        segments[v].append(Segment("vertex_op"))
    return dict(segments)


def interaction_support(
    g: SystemGraph, interaction: Interaction, assigned_paths: Sequence[Path] | None
) -> frozenset[int]:
    """Global qubit ids acted on by the whole encoded term.

    Raises:
        MissingPathError: a pair has no path
        EnumerationUnsetError: a needed edge index is unset
    """
    qubits: set[int] = set()
    for u, segments in interaction_segments(interaction, assigned_paths).items():
        if len(segments) == 1:
            internal = active_qubits(g, u, segments[0])
        else:
            internal = merged_active_qubits(g, u, segments)
        qubits.update(g.layout.qubit(u, k) for k in internal)
    return frozenset(qubits)


def interaction_operator(
    g: SystemGraph, interaction: Interaction, assigned_paths: Sequence[Path] | None
) -> PauliString:
    """Explicit Pauli string of a term: path operators in order, then vertex operators."""
    paths = checked_paths(interaction, assigned_paths)
    factors = [path_operator(g, p) for p in paths]
    factors.extend(vertex_operator(g, v) for v in sorted(interaction.b_targets))
    return product(factors)


def explicit_support(
    g: SystemGraph, interaction: Interaction, assigned_paths: Sequence[Path] | None
) -> frozenset[int]:
    """Support computed by multiplying strings; the cross-check for :func:`interaction_support`."""
    return support(interaction_operator(g, interaction, assigned_paths))
