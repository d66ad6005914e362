"""
Fermionic interaction models and their placement on system graphs.

Models live in mode space (modes ``0..N-1``); ``embed`` maps modes onto
physical-capable vertices of a system graph and marks every other vertex
virtual. Interaction ids are positions in the model's interaction list.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Any, Literal, Mapping, Sequence

import networkx as nx

from .routing import Interaction, InvalidInteractionError
from .system_graph import BadSizeError, SystemGraph, with_kinds

logger = logging.getLogger(__name__)

PlacementMode = Literal["identity", "random", "lattice"]


class ModelError(Exception):
    """Base exception for model errors."""
    pass


class TooManyModesError(ModelError):
    """Raised when a graph cannot host every mode of a model."""
    pass


class ModelFormatError(ModelError):
    """Raised when a serialized model is malformed."""
    pass


@dataclass(frozen=True)
class Model:
    """An interaction list over modes ``0..modes-1``.

    ``lattice_side`` is set for square-lattice models so a lattice placement
    can keep lattice neighbours adjacent.
    """

    name: str
    modes: int
    interactions: tuple[Interaction, ...]
    lattice_side: int | None = None

    def __post_init__(self) -> None:
        self._validate_fields()

    def _validate_fields(self) -> None:
        for position, term in enumerate(self.interactions):
            if term.id != position:
                raise ModelFormatError(f"Interaction at position {position} has id {term.id}")
            for v in term.endpoints | term.b_targets:
                if not 0 <= v < self.modes:
                    raise ModelFormatError(
                        f"Interaction {term.id} names mode {v} outside 0..{self.modes - 1}"
                    )

    @property
    def hopping_count(self) -> int:
        return sum(1 for term in self.interactions if term.pairs)

    def interaction_graph(self) -> nx.Graph:
        """Modes joined by an edge for every endpoint pair."""
        g = nx.Graph()
        g.add_nodes_from(range(self.modes))
        for term in self.interactions:
            g.add_edges_from(term.pairs)
        return g

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"name": self.name, "modes": self.modes}
        if self.lattice_side is not None:
            data["lattice_side"] = self.lattice_side
        data["interactions"] = [
            {"pairs": [list(p) for p in term.pairs], "b_targets": sorted(term.b_targets)}
            for term in self.interactions
        ]
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Model:
        try:
            terms = tuple(
                Interaction.from_dict({**entry, "id": i})
                for i, entry in enumerate(data["interactions"])
            )
        except (KeyError, TypeError) as e:
            raise ModelFormatError(f"Malformed model data: {e}")
        except InvalidInteractionError as e:
            raise ModelFormatError(str(e))
        used = {v for term in terms for v in term.endpoints | term.b_targets}
        modes = int(data.get("modes", max(used, default=-1) + 1))
        side = data.get("lattice_side")
        return cls(
            name=str(data.get("name", "file")),
            modes=modes,
            interactions=terms,
            lattice_side=int(side) if side is not None else None,
        )


@dataclass(frozen=True)
class EmbeddedModel:
    """A model placed on a system graph.

    ``graph`` has exactly the assigned vertices physical; ``interactions``
    are in vertex space with the model's ids.
    """

    model: Model
    graph: SystemGraph
    assignment: Mapping[int, int]
    interactions: tuple[Interaction, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model.name,
            "graph": self.graph.name,
            "assignment": {mode: v for mode, v in sorted(self.assignment.items())},
        }


def all_to_all(n: int) -> Model:
    """Every ordered hopping A_uv B_v (u != v) followed by the vertex term B_u, per u."""
    if n < 2:
        raise BadSizeError(f"All-to-all model needs N >= 2, got {n}")
    terms: list[Interaction] = []
    for u in range(n):
        for v in range(n):
            if v != u:
                terms.append(Interaction(len(terms), pairs=((u, v),), b_targets=frozenset({v})))
        terms.append(Interaction(len(terms), b_targets=frozenset({u})))
    return Model(name=f"all_to_all:{n}", modes=n, interactions=tuple(terms))


def nn_hopping(side: int) -> Model:
    """Nearest-neighbour hopping on an open ``side x side`` lattice, mode ``r*side + c``.

    Both directions of every lattice edge, then one vertex term per site.
    """
    if side < 2:
        raise BadSizeError(f"Nearest-neighbour lattice needs L >= 2, got {side}")
    terms: list[Interaction] = []
    lattice = nx.grid_2d_graph(side, side)
    edges = sorted(
        tuple(sorted((r1 * side + c1, r2 * side + c2)))
        for (r1, c1), (r2, c2) in lattice.edges
    )
    for u, v in edges:
        terms.append(Interaction(len(terms), pairs=((u, v),), b_targets=frozenset({v})))
        terms.append(Interaction(len(terms), pairs=((v, u),), b_targets=frozenset({u})))
    for site in range(side * side):
        terms.append(Interaction(len(terms), b_targets=frozenset({site})))
    return Model(
        name=f"nn_hopping:{side}",
        modes=side * side,
        interactions=tuple(terms),
        lattice_side=side,
    )


def lattice_capacity(g: SystemGraph) -> int:
    """Largest side L whose L x L lattice fits the graph's placement table (0 without one)."""
    table = g.lattice or ()
    return max(
        (side for side in range(len(table) + 1) if all(len(row) >= side for row in table[:side])),
        default=0,
    )


def _lattice_assignment(model: Model, g: SystemGraph) -> dict[int, int]:
    """Mode ``r*L + c`` goes to ``g.lattice[r][c]``.

    Shipped tables are finite: the heavy-hexagon table stops at L = 4 and the
    triangular and grid tables at their own side.
    """
    side = model.lattice_side
    if side is None:
        raise ModelError(f"Model {model.name} has no lattice structure to place")
    table = g.lattice
    if table is None:
        raise ModelError(f"Graph {g.name or '<unnamed>'} ships no lattice placement")
    capacity = lattice_capacity(g)
    if side > capacity:
        raise TooManyModesError(
            f"Lattice placement of {g.name or '<unnamed>'} cannot host a {side}x{side} lattice; "
            f"its table fits L <= {capacity}"
        )
    return {r * side + c: table[r][c] for r in range(side) for c in range(side)}


def embed(
    model: Model,
    g: SystemGraph,
    seed: int = 0,
    placement: PlacementMode = "random",
) -> EmbeddedModel:
    """
    Place ``model`` on ``g``.

    Args:
        model: interaction model in mode space
        g: system graph; its physical vertices are the capacity
        seed: seed for random placement
        placement: ``identity`` (mode i on the i-th physical vertex), ``random``
            (seeded uniform injective choice) or ``lattice`` (the graph's
            shipped lattice table)

    Raises:
        TooManyModesError: fewer physical-capable vertices than modes
    """
    capacity: Sequence[int] = g.physical_vertices
    if model.modes > len(capacity):
        raise TooManyModesError(
            f"Model {model.name} has {model.modes} modes but {g.name or 'the graph'} "
            f"offers {len(capacity)} physical-capable vertices"
        )
    if placement == "identity":
        assignment = {mode: capacity[mode] for mode in range(model.modes)}
    elif placement == "random":
        chosen = random.Random(seed).sample(list(capacity), model.modes)
        assignment = dict(enumerate(chosen))
    elif placement == "lattice":
        assignment = _lattice_assignment(model, g)
        outside = [v for v in assignment.values() if not g.is_physical(v)]
        if outside:
            raise TooManyModesError(f"Lattice placement uses non-physical vertices {outside}")
    else:
        raise ModelError(f"Unknown placement {placement!r}")

    placed = with_kinds(g, assignment.values())
    interactions = tuple(term.relabeled(assignment) for term in model.interactions)
    logger.debug(f"Embedded {model.name} on {g.name or 'graph'} ({placement}, seed {seed})")
    return EmbeddedModel(model=model, graph=placed, assignment=assignment, interactions=interactions)
