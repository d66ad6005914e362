"""
Tests for interaction models and their placement on system graphs.
"""

import networkx as nx
import pytest

from fermicolor.models import (
    Model,
    ModelError,
    ModelFormatError,
    TooManyModesError,
    all_to_all,
    embed,
    lattice_capacity,
    nn_hopping,
)
from fermicolor.routing import Interaction
from fermicolor.system_graph import BadSizeError, gen_grid, gen_heavy_hexagon, gen_star


class TestModels:
    """Test model constructors and validation."""

    def test_all_to_all_order(self):
        """Per mode u: every hopping A_uv B_v, then B_u."""
        model = all_to_all(3)
        assert len(model.interactions) == 9
        assert model.hopping_count == 6
        labels = [term.label for term in model.interactions[:3]]
        assert labels == ["A(0,1)B(1)", "A(0,2)B(2)", "B(0)"]

    def test_all_to_all_graph(self):
        assert nx.is_isomorphic(all_to_all(4).interaction_graph(), nx.complete_graph(4))

    def test_all_to_all_size(self):
        with pytest.raises(BadSizeError):
            all_to_all(1)

    def test_nn_hopping(self):
        """Both directions of every lattice edge, then one vertex term per site."""
        model = nn_hopping(2)
        assert model.modes == 4
        assert model.lattice_side == 2
        assert model.hopping_count == 8
        assert len(model.interactions) == 12
        assert model.interactions[0].label == "A(0,1)B(1)"
        assert model.interactions[1].label == "A(1,0)B(0)"
        assert nx.is_isomorphic(model.interaction_graph(), nx.cycle_graph(4))

    def test_nn_hopping_size(self):
        with pytest.raises(BadSizeError):
            nn_hopping(1)

    def test_ids_are_positions(self):
        with pytest.raises(ModelFormatError, match="position 0 has id 3"):
            Model("bad", 2, (Interaction(3, b_targets=frozenset({0})),))

    def test_modes_in_range(self):
        with pytest.raises(ModelFormatError, match="outside 0..1"):
            Model("bad", 2, (Interaction(0, pairs=((0, 2),)),))

    def test_dict_form(self):
        model = nn_hopping(2)
        again = Model.from_dict(model.to_dict())
        assert again == model

    def test_from_dict_infers_modes(self):
        model = Model.from_dict({"interactions": [{"pairs": [[0, 3]], "b_targets": [3]}]})
        assert model.modes == 4
        assert model.name == "file"
        assert model.interactions[0].id == 0

    def test_from_dict_malformed(self):
        with pytest.raises(ModelFormatError, match="Malformed model data"):
            Model.from_dict({"name": "x"})
        with pytest.raises(ModelFormatError):
            Model.from_dict({"interactions": [{"pairs": [[1, 1]]}]})


class TestEmbed:
    """Test placement of modes onto physical vertices."""

    def test_identity(self):
        embedding = embed(all_to_all(4), gen_star(4), placement="identity")
        assert embedding.assignment == {0: 0, 1: 1, 2: 2, 3: 3}
        assert embedding.graph.physical_vertices == [0, 1, 2, 3]
        assert embedding.interactions == all_to_all(4).interactions

    def test_random_is_seeded(self):
        """Random placement is injective, uses physical vertices and repeats per seed."""
        g = gen_heavy_hexagon()
        first = embed(all_to_all(10), g, seed=5, placement="random")
        again = embed(all_to_all(10), g, seed=5, placement="random")
        assert first.assignment == again.assignment
        assert len(set(first.assignment.values())) == 10
        assert sorted(first.graph.physical_vertices) == sorted(first.assignment.values())
        assert len(first.graph.virtual_vertices) == 39

    def test_interactions_relabeled(self):
        embedding = embed(all_to_all(3), gen_heavy_hexagon(), seed=1, placement="random")
        mapping = embedding.assignment
        assert embedding.interactions[0] == Interaction(
            0, pairs=((mapping[0], mapping[1]),), b_targets=frozenset({mapping[1]})
        )

    def test_lattice_on_grid(self):
        embedding = embed(nn_hopping(3), gen_grid(3), placement="lattice")
        assert embedding.assignment == {v: v for v in range(9)}

    def test_lattice_on_heavy_hexagon(self):
        """Lattice rows follow the shipped table: every other vertex of a heavy row."""
        embedding = embed(nn_hopping(4), gen_heavy_hexagon(), placement="lattice")
        assert embedding.assignment[0] == 0
        assert embedding.assignment[1] == 2
        assert embedding.assignment[4] == 7
        assert embedding.assignment[15] == 31

    def test_lattice_too_small(self):
        """The shipped heavy-hexagon table stops at L = 4 and says so."""
        with pytest.raises(TooManyModesError, match=r"cannot host a 5x5 lattice; its table fits L <= 4"):
            embed(nn_hopping(5), gen_heavy_hexagon(), placement="lattice")

    def test_lattice_capacity(self):
        assert lattice_capacity(gen_heavy_hexagon()) == 4
        assert lattice_capacity(gen_grid(3)) == 3
        assert lattice_capacity(gen_star(4)) == 0

    def test_lattice_needs_lattice_model(self):
        with pytest.raises(ModelError, match="no lattice structure"):
            embed(all_to_all(4), gen_grid(2), placement="lattice")

    def test_lattice_needs_lattice_graph(self):
        with pytest.raises(ModelError, match="ships no lattice placement"):
            embed(nn_hopping(2), gen_star(4), placement="lattice")

    def test_too_many_modes(self):
        with pytest.raises(TooManyModesError, match="5 modes"):
            embed(all_to_all(5), gen_star(4))

    def test_unknown_placement(self):
        with pytest.raises(ModelError, match="Unknown placement"):
            embed(all_to_all(2), gen_star(4), placement="spiral")  # type: ignore[arg-type]

    def test_embedding_dict(self):
        data = embed(all_to_all(2), gen_star(4), placement="identity").to_dict()
        assert data == {"model": "all_to_all:2", "graph": "star:4", "assignment": {0: 0, 1: 1}}
