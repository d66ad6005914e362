"""
Tests for the end-to-end driver: problem setup, restarts, verification,
sweeps and written outputs.
"""

from pathlib import Path

import pytest

from fermicolor.analytic import chi_bottleneck, chi_strong_star, chi_weak_star
from fermicolor.coloring import Schedule, build_conflict_graph, exact_chromatic
from fermicolor.config import GraphSource, ModelSource, RoutingParams, RunConfig, load_config
from fermicolor.harness import (
    SWEEP_COLUMNS,
    TIMING_COLUMN,
    ScheduleVerificationError,
    config_for_size,
    interactions_document,
    prepare_problem,
    render_stats,
    run,
    run_async,
    run_placements,
    run_restart,
    sweep,
    sweep_columns,
    verify_schedule,
    write_run_outputs,
)
from fermicolor.routing import PathFormatError, PathSet
from fermicolor.serialization import dump_document, load_graph, load_model, load_paths, load_schedule


def star_config(n: int, **fields) -> RunConfig:
    return RunConfig(graph=GraphSource(family="star", size=n), **fields)


class TestPrepareProblem:
    """Test graph, model and placement resolution."""

    def test_default_star(self, star4_problem):
        assert star4_problem.graph.name == "star:4"
        assert len(star4_problem.interactions) == 16
        assert star4_problem.embedding.assignment == {0: 0, 1: 1, 2: 2, 3: 3}

    def test_heavy_hexagon_all_to_all_is_random(self):
        """Fixed architectures place an all-to-all model at random."""
        config = RunConfig(
            graph=GraphSource(family="heavy_hexagon"),
            model=ModelSource(kind="all_to_all", size=6),
            seed=2,
        )
        problem = prepare_problem(config)
        assert len(problem.graph.physical_vertices) == 6
        assert problem.embedding.assignment == prepare_problem(config).embedding.assignment

    def test_heavy_hexagon_lattice_model(self):
        """A lattice model on a fixed architecture uses its shipped table."""
        config = RunConfig(
            graph=GraphSource(family="heavy_hexagon"),
            model=ModelSource(kind="nn_hopping", size=3),
        )
        problem = prepare_problem(config)
        assert problem.embedding.assignment[1] == 2
        assert problem.embedding.assignment[3] == 7

    def test_placement_seed(self):
        """Random placement follows the placement seed, not the restart seed."""
        config = RunConfig(
            graph=GraphSource(family="heavy_hexagon"),
            model=ModelSource(kind="all_to_all", size=6),
            seed=2,
        )
        default = prepare_problem(config)
        assert default.placement == "random"
        assert default.placement_seed == 2
        assert prepare_problem(config, placement_seed=2).embedding.assignment == default.embedding.assignment
        assert prepare_problem(config, placement_seed=9).placement_seed == 9

    def test_canned_enumeration(self):
        config = RunConfig(graph=GraphSource(family="bottleneck", size=8), enumeration="canned")
        problem = prepare_problem(config)
        assert problem.graph.enumeration_index(16, 8) == 2
        assert problem.graph.enumeration_index(16, 12) == 1
        assert problem.bottleneck is not None
        assert problem.bottleneck.middles == ((8, 9, 10, 11), (12, 13, 14, 15))

    def test_graph_file(self, tmp_path: Path, star4_problem):
        path = dump_document(star4_problem.graph.to_dict(), tmp_path / "g.yaml")
        problem = prepare_problem(RunConfig(graph=GraphSource(path=str(path))))
        assert problem.graph.edges == star4_problem.graph.edges


class TestRunRestart:
    """Test a single seeded restart."""

    def test_weak_star(self, star4_problem):
        """Every hopping on the star meets at the hub: N(N-1) layers."""
        outcome = run_restart(star4_problem, "weak", 0, RoutingParams())
        assert outcome.colors == chi_weak_star(4)
        assert outcome.clique_bound == 12
        assert outcome.colors <= outcome.brooks_bound

    def test_strong_star_paired_hub(self, star4_problem, paired_star):
        """A hub enumeration pairing leaves on qubits reaches the closed form."""
        problem = star4_problem.with_graph(paired_star)
        outcome = run_restart(problem, "strong", 0, RoutingParams())
        assert outcome.graph.enumeration[4] == paired_star.enumeration[4]
        assert outcome.colors == chi_strong_star(4) == 10
        cg = build_conflict_graph("strong", outcome.graph, problem.interactions, outcome.paths)
        assert exact_chromatic(cg) == 10

    def test_strong_never_worse_than_clique(self, star4_problem):
        outcome = run_restart(star4_problem, "strong", 3, RoutingParams())
        assert outcome.clique_bound <= outcome.colors
        assert outcome.graph.is_enumerated()

    def test_given_paths_are_checked(self, star4_problem):
        bad = PathSet({0: ((0, 1),)})
        with pytest.raises(PathFormatError):
            run_restart(star4_problem, "weak", 0, RoutingParams(), paths=bad)

    def test_given_paths_are_used(self, star4_problem):
        paths = PathSet({t.id: ((t.pairs[0][0], 4, t.pairs[0][1]),) for t in star4_problem.interactions if t.pairs})
        outcome = run_restart(star4_problem, "weak", 0, RoutingParams(), paths=paths)
        assert outcome.paths is paths

    def test_stats_row(self, star4_problem):
        row = run_restart(star4_problem, "weak", 5, RoutingParams()).stats_row()
        assert list(row) == ["seed", "mode", "colors", "clique_bound", "brooks_bound"]
        assert row["seed"] == 5

    def test_bottleneck_strong_within_parity_layers(self):
        """Canned bottleneck runs route through matched middles and stay within 2N - 1."""
        config = RunConfig(graph=GraphSource(family="bottleneck", size=8), enumeration="canned")
        problem = prepare_problem(config)
        outcome = run_restart(problem, "strong", 0, RoutingParams())
        assert outcome.colors <= chi_bottleneck(8)[1] == 15
        crossing = [p for ps in outcome.paths.paths.values() for p in ps if len(p) > 2]
        assert len(crossing) == 32
        assert all(p[2] == 16 and (p[1] - 8) % 4 == (p[3] - 8) % 4 for p in crossing)
        verify_schedule(outcome.graph, problem.interactions, outcome.paths, outcome.schedule)

    def test_bottleneck_weak_is_center_clique(self):
        """Every crossing term meets at the center: weak equals its 32-clique."""
        config = RunConfig(graph=GraphSource(family="bottleneck", size=8), enumeration="canned")
        outcome = run_restart(prepare_problem(config), "weak", 0, RoutingParams())
        assert outcome.colors == outcome.clique_bound == 32
        assert outcome.colors <= chi_bottleneck(8)[0]


class TestVerifySchedule:
    """Test independent schedule verification."""

    def test_accepts_valid(self, star4_problem):
        for mode in ("weak", "strong"):
            outcome = run_restart(star4_problem, mode, 0, RoutingParams())
            verify_schedule(outcome.graph, star4_problem.interactions, outcome.paths, outcome.schedule)

    def test_rejects_shared_vertex(self, star4_problem):
        outcome = run_restart(star4_problem, "weak", 0, RoutingParams())
        merged = Schedule.from_layers("weak", [[t.id for t in star4_problem.interactions]])
        with pytest.raises(ScheduleVerificationError, match="share vertex"):
            verify_schedule(outcome.graph, star4_problem.interactions, outcome.paths, merged)

    def test_rejects_shared_qubit(self, star4_problem):
        outcome = run_restart(star4_problem, "strong", 0, RoutingParams())
        merged = Schedule.from_layers("strong", [[t.id for t in star4_problem.interactions]])
        with pytest.raises(ScheduleVerificationError, match="share qubit"):
            verify_schedule(outcome.graph, star4_problem.interactions, outcome.paths, merged)

    def test_rejects_missing_interaction(self, star4_problem):
        outcome = run_restart(star4_problem, "weak", 0, RoutingParams())
        partial = Schedule.from_layers("weak", outcome.schedule.layers[1:])
        with pytest.raises(ScheduleVerificationError, match="expected 16"):
            verify_schedule(outcome.graph, star4_problem.interactions, outcome.paths, partial)

    def test_weak_check_reads_paths_directly(self, star4_problem, monkeypatch: pytest.MonkeyPatch):
        """A conflict builder that misses shared vertices is still caught by verification."""
        monkeypatch.setattr("fermicolor.coloring.interaction_vertices", lambda term, paths: frozenset())
        outcome = run_restart(star4_problem, "weak", 0, RoutingParams())
        assert outcome.colors == 1
        with pytest.raises(ScheduleVerificationError, match="share vertex"):
            verify_schedule(outcome.graph, star4_problem.interactions, outcome.paths, outcome.schedule)


class TestRun:
    """Test multi-restart runs."""

    def test_run_both_modes(self):
        result = run(star_config(4, restarts=3))
        assert set(result.results) == {"weak", "strong"}
        assert result.best("weak").colors == 12
        assert result.best("strong").colors <= result.best("weak").colors
        assert len(result.stats_rows()) == 6

    def test_best_is_fewest_then_smallest_seed(self):
        result = run(star_config(4, mode="strong", restarts=4, seed=10))
        mode_result = result.results["strong"]
        fewest = min(o.colors for o in mode_result.outcomes)
        winners = [o.seed for o in mode_result.outcomes if o.colors == fewest]
        assert mode_result.best.seed == min(winners)
        assert [o.seed for o in mode_result.outcomes] == [10, 11, 12, 13]

    def test_deterministic(self):
        config = star_config(5, mode="strong", restarts=3)
        first, second = run(config), run(config)
        assert first.best("strong").schedule == second.best("strong").schedule
        assert first.best("strong").seed == second.best("strong").seed

    async def test_run_async(self):
        result = await run_async(star_config(3, mode="weak"))
        assert result.best("weak").colors == chi_weak_star(3)

    @pytest.mark.slow
    def test_process_pool_matches_inline(self):
        inline = run(star_config(5, restarts=4))
        pooled = run(star_config(5, restarts=4, workers=2))
        for mode in ("weak", "strong"):
            assert inline.best(mode).colors == pooled.best(mode).colors
            assert inline.best(mode).seed == pooled.best(mode).seed

    def test_render_stats(self):
        text = render_stats(run(star_config(3, mode="weak")))
        assert text.splitlines()[0] == "seed,mode,colors,clique_bound,brooks_bound"
        assert text.splitlines()[1].startswith("0,weak,6,")


class TestPlacements:
    """Test runs over several seeded placements."""

    def hexagon_config(self, **fields) -> RunConfig:
        return RunConfig(
            graph=GraphSource(family="heavy_hexagon"),
            model=ModelSource(kind="all_to_all", size=4),
            mode="weak",
            **fields,
        )

    def test_placement_seeds_follow_base_seed(self):
        results = run_placements(self.hexagon_config(seed=5, placements=3))
        assert [r.problem.placement_seed for r in results] == [5, 6, 7]
        for result in results:
            assert result.best("weak").colors >= result.best("weak").clique_bound

    def test_deterministic_placement_runs_once(self, caplog: pytest.LogCaptureFixture):
        with caplog.at_level("WARNING", logger="fermicolor"):
            results = run_placements(star_config(3, mode="weak", placements=4))
        assert len(results) == 1
        assert "running 1 placement instead of 4" in caplog.text


class TestSweep:
    """Test size sweeps."""

    def test_sweep_rows(self):
        rows = sweep(star_config(3, mode="weak"), [3, 4])
        assert [(r["size"], r["colors"]) for r in rows] == [(3, 6), (4, 12)]
        assert list(rows[0]) == SWEEP_COLUMNS
        assert rows[0]["mean_path_length"] == "2.0000"
        assert rows[1]["qubit_count"] == 6
        assert (rows[0]["sequential"], rows[0]["sequential_ratio"]) == (9, "0.6667")
        assert (rows[1]["sequential"], rows[1]["sequential_ratio"]) == (16, "0.7500")
        assert rows[1]["placements"] == 1
        assert rows[1]["colors_mean"] == "12.0000"
        assert rows[1]["colors_max"] == 12
        assert rows[1]["strong_weak_ratio"] == ""

    def test_sweep_strong_weak_ratio(self):
        rows = sweep(star_config(4), [4])
        weak, strong = rows
        assert (weak["mode"], strong["mode"]) == ("weak", "strong")
        assert weak["strong_weak_ratio"] == ""
        assert strong["strong_weak_ratio"] == f"{strong[colors] / weak[colors]:.4f}"
        assert float(strong["strong_weak_ratio"]) <= 1.0

    def test_sweep_over_placements(self):
        config = RunConfig(
            graph=GraphSource(family="heavy_hexagon"), mode="weak", placements=3, seed=1
        )
        (row,) = sweep(config, [4])
        assert row["placements"] == 3
        assert row["colors"] <= float(row["colors_mean"]) <= row["colors_max"]
        assert row["sequential"] == 16

    def test_sweep_timings(self):
        config = star_config(3, mode="weak", record_timings=True)
        rows = sweep(config, [3])
        assert sweep_columns(config) == SWEEP_COLUMNS + [TIMING_COLUMN]
        assert float(rows[0][TIMING_COLUMN]) >= 0.0

    def test_config_for_size_sized_family(self):
        config = config_for_size(star_config(3, model=ModelSource(kind="all_to_all", size=3)), 6)
        assert config.graph.size == 6
        assert config.model.size == 6

    def test_config_for_size_fixed_family(self):
        config = config_for_size(RunConfig(graph=GraphSource(family="heavy_hexagon")), 12)
        assert config.graph.size is None
        assert config.model == ModelSource(kind="all_to_all", size=12)


class TestOutputs:
    """Test files written after a run."""

    def test_write_run_outputs(self, tmp_path: Path):
        result = run(star_config(4, restarts=2))
        written = write_run_outputs(result, tmp_path, "json")
        names = sorted(p.name for p in written)
        assert names == sorted([
            "interactions.json",
            "schedule_weak.json", "paths_weak.json", "graph_weak.json",
            "schedule_strong.json", "paths_strong.json", "graph_strong.json",
            "stats.csv",
        ])

        model = load_model(tmp_path / "interactions.json")
        for mode in ("weak", "strong"):
            g = load_graph(tmp_path / f"graph_{mode}.json")
            paths = load_paths(tmp_path / f"paths_{mode}.json")
            schedule = load_schedule(tmp_path / f"schedule_{mode}.json")
            assert schedule.colors == result.best(mode).colors
            verify_schedule(g, model.interactions, paths, schedule)

    def test_run_config_written_with_outputs(self, tmp_path: Path):
        """The resolved configuration lands next to the outputs and reloads unchanged."""
        config = star_config(3, mode="weak", restarts=2, seed=4)
        written = write_run_outputs(run(config), tmp_path, "yaml", config=config)
        assert written[0] == tmp_path / "run_config.yaml"
        assert load_config(written[0]) == config

    def test_interactions_document(self, star4_problem):
        data = interactions_document(star4_problem)
        assert data["name"] == "all_to_all:4"
        assert data["modes"] == 5
        assert len(data["interactions"]) == 16
