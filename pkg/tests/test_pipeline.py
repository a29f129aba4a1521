"""End-to-end pipeline and CLI behavior.

Checks the full chain against its own staged artifacts: a pipeline run
must be reproducible byte for byte, and rerunning any later stage from
the saved intermediates must give the same files.
"""

import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest

from topodist.cli import main
from topodist.dataset import Dataset, Sample, TorusSpec, generate_torus_dataset, patch_cube
from topodist.pipeline import (
    PipelineConfig,
    PipelineError,
    build_weighted_complex,
    cross_correlation_complex,
    dimension_sweep,
    graph_spectral_distances,
    run_pipeline,
    weight_profile,
    write_weight_profile_csv,
)
from topodist.complexes import complete_skeleton


SPEC = TorusSpec(
    m=4, n_samples=6, n_observations=40, tuple_size=2, r_max=3.0, sigma=0.05, seed=1
)


def torus_datasets(seeds):
    return [
        generate_torus_dataset(dataclasses.replace(SPEC, seed=s)) for s in seeds
    ]


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestPipelineConfig:
    def test_defaults_round_trip_json(self, tmp_path):
        config = PipelineConfig(degree=0, p=1.5, normalize=True)
        config.to_json(tmp_path / "config.json")
        assert PipelineConfig.from_json(tmp_path / "config.json") == config

    def test_unknown_keys_rejected(self, tmp_path):
        (tmp_path / "config.json").write_text('{"bogus": 1}')
        with pytest.raises(ValueError, match="unknown"):
            PipelineConfig.from_json(tmp_path / "config.json")

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kernel_epsilon_factor": 0.0},
            {"patch_size": 0},
            {"skeleton": "full"},
            {"degree": 2},
            {"p": 0.5},
            {"infinite_policy": "keep"},
            {"infinite_policy": "cap"},
            {"embed_dim": 0},
            {"weight_scheme": "magic"},
        ],
    )
    def test_bad_fields_rejected(self, kwargs):
        with pytest.raises(ValueError):
            PipelineConfig(**kwargs)

    def test_cap_with_value_accepted(self):
        config = PipelineConfig(infinite_policy="cap", cap_value=2.0)
        assert config.metric_spec().cap_value == 2.0


class TestRunPipeline:
    def test_identical_datasets_have_zero_distance(self):
        ds = torus_datasets([3])[0]
        matrix, _ = run_pipeline([ds, ds], PipelineConfig())
        assert matrix.entries[0, 1] == 0.0

    def test_mixed_observation_counts_across_datasets(self):
        small = generate_torus_dataset(
            dataclasses.replace(SPEC, n_observations=9, seed=5)
        )
        large = generate_torus_dataset(
            dataclasses.replace(SPEC, n_observations=200, seed=6)
        )
        matrix, diagrams = run_pipeline([small, large], PipelineConfig())
        assert matrix.n == 2
        assert np.isfinite(matrix.entries).all()
        assert set(diagrams) == {"dataset_0", "dataset_1"}

    def test_artifacts_are_deterministic(self, tmp_path):
        datasets = torus_datasets([1, 2])
        config = PipelineConfig()
        run_pipeline(datasets, config, out_dir=tmp_path / "a")
        run_pipeline(datasets, config, out_dir=tmp_path / "b")
        a, b = tree_bytes(tmp_path / "a"), tree_bytes(tmp_path / "b")
        assert a.keys() == b.keys()
        assert all(a[k] == b[k] for k in a)

    def test_artifact_layout(self, tmp_path):
        datasets = torus_datasets([1, 2])
        run_pipeline(datasets, PipelineConfig(), out_dir=tmp_path, labels=["x", "y"])
        names = set(tree_bytes(tmp_path))
        assert names == {
            "config.json",
            "complexes/x.csv",
            "complexes/y.csv",
            "diagrams/x.csv",
            "diagrams/y.csv",
            "distances.csv",
        }

    def test_staged_rerun_reproduces_artifacts(self, tmp_path):
        datasets = torus_datasets([1, 2])
        out = tmp_path / "run"
        run_pipeline(datasets, PipelineConfig(), out_dir=out, labels=["ds1", "ds2"])

        assert main(["ph", "--complex", str(out / "complexes/ds1.csv"),
                     "--out", str(tmp_path / "pd1.csv")]) == 0
        assert (tmp_path / "pd1.csv").read_bytes() == (out / "diagrams/ds1.csv").read_bytes()

        assert main([
            "distance", str(out / "diagrams/ds1.csv"), str(out / "diagrams/ds2.csv"),
            "--out", str(tmp_path / "dist.csv"),
        ]) == 0
        assert (tmp_path / "dist.csv").read_bytes() == (out / "distances.csv").read_bytes()

    def test_workers_do_not_change_the_result(self):
        datasets = torus_datasets([1, 2])
        serial, _ = run_pipeline(datasets, PipelineConfig())
        threaded, _ = run_pipeline(datasets, PipelineConfig(), workers=4)
        assert np.array_equal(serial.entries, threaded.entries)

    def test_grid_skeleton_from_patch_metadata(self):
        rng = np.random.default_rng(0)
        cube = rng.normal(size=(6, 9, 5))
        dataset, grid = patch_cube(cube, 3)
        assert (grid.rows, grid.cols) == (2, 3)
        cx = build_weighted_complex(dataset, PipelineConfig(skeleton="grid"))
        assert cx.count(0) == 6
        assert cx.count(2) == 2 * (grid.rows - 1) * (grid.cols - 1)

    def test_error_names_dataset_and_stage(self):
        datasets = torus_datasets([1, 2])
        with pytest.raises(PipelineError, match=r"dataset 'dataset_0', stage weights"):
            run_pipeline(datasets, PipelineConfig(skeleton="grid"))

    def test_duplicate_labels_rejected(self):
        datasets = torus_datasets([1, 2])
        with pytest.raises(ValueError, match="unique"):
            run_pipeline(datasets, PipelineConfig(), labels=["same", "same"])

    def test_single_dataset_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            run_pipeline(torus_datasets([1]), PipelineConfig())


class TestBaselines:
    def test_cross_correlation_complex_is_monotone_and_positive(self):
        ds = torus_datasets([4])[0]
        cx = cross_correlation_complex(complete_skeleton(len(ds.samples)), ds)
        assert cx.is_monotone()
        weights = np.array([cx.weight_of(s.vertices) for s in cx.simplexes])
        dims = np.array([s.dimension for s in cx.simplexes])
        assert (weights[dims == 0] == 0.0).all()
        assert (weights[dims > 0] >= 1.0).all()

    def test_cross_correlation_scheme_runs_in_pipeline(self):
        datasets = torus_datasets([1, 2])
        matrix, _ = run_pipeline(
            datasets, PipelineConfig(weight_scheme="cross-correlation")
        )
        assert np.isfinite(matrix.entries).all()

    def test_graph_spectral_matrix_shape(self):
        datasets = torus_datasets([1, 2, 3])
        matrix = graph_spectral_distances(datasets, PipelineConfig())
        assert matrix.n == 3
        assert np.array_equal(matrix.entries, matrix.entries.T)
        assert matrix.entries[0, 0] == 0.0
        assert matrix.entries[0, 1] > 0.0

    def test_graph_spectral_needs_equal_sample_counts(self):
        a = torus_datasets([1])[0]
        b = generate_torus_dataset(dataclasses.replace(SPEC, n_samples=7, seed=2))
        with pytest.raises(ValueError, match="equal sample counts"):
            graph_spectral_distances([a, b], PipelineConfig())


class TestWeightProfile:
    def test_rows_cover_observed_buckets(self):
        rows = weight_profile(SPEC, 2)
        kinds = {kind for kind, *_ in rows}
        assert kinds == {"edge", "triangle"}
        n_pairs = 2 * (6 * 5 // 2)
        assert sum(count for kind, _, _, _, count in rows if kind == "edge") == n_pairs

    def test_deterministic(self):
        assert weight_profile(SPEC, 2) == weight_profile(SPEC, 2)

    def test_full_overlap_when_tuple_is_everything(self):
        spec = dataclasses.replace(SPEC, m=2, tuple_size=2)
        rows = weight_profile(spec, 1)
        assert all(common == 2 for _, common, _, _, _ in rows)

    def test_csv_output(self, tmp_path):
        rows = weight_profile(SPEC, 1)
        write_weight_profile_csv(rows, tmp_path / "profile.csv")
        lines = (tmp_path / "profile.csv").read_text().splitlines()
        assert lines[0] == "simplex,common_count,mean_weight,std_weight,count"
        assert len(lines) == len(rows) + 1

    def test_seed_count_validated(self):
        with pytest.raises(ValueError, match="n_seeds"):
            weight_profile(SPEC, 0)


class TestDimensionSweep:
    def test_labels_and_groups(self, tmp_path):
        template = dataclasses.replace(SPEC, tuple_size=3, m=6, sigma=0.1)
        matrix, m_of = dimension_sweep([3, 6], 2, template, out_dir=tmp_path)
        assert matrix.labels == ("m3_r0", "m3_r1", "m6_r0", "m6_r1")
        assert m_of == {"m3_r0": 3, "m3_r1": 3, "m6_r0": 6, "m6_r1": 6}
        config = json.loads((tmp_path / "config.json").read_text())
        assert (config["degree"], config["p"]) == (1, 2.0)

    def test_single_m_value_rejected(self):
        with pytest.raises(ValueError, match="distinct m values"):
            dimension_sweep([5], 1, SPEC)

    def test_per_m_validated(self):
        with pytest.raises(ValueError, match="per_m"):
            dimension_sweep([3, 6], 0, SPEC)


class TestCli:
    def run(self, *argv):
        return main([str(a) for a in argv])

    def test_staged_chain_matches_pipeline(self, tmp_path):
        for seed, name in ((1, "ds1"), (2, "ds2")):
            assert self.run(
                "generate-sim", "--m", 4, "--n-samples", 6, "--n-observations", 40,
                "--tuple-size", 2, "--r-max", 3, "--sigma", 0.05, "--seed", seed,
                "--out", tmp_path / name,
            ) == 0
        for name in ("ds1", "ds2"):
            assert self.run(
                "build-complex", "--dataset", tmp_path / name,
                "--out", tmp_path / f"{name}.cx.csv",
            ) == 0
            assert self.run(
                "ph", "--complex", tmp_path / f"{name}.cx.csv",
                "--out", tmp_path / f"{name}.csv",
            ) == 0
        assert self.run(
            "distance", tmp_path / "ds1.csv", tmp_path / "ds2.csv",
            "--out", tmp_path / "dist.csv",
        ) == 0
        assert self.run(
            "pipeline", tmp_path / "ds1", tmp_path / "ds2", "--out", tmp_path / "run",
        ) == 0
        assert (tmp_path / "dist.csv").read_bytes() == (
            tmp_path / "run" / "distances.csv"
        ).read_bytes()
        assert self.run(
            "embed", "--distances", tmp_path / "run" / "distances.csv",
            "--out", tmp_path / "embedding.csv",
        ) == 0
        assert (tmp_path / "embedding.csv").read_text().startswith("label,coord_1")

    def test_patch_cube_command(self, tmp_path):
        rng = np.random.default_rng(3)
        np.save(tmp_path / "cube.npy", rng.normal(size=(6, 6, 4)))
        assert self.run(
            "patch-cube", "--cube", tmp_path / "cube.npy", "--patch-size", 3,
            "--out", tmp_path / "patches",
        ) == 0
        assert self.run(
            "build-complex", "--dataset", tmp_path / "patches",
            "--out", tmp_path / "grid.csv", "--skeleton", "grid",
        ) == 0
        assert (tmp_path / "grid.csv").exists()

    def test_config_file_with_flag_override(self, tmp_path):
        (tmp_path / "config.json").write_text('{"degree": 0, "p": 1.0}')
        for seed, name in ((1, "a"), (2, "b")):
            self.run(
                "generate-sim", "--m", 4, "--n-samples", 5, "--n-observations", 20,
                "--tuple-size", 2, "--r-max", 3, "--seed", seed, "--out", tmp_path / name,
            )
        assert self.run(
            "pipeline", tmp_path / "a", tmp_path / "b", "--out", tmp_path / "run",
            "--config", tmp_path / "config.json", "--p", 3.0,
        ) == 0
        effective = json.loads((tmp_path / "run" / "config.json").read_text())
        assert (effective["degree"], effective["p"]) == (0, 3.0)

    def test_errors_exit_nonzero(self, tmp_path, capsys):
        assert self.run("ph", "--complex", tmp_path / "missing.csv",
                        "--out", tmp_path / "x.csv") == 2
        assert "error:" in capsys.readouterr().err

    def test_duplicate_diagram_stems_rejected(self, tmp_path, capsys):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        for d in ("a", "b"):
            (tmp_path / d / "pd.csv").write_text("degree,birth,death\n")
        assert self.run(
            "distance", tmp_path / "a" / "pd.csv", tmp_path / "b" / "pd.csv",
            "--out", tmp_path / "dist.csv",
        ) == 2
        assert "unique" in capsys.readouterr().err
