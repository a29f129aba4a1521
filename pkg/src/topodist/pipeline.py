"""End-to-end pipeline: datasets in, distance matrix and artifacts out.

Chains the library stages (per-sample diffusion operators, alternating
weights on a simplicial complex, persistence diagrams, Wasserstein
distances) behind a single config object, writes every intermediate to
disk so later stages can be rerun from the saved files, and provides the
two simulation studies (weight profiles against shared-circle counts,
and a sweep over the number of latent circles) plus two deliberately
simpler weighting schemes used as baselines in tests.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from topodist.complexes import (
    Simplex,
    WeightedComplex,
    assign_weights,
    complete_skeleton,
    enforce_monotone,
    grid_skeleton,
    raw_weights,
    write_complex_csv,
)
from topodist.dataset import Dataset, TorusSpec, generate_torus_dataset
from topodist.diffusion import (
    affinity,
    median_scale,
    pairwise_distances,
    sample_diffusion_operator,
)
from topodist.homology import (
    PersistenceDiagram,
    persistence_diagrams,
    write_diagrams_csv,
)
from topodist.wasserstein import (
    DatasetDistanceMatrix,
    DiagramDistanceSpec,
    distance_matrix,
    write_distance_csv,
)

__all__ = [
    "PipelineConfig",
    "PipelineError",
    "build_weighted_complex",
    "cross_correlation_complex",
    "dimension_sweep",
    "graph_spectral_distances",
    "run_pipeline",
    "weight_profile",
    "write_weight_profile_csv",
]

_SKELETONS = ("complete", "grid")
_POLICIES = ("drop", "cap")
_SCHEMES = ("alternating", "cross-correlation")


class PipelineError(RuntimeError):
    """A stage failed; the message names the dataset and the stage."""


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the end-to-end run, JSON round-trippable.

    ``degree``/``p``/``infinite_policy``/``cap_value`` configure the
    diagram metric, ``skeleton`` selects the complex built over each
    dataset's samples, ``embed_dim`` only matters for the embedding
    stage, and ``seed`` only for the simulation front ends.
    """

    kernel_epsilon_factor: float = 1.0
    patch_size: int = 5
    skeleton: str = "complete"
    degree: int = 1
    p: float = 2.0
    infinite_policy: str = "drop"
    cap_value: float | None = None
    embed_dim: int = 20
    seed: int = 0
    normalize: bool = False
    weight_scheme: str = "alternating"

    def __post_init__(self) -> None:
        if not self.kernel_epsilon_factor > 0.0:
            raise ValueError(
                f"kernel_epsilon_factor must be positive, got {self.kernel_epsilon_factor}"
            )
        if self.patch_size < 1:
            raise ValueError(f"patch_size must be >= 1, got {self.patch_size}")
        if self.skeleton not in _SKELETONS:
            raise ValueError(f"skeleton must be one of {_SKELETONS}, got {self.skeleton!r}")
        if self.degree not in (0, 1):
            raise ValueError(f"degree must be 0 or 1, got {self.degree}")
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.infinite_policy not in _POLICIES:
            raise ValueError(
                f"infinite_policy must be one of {_POLICIES}, got {self.infinite_policy!r}"
            )
        if self.infinite_policy == "cap" and self.cap_value is None:
            raise ValueError("infinite_policy 'cap' requires cap_value")
        if self.embed_dim < 1:
            raise ValueError(f"embed_dim must be >= 1, got {self.embed_dim}")
        if self.weight_scheme not in _SCHEMES:
            raise ValueError(
                f"weight_scheme must be one of {_SCHEMES}, got {self.weight_scheme!r}"
            )

    def metric_spec(self) -> DiagramDistanceSpec:
        return DiagramDistanceSpec(
            p=self.p,
            degree=self.degree,
            infinite_policy=self.infinite_policy,
            cap_value=self.cap_value,
        )

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text())
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"config file {path} has unknown keys: {unknown}")
        return cls(**raw)


def _grid_shape(dataset: Dataset) -> tuple[int, int]:
    meta = dataset.metadata
    if "grid_rows" not in meta or "grid_cols" not in meta:
        raise ValueError(
            "grid skeleton needs 'grid_rows' and 'grid_cols' in the dataset metadata"
        )
    rows, cols = int(meta["grid_rows"]), int(meta["grid_cols"])
    if rows * cols != len(dataset.samples):
        raise ValueError(
            f"grid {rows}x{cols} does not match {len(dataset.samples)} samples"
        )
    return rows, cols


def build_weighted_complex(
    dataset: Dataset,
    config: PipelineConfig,
    workers: int | None = None,
) -> WeightedComplex:
    """Build the weighted complex for one dataset per the configured scheme."""
    n = len(dataset.samples)
    if config.skeleton == "grid":
        rows, cols = _grid_shape(dataset)
        skeleton = grid_skeleton(rows, cols)
    else:
        skeleton = complete_skeleton(n)
    if config.weight_scheme == "cross-correlation":
        return cross_correlation_complex(
            skeleton, dataset, config.kernel_epsilon_factor, config.normalize
        )
    operators = [
        sample_diffusion_operator(s, median_factor=config.kernel_epsilon_factor)
        for s in dataset.samples
    ]
    return assign_weights(skeleton, operators, normalize=config.normalize, workers=workers)


def cross_correlation_complex(
    skeleton: Sequence[Simplex],
    dataset: Dataset,
    epsilon_factor: float = 1.0,
    normalize: bool = False,
) -> WeightedComplex:
    """Baseline weights from plain affinity correlations, no diffusion.

    Each sample is summarized by its flattened affinity matrix; an edge
    weighs the inverse absolute Pearson correlation of the two summaries
    and a triangle the inverse root-sum-square over its three edges'
    correlations.  Deliberately ignores the operator normalization, so
    tests can ask whether the diffusion machinery earns its keep.
    """
    vecs = []
    for s in dataset.samples:
        d = pairwise_distances(s)
        vecs.append(affinity(d, median_scale(d, epsilon_factor)).entries.ravel())
    n = len(vecs)
    rho = np.corrcoef(np.asarray(vecs)) if n > 1 else np.ones((1, 1))

    def edge_rho(a: int, b: int) -> float:
        r = float(rho[a, b])
        if not np.isfinite(r) or r == 0.0:
            raise ValueError(f"correlation between samples {a} and {b} is degenerate")
        return r

    skeleton = list(skeleton)
    weights = np.zeros(len(skeleton))
    for i, s in enumerate(skeleton):
        if s.dimension == 1:
            a, b = s.vertices
            weights[i] = 1.0 / abs(edge_rho(a, b))
        elif s.dimension == 2:
            a, b, c = s.vertices
            total = edge_rho(a, b) ** 2 + edge_rho(b, c) ** 2 + edge_rho(a, c) ** 2
            weights[i] = 1.0 / np.sqrt(total)
    if normalize:
        positive_dim = np.array([s.dimension > 0 for s in skeleton])
        med = float(np.median(weights[positive_dim]))
        if med <= 0.0:
            raise ValueError("median weight is not positive; cannot normalize")
        weights = weights / med
    return enforce_monotone(WeightedComplex(tuple(skeleton), weights))


def _default_labels(datasets: Sequence[Dataset]) -> tuple[str, ...]:
    return tuple(f"dataset_{i}" for i in range(len(datasets)))


def _check_labels(labels: Sequence[str], n: int) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise ValueError(f"need {n} labels, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise ValueError("dataset labels must be unique")
    return labels


def run_pipeline(
    datasets: Sequence[Dataset],
    config: PipelineConfig,
    out_dir: str | Path | None = None,
    labels: Sequence[str] | None = None,
    workers: int | None = None,
) -> tuple[DatasetDistanceMatrix, dict[str, dict[int, PersistenceDiagram]]]:
    """Run every stage on each dataset and return the distance matrix.

    Per dataset: diffusion operators, weighted complex, persistence
    diagrams in degrees 0 and 1; then one Wasserstein distance matrix in
    the configured degree.  With ``out_dir`` set, writes
    ``complexes/<label>.csv``, ``diagrams/<label>.csv``,
    ``distances.csv`` and the effective ``config.json`` so any later
    stage can be rerun from the saved files.  Deterministic: the same
    datasets and config produce byte-identical artifacts.
    """
    datasets = list(datasets)
    if len(datasets) < 2:
        raise ValueError(f"need at least 2 datasets, got {len(datasets)}")
    labels = (
        _check_labels(labels, len(datasets))
        if labels is not None
        else _default_labels(datasets)
    )

    out = None
    if out_dir is not None:
        out = Path(out_dir)
        (out / "complexes").mkdir(parents=True, exist_ok=True)
        (out / "diagrams").mkdir(parents=True, exist_ok=True)
        config.to_json(out / "config.json")

    diagrams: dict[str, dict[int, PersistenceDiagram]] = {}
    per_degree: list[PersistenceDiagram] = []
    for dataset, label in zip(datasets, labels):
        try:
            cx = build_weighted_complex(dataset, config, workers=workers)
        except ValueError as exc:
            raise PipelineError(f"dataset {label!r}, stage weights: {exc}") from exc
        try:
            pds = persistence_diagrams(cx, degrees=(0, 1))
        except ValueError as exc:
            raise PipelineError(f"dataset {label!r}, stage homology: {exc}") from exc
        diagrams[label] = pds
        per_degree.append(pds[config.degree])
        if out is not None:
            write_complex_csv(cx, out / "complexes" / f"{label}.csv")
            write_diagrams_csv(pds.values(), out / "diagrams" / f"{label}.csv")

    try:
        matrix = distance_matrix(per_degree, config.metric_spec(), labels=labels)
    except ValueError as exc:
        raise PipelineError(f"stage distance: {exc}") from exc
    if out is not None:
        write_distance_csv(matrix, out / "distances.csv")
    return matrix, diagrams


def graph_spectral_distances(
    datasets: Sequence[Dataset],
    config: PipelineConfig,
    labels: Sequence[str] | None = None,
) -> DatasetDistanceMatrix:
    """Baseline that skips homology: compare edge-weight spectra directly.

    Each dataset becomes the symmetric matrix of its pairwise edge
    weights; the distance between two datasets is the Euclidean distance
    between their sorted eigenvalue vectors.  All datasets must have the
    same number of samples for the spectra to be comparable.
    """
    datasets = list(datasets)
    if len(datasets) < 2:
        raise ValueError(f"need at least 2 datasets, got {len(datasets)}")
    labels = (
        _check_labels(labels, len(datasets))
        if labels is not None
        else _default_labels(datasets)
    )
    sizes = {len(d.samples) for d in datasets}
    if len(sizes) != 1:
        raise ValueError(f"spectral baseline needs equal sample counts, got {sorted(sizes)}")

    spectra = []
    for dataset, label in zip(datasets, labels):
        try:
            n = len(dataset.samples)
            cx = build_weighted_complex(
                dataset, dataclasses.replace(config, skeleton="complete")
            )
            w = np.zeros((n, n))
            for s in cx.simplexes:
                if s.dimension == 1:
                    a, b = s.vertices
                    w[a, b] = w[b, a] = cx.weight_of(s.vertices)
            spectra.append(np.sort(np.linalg.eigvalsh(w)))
        except ValueError as exc:
            raise PipelineError(f"dataset {label!r}, stage spectrum: {exc}") from exc

    n = len(datasets)
    entries = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.linalg.norm(spectra[i] - spectra[j]))
            entries[i, j] = entries[j, i] = d
    return DatasetDistanceMatrix(entries, labels)


def weight_profile(
    spec: TorusSpec, n_seeds: int
) -> list[tuple[str, int, float, float, int]]:
    """Group simplex weights by how much latent structure they share.

    Draws ``n_seeds`` datasets from ``spec`` (seeds ``spec.seed``,
    ``spec.seed + 1``, ...).  Every edge is bucketed by the number of
    circles its two samples share, every triangle by the three-way
    intersection size, using the raw alternating weights (no monotone
    enforcement, which would mix edge values into triangle buckets).
    Returns rows ``(simplex, common_count, mean, std, count)`` sorted by
    kind then count; buckets that never occur are omitted.
    """
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    edge_buckets: dict[int, list[float]] = {}
    tri_buckets: dict[int, list[float]] = {}
    for offset in range(n_seeds):
        ds = generate_torus_dataset(dataclasses.replace(spec, seed=spec.seed + offset))
        tuples = [set(t) for t in ds.metadata["index_tuples"]]
        operators = [sample_diffusion_operator(s) for s in ds.samples]
        skeleton = complete_skeleton(len(ds.samples))
        raw = raw_weights(skeleton, operators)
        for s, w in zip(skeleton, raw):
            if s.dimension == 1:
                a, b = s.vertices
                common = len(tuples[a] & tuples[b])
                edge_buckets.setdefault(common, []).append(float(w))
            elif s.dimension == 2:
                a, b, c = s.vertices
                common = len(tuples[a] & tuples[b] & tuples[c])
                tri_buckets.setdefault(common, []).append(float(w))

    rows: list[tuple[str, int, float, float, int]] = []
    for kind, buckets in (("edge", edge_buckets), ("triangle", tri_buckets)):
        for common in sorted(buckets):
            vals = np.asarray(buckets[common])
            rows.append(
                (kind, common, float(vals.mean()), float(vals.std()), len(vals))
            )
    return rows


def write_weight_profile_csv(
    rows: Sequence[tuple[str, int, float, float, int]], path: str | Path
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["simplex", "common_count", "mean_weight", "std_weight", "count"])
        for kind, common, mean, std, count in rows:
            writer.writerow([kind, common, repr(float(mean)), repr(float(std)), count])


def dimension_sweep(
    m_values: Sequence[int],
    per_m: int,
    template: TorusSpec,
    out_dir: str | Path | None = None,
    workers: int | None = None,
) -> tuple[DatasetDistanceMatrix, dict[str, int]]:
    """Distance matrix across datasets generated with different circle counts.

    For each value in ``m_values`` draws ``per_m`` torus datasets from
    ``template`` (with ``m`` swapped in and a fresh seed per dataset),
    labels them ``m<M>_r<rep>``, and runs the full pipeline with the
    degree-1 diagrams under the 2-Wasserstein metric.  Returns the
    matrix plus a label-to-M map so callers can split within/between
    groups.
    """
    m_values = [int(m) for m in m_values]
    if len(set(m_values)) < 2:
        raise ValueError(f"need at least 2 distinct m values, got {m_values}")
    if per_m < 1:
        raise ValueError(f"per_m must be >= 1, got {per_m}")

    datasets: list[Dataset] = []
    labels: list[str] = []
    m_of: dict[str, int] = {}
    seed = template.seed
    for m in m_values:
        for rep in range(per_m):
            spec = dataclasses.replace(template, m=m, seed=seed)
            seed += 1
            datasets.append(generate_torus_dataset(spec))
            label = f"m{m}_r{rep}"
            labels.append(label)
            m_of[label] = m

    config = PipelineConfig(degree=1, p=2.0)
    matrix, _ = run_pipeline(
        datasets, config, out_dir=out_dir, labels=labels, workers=workers
    )
    return matrix, m_of
