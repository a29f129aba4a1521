"""Wasserstein distances between persistence diagrams.

Each point of one diagram may match a point of the other diagram or slide to
its own projection on the diagonal x = y; the distance is the p-th root of
the minimal total p-th-power movement.  The matching is solved exactly as a
balanced assignment problem: an (n1 + n2) square cost matrix where every real
point also owns one diagonal slot and diagonal-to-diagonal cells cost 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from topodist.homology import PersistenceDiagram

__all__ = [
    "DiagramDistanceSpec",
    "DatasetDistanceMatrix",
    "diagonal_gap",
    "wasserstein",
    "distance_matrix",
    "write_distance_csv",
    "read_distance_csv",
]


@dataclass(frozen=True)
class DiagramDistanceSpec:
    """How to compare diagrams: order p, homology degree, handling of ``inf``.

    ``infinite_policy`` is either ``drop`` (remove essential classes before
    matching) or ``cap`` (replace infinite deaths with ``cap_value``).
    Defaults follow the experimental setup: degree 1, p = 2, drop.
    """

    p: float = 2.0
    degree: int = 1
    infinite_policy: Literal["drop", "cap"] = "drop"
    cap_value: float | None = None

    def __post_init__(self) -> None:
        if not self.p >= 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.degree not in (0, 1):
            raise ValueError(f"degree must be 0 or 1, got {self.degree}")
        if self.infinite_policy not in ("drop", "cap"):
            raise ValueError(f"unknown infinite policy {self.infinite_policy!r}")
        if self.infinite_policy == "cap":
            if self.cap_value is None or not math.isfinite(self.cap_value):
                raise ValueError("cap policy requires a finite cap_value")


@dataclass(frozen=True)
class DatasetDistanceMatrix:
    """Symmetric nonnegative distance matrix with a zero diagonal."""

    entries: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=np.float64, copy=True)
        m.setflags(write=False)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"distance matrix must be square, got {m.shape}")
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != m.shape[0]:
            raise ValueError(f"{m.shape[0]} rows but {len(labels)} labels")
        if not np.array_equal(m, m.T):
            raise ValueError("distance matrix must be exactly symmetric")
        if not np.array_equal(np.diag(m), np.zeros(m.shape[0])):
            raise ValueError("distance matrix diagonal must be exactly zero")
        if (m < 0.0).any() or not np.isfinite(m).all():
            raise ValueError("distances must be finite and nonnegative")
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def diagonal_gap(point: tuple[float, float]) -> float:
    """Euclidean distance from a finite (birth, death) point to the diagonal."""
    b, d = point
    if math.isinf(d):
        raise ValueError("infinite death; resolve it with an infinite policy first")
    if not b <= d:
        raise ValueError(f"birth {b} exceeds death {d}")
    return (d - b) / math.sqrt(2.0)


def _resolved_points(
    diagram: PersistenceDiagram, spec: DiagramDistanceSpec
) -> list[tuple[float, float]]:
    out = []
    for p in diagram.pairs:
        if math.isinf(p.death):
            if spec.infinite_policy == "drop":
                continue
            death = float(spec.cap_value)  # type: ignore[arg-type]
            if death < p.birth:
                raise ValueError(
                    f"cap_value {death} is below a birth {p.birth}; cannot cap"
                )
            out.append((p.birth, death))
        else:
            out.append((p.birth, p.death))
    return out


def wasserstein(
    pd1: PersistenceDiagram, pd2: PersistenceDiagram, spec: DiagramDistanceSpec
) -> float:
    """Exact p-Wasserstein distance between two diagrams of ``spec.degree``."""
    for dg in (pd1, pd2):
        if dg.degree != spec.degree:
            raise ValueError(f"diagram degree {dg.degree} does not match spec degree {spec.degree}")
    a = _resolved_points(pd1, spec)
    b = _resolved_points(pd2, spec)
    n1, n2 = len(a), len(b)
    if n1 == 0 and n2 == 0:
        return 0.0

    size = n1 + n2
    cost = np.zeros((size, size))
    for i, pa in enumerate(a):
        for j, pb in enumerate(b):
            cost[i, j] = math.hypot(pa[0] - pb[0], pa[1] - pb[1]) ** spec.p
    # each real point owns one diagonal slot; foreign slots are forbidden
    cost[:n1, n2:] = np.inf
    for i, pa in enumerate(a):
        cost[i, n2 + i] = diagonal_gap(pa) ** spec.p
    cost[n1:, :n2] = np.inf
    for j, pb in enumerate(b):
        cost[n1 + j, j] = diagonal_gap(pb) ** spec.p
    # diagonal-to-diagonal cells (bottom-right block) stay 0

    rows, cols = linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum())
    return total ** (1.0 / spec.p)


def distance_matrix(
    diagrams: Sequence[PersistenceDiagram],
    spec: DiagramDistanceSpec,
    labels: Sequence[str] | None = None,
) -> DatasetDistanceMatrix:
    """All pairwise Wasserstein distances; each unordered pair solved once."""
    n = len(diagrams)
    if labels is None:
        labels = [f"dataset_{i}" for i in range(n)]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = wasserstein(diagrams[i], diagrams[j], spec)
            out[i, j] = d
            out[j, i] = d
    return DatasetDistanceMatrix(out, tuple(labels))


def write_distance_csv(m: DatasetDistanceMatrix, path: str | Path) -> None:
    """CSV with labels as first row and first column, 12 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["", *m.labels])
        for label, row in zip(m.labels, m.entries):
            writer.writerow([label, *(format(v, ".12g") for v in row)])


def read_distance_csv(path: str | Path) -> DatasetDistanceMatrix:
    """Read a matrix written by :func:`write_distance_csv`."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows or rows[0][:1] != [""]:
        raise ValueError(f"distance CSV must start with an empty-corner header: {path}")
    labels = rows[0][1:]
    if len(rows) != len(labels) + 1:
        raise ValueError(f"expected {len(labels)} data rows, found {len(rows) - 1}")
    entries = np.zeros((len(labels), len(labels)))
    for i, row in enumerate(rows[1:]):
        if row[0] != labels[i]:
            raise ValueError(f"row label {row[0]!r} does not match column label {labels[i]!r}")
        if len(row) != len(labels) + 1:
            raise ValueError(f"row {row[0]!r} has {len(row) - 1} values, expected {len(labels)}")
        entries[i] = [float(v) for v in row[1:]]
    return DatasetDistanceMatrix(entries, tuple(labels))
