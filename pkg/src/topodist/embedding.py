"""Diffusion-maps embedding of datasets from their distance matrix.

The dataset-level distances feed the same Gaussian-affinity and two-step
normalization chain used within samples; the resulting row-stochastic kernel
is diagonalized through its symmetric conjugate (guaranteeing real
eigenpairs), the trivial leading pair is dropped, and each dataset i is
embedded as (l_1 phi_1(i), ..., l_d phi_d(i)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from topodist.diffusion import affinity, median_scale
from topodist.wasserstein import DatasetDistanceMatrix

__all__ = [
    "Embedding",
    "diffusion_maps",
    "export_embedding",
    "read_embedding_csv",
]


@dataclass(frozen=True)
class Embedding:
    """Per-dataset coordinates with the eigenvalues that scaled them."""

    coordinates: np.ndarray
    eigenvalues: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        coords = np.array(self.coordinates, dtype=np.float64, copy=True)
        coords.setflags(write=False)
        lam = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        lam.setflags(write=False)
        labels = tuple(str(x) for x in self.labels)
        if coords.ndim != 2:
            raise ValueError(f"coordinates must be 2-d, got shape {coords.shape}")
        n, d = coords.shape
        if len(labels) != n:
            raise ValueError(f"{n} rows but {len(labels)} labels")
        if lam.shape != (d,):
            raise ValueError(f"{d} coordinate columns but {lam.shape} eigenvalues")
        if not d < n:
            raise ValueError(f"embedding dimension {d} must be below the dataset count {n}")
        if not np.isfinite(coords).all() or not np.isfinite(lam).all():
            raise ValueError("embedding contains non-finite values")
        if (np.diff(lam) > 0.0).any():
            raise ValueError("eigenvalues must be sorted descending")
        if (np.abs(lam) > 1.0 + 1e-10).any():
            raise ValueError("eigenvalues must lie in [-1, 1] up to 1e-10")
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "labels", labels)

    @property
    def n_datasets(self) -> int:
        return self.coordinates.shape[0]

    @property
    def dimension(self) -> int:
        return self.coordinates.shape[1]


def diffusion_maps(
    distances: DatasetDistanceMatrix,
    epsilon_factor: float = 1.0,
    d: int | None = None,
) -> Embedding:
    """Diffusion-maps coordinates from a dataset distance matrix.

    The kernel scale is ``epsilon_factor`` times the median squared
    off-diagonal distance.  ``d`` defaults to 20, clamped to one below the
    dataset count; an explicit ``d`` must satisfy ``1 <= d < n``.  The
    eigenproblem is solved on the symmetric conjugate of the row-stochastic
    kernel; eigenvector signs are fixed by making each vector's
    largest-magnitude entry positive.
    """
    n = distances.n
    if d is None:
        d = min(20, n - 1)
    elif not 1 <= d < n:
        raise ValueError(f"embedding dimension must satisfy 1 <= d < {n}, got {d}")

    eps = median_scale(distances.entries, epsilon_factor)
    w = affinity(distances.entries, eps).entries
    q = w.sum(axis=1)
    w_tilde = w / np.outer(q, q)
    q_tilde = w_tilde.sum(axis=1)
    k = w_tilde / q_tilde[:, np.newaxis]
    if np.abs(k.sum(axis=1) - 1.0).max() > 1e-12:
        raise ValueError("internal kernel failed row normalization")

    inv_sqrt = 1.0 / np.sqrt(q_tilde)
    conjugate = w_tilde * np.outer(inv_sqrt, inv_sqrt)
    vals, vecs = np.linalg.eigh(conjugate)
    top = np.argsort(vals)[::-1][: d + 1]
    lam = vals[top]
    phi = inv_sqrt[:, np.newaxis] * vecs[:, top]
    for j in range(phi.shape[1]):
        lead = int(np.argmax(np.abs(phi[:, j])))
        if phi[lead, j] < 0.0:
            phi[:, j] = -phi[:, j]

    if abs(lam[0] - 1.0) > 1e-10:
        raise ValueError(f"leading eigenvalue is {lam[0]}, expected 1")
    coords = phi[:, 1:] * lam[1:][np.newaxis, :]
    return Embedding(coords, lam[1:], distances.labels)


def export_embedding(e: Embedding, path: str | Path) -> None:
    """CSV with a label column and one column per coordinate, 12 digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", *(f"coord_{j + 1}" for j in range(e.dimension))])
        for label, row in zip(e.labels, e.coordinates):
            writer.writerow([label, *(format(v, ".12g") for v in row)])


def read_embedding_csv(path: str | Path) -> tuple[tuple[str, ...], np.ndarray]:
    """Labels and coordinates back from :func:`export_embedding` output.

    Eigenvalues are not stored in the CSV, so the result is not a full
    :class:`Embedding`.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows or rows[0][:1] != ["label"]:
        raise ValueError(f"unexpected embedding CSV header in {path}")
    d = len(rows[0]) - 1
    if rows[0][1:] != [f"coord_{j + 1}" for j in range(d)]:
        raise ValueError(f"unexpected coordinate columns in {path}")
    labels = []
    coords = np.zeros((len(rows) - 1, d))
    for i, row in enumerate(rows[1:]):
        if len(row) != d + 1:
            raise ValueError(f"row {i} has {len(row) - 1} coordinates, expected {d}")
        labels.append(row[0])
        coords[i] = [float(v) for v in row[1:]]
    return tuple(labels), coords
