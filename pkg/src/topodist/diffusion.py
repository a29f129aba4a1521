"""Per-sample diffusion operators.

The chain is: pairwise distances within a sample, a Gaussian affinity
``W(a, b) = exp(-d(a, b)^2 / epsilon)`` with the scale picked by a median
heuristic, then a two-step normalization that first divides out the local
density (``Q^-1 W Q^-1``) and then row-normalizes, yielding a row-stochastic
operator whose spectrum is real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from topodist.dataset import Sample

__all__ = [
    "AffinityMatrix",
    "DiffusionOperator",
    "pairwise_distances",
    "median_scale",
    "affinity",
    "diffusion_operator",
    "sample_diffusion_operator",
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric Gaussian affinity matrix with unit diagonal.

    ``epsilon`` records the kernel scale that produced the entries.
    """

    entries: np.ndarray
    epsilon: float

    def __post_init__(self) -> None:
        w = _readonly(self.entries)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"affinity matrix must be square, got shape {w.shape}")
        if not np.array_equal(w, w.T):
            raise ValueError("affinity matrix must be exactly symmetric")
        if not np.array_equal(np.diag(w), np.ones(w.shape[0])):
            raise ValueError("affinity diagonal must be all ones")
        if not ((w > 0.0) & (w <= 1.0)).all():
            raise ValueError(
                "affinity entries must lie in (0, 1]; an entry underflowed to 0 "
                "or exceeded 1 (epsilon too small or negative squared distance)"
            )
        object.__setattr__(self, "entries", w)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DiffusionOperator:
    """Row-stochastic operator: nonnegative entries, rows summing to 1."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        k = _readonly(self.entries)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValueError(f"operator must be square, got shape {k.shape}")
        if (k < 0.0).any():
            raise ValueError("operator entries must be nonnegative")
        row_sums = k.sum(axis=1)
        if not np.allclose(row_sums, 1.0, rtol=0.0, atol=1e-12):
            worst = float(np.abs(row_sums - 1.0).max())
            raise ValueError(f"operator rows must sum to 1 within 1e-12 (off by {worst:.3e})")
        object.__setattr__(self, "entries", k)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def pairwise_distances(sample: Sample, metric: str = "euclidean") -> np.ndarray:
    """Distance matrix between the observations of one sample.

    Only the Euclidean metric is supported.  The result is exactly symmetric
    with an exactly zero diagonal (each pair is computed once).
    """
    if metric != "euclidean":
        raise ValueError(f"unsupported metric {metric!r}")
    return squareform(pdist(sample.observations, metric="euclidean"))


def median_scale(distances: np.ndarray, factor: float = 1.0) -> float:
    """Kernel scale: ``factor`` times the median squared pairwise distance.

    The median runs over the strictly-upper-triangle entries only, squared so
    that ``factor=1`` puts the bulk of the Gaussian exponents near 1.
    """
    if factor <= 0.0:
        raise ValueError(f"factor must be > 0, got {factor}")
    d = np.asarray(distances, dtype=np.float64)
    upper = d[np.triu_indices(d.shape[0], k=1)]
    med = float(np.median(upper**2))
    if med <= 0.0:
        raise ValueError("all pairwise distances are zero; kernel scale is degenerate")
    return factor * med


def affinity(distances: np.ndarray, epsilon: float) -> AffinityMatrix:
    """Gaussian affinity ``exp(-d^2 / epsilon)`` of a distance matrix."""
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    d = np.asarray(distances, dtype=np.float64)
    return AffinityMatrix(np.exp(-(d**2) / epsilon), epsilon)


def diffusion_operator(w: AffinityMatrix) -> DiffusionOperator:
    """Two-step normalization of an affinity matrix.

    First the density correction ``W~ = Q^-1 W Q^-1`` with ``Q = diag(W 1)``,
    then row normalization ``K = Q~^-1 W~`` with ``Q~ = diag(W~ 1)``.  The
    result is row-stochastic and similar to a symmetric matrix via
    ``Q~^(1/2) K Q~^(-1/2)``.
    """
    mat = w.entries
    q = mat.sum(axis=1)
    if (q <= 0.0).any():
        raise ValueError("affinity matrix has a nonpositive row sum")
    w_tilde = mat / np.outer(q, q)
    q_tilde = w_tilde.sum(axis=1)
    if (q_tilde <= 0.0).any():
        raise ValueError("density-normalized matrix has a nonpositive row sum")
    k = w_tilde / q_tilde[:, np.newaxis]
    # float row sums land within ~1e-15 of 1; the type re-checks the 1e-12 bound
    return DiffusionOperator(k)


def sample_diffusion_operator(
    sample: Sample, median_factor: float = 1.0, metric: str = "euclidean"
) -> DiffusionOperator:
    """Full chain from a sample to its diffusion operator.

    The kernel scale is the median heuristic applied to this sample's own
    distances.
    """
    d = pairwise_distances(sample, metric=metric)
    eps = median_scale(d, median_factor)
    return diffusion_operator(affinity(d, eps))
