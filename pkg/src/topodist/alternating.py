"""Symmetric alternating diffusion across two or three samples.

Composing one sample's diffusion operator with another's transpose walks
through the shared latent variable; adding the two orders makes the result
symmetric.  The Frobenius norm of the combined operator is large when the
samples share structure and small when they do not, so its inverse serves as
a simplex weight: low weight = strong common structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from topodist.diffusion import DiffusionOperator

__all__ = [
    "PairOperator",
    "TripleOperator",
    "pair_operator",
    "triple_operator",
    "edge_weight",
    "triangle_weight",
]

_SYMMETRY_TOL = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def _check_symmetric(entries: np.ndarray, what: str) -> None:
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"{what} must be square, got shape {entries.shape}")
    if not np.isfinite(entries).all():
        raise ValueError(f"{what} contains non-finite values")
    gap = float(np.abs(entries - entries.T).max())
    if gap > _SYMMETRY_TOL:
        raise ValueError(f"{what} must be symmetric within 1e-12 (off by {gap:.3e})")


@dataclass(frozen=True)
class PairOperator:
    """Alternating-diffusion operator of two samples, tagged by vertex pair."""

    entries: np.ndarray
    pair: tuple[int, int]

    def __post_init__(self) -> None:
        entries = _readonly(self.entries)
        _check_symmetric(entries, "pair operator")
        pair = tuple(int(v) for v in self.pair)
        if len(pair) != 2 or pair[0] == pair[1]:
            raise ValueError(f"pair must be two distinct vertex ids, got {self.pair}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "pair", tuple(sorted(pair)))


@dataclass(frozen=True)
class TripleOperator:
    """Three-way alternating-diffusion operator, tagged by vertex triple."""

    entries: np.ndarray
    triple: tuple[int, int, int]

    def __post_init__(self) -> None:
        entries = _readonly(self.entries)
        _check_symmetric(entries, "triple operator")
        triple = tuple(int(v) for v in self.triple)
        if len(triple) != 3 or len(set(triple)) != 3:
            raise ValueError(f"triple must be three distinct vertex ids, got {self.triple}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "triple", tuple(sorted(triple)))


def pair_operator(
    k1: DiffusionOperator, k2: DiffusionOperator, pair: tuple[int, int] = (0, 1)
) -> PairOperator:
    """``S = K1 K2^T + K2 K1^T``, symmetric by construction.

    The result does not depend on the argument order.  ``pair`` tags the
    operator with the vertex ids of the two samples.
    """
    if k1.size != k2.size:
        raise ValueError(f"operator sizes differ: {k1.size} vs {k2.size}")
    a, b = k1.entries, k2.entries
    return PairOperator(a @ b.T + b @ a.T, pair)


def triple_operator(
    k1: DiffusionOperator,
    k2: DiffusionOperator,
    k3: DiffusionOperator,
    s12: PairOperator,
    s23: PairOperator,
    s13: PairOperator,
    triple: tuple[int, int, int] = (0, 1, 2),
) -> TripleOperator:
    """Three-way operator assembled from the three face pair operators.

    ``S = S12 K3^T + K3 S12 + S23 K1^T + K1 S23 + S13 K2^T + K2 S13``.
    Each pair operator's tag must name the matching face of ``triple``.
    """
    sizes = {k1.size, k2.size, k3.size, s12.entries.shape[0], s23.entries.shape[0], s13.entries.shape[0]}
    if len(sizes) != 1:
        raise ValueError(f"inconsistent operator sizes: {sorted(sizes)}")
    i1, i2, i3 = (int(v) for v in triple)
    faces = (tuple(sorted((i1, i2))), tuple(sorted((i2, i3))), tuple(sorted((i1, i3))))
    for s, face in zip((s12, s23, s13), faces):
        if s.pair != face:
            raise ValueError(f"pair operator tagged {s.pair} passed for face {face}")

    out = np.zeros((k1.size, k1.size))
    # each face operator multiplies the opposite vertex's diffusion operator
    for s, k in ((s12, k3), (s23, k1), (s13, k2)):
        out += s.entries @ k.entries.T + k.entries @ s.entries
    return TripleOperator(out, (i1, i2, i3))


def _inverse_frobenius(entries: np.ndarray, what: str) -> float:
    norm = float(np.sqrt((entries**2).sum()))
    if norm == 0.0:
        raise ValueError(f"{what} is the zero matrix; its weight is infinite")
    return 1.0 / norm


def edge_weight(s: PairOperator) -> float:
    """Edge weight: inverse Frobenius norm of the pair operator."""
    return _inverse_frobenius(s.entries, "pair operator")


def triangle_weight(s: TripleOperator) -> float:
    """Triangle weight: inverse Frobenius norm of the triple operator."""
    return _inverse_frobenius(s.entries, "triple operator")
