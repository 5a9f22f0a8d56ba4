"""Ratio profiles, unit normalization and 2-D PCA spatialization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canon import MotifId, all_motifs

DEFAULT_EPSILON = 4


@dataclass
class ProfileMatrix:
    egos: list[str]
    motifs: list[MotifId]
    values: np.ndarray  # egos x motifs, non-negative counts

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.egos), len(self.motifs)):
            raise ValueError(f"values shape {self.values.shape} does not match "
                             f"{len(self.egos)} egos x {len(self.motifs)} motifs")

    @classmethod
    def from_census(cls, census, motifs=None) -> "ProfileMatrix":
        """Columns for every motif seen by any ego (optionally intersected with ``motifs``)."""
        observed = census.observed()
        if motifs is not None:
            wanted = set(motifs)
            observed = [m for m in observed if m in wanted]
        universe = all_motifs()
        cols = [universe.index(m) for m in observed]
        return cls(list(census.egos), list(observed), census.counts[:, cols])

    def restrict(self, motifs) -> "ProfileMatrix":
        wanted = set(motifs)
        keep = [i for i, m in enumerate(self.motifs) if m in wanted]
        return ProfileMatrix(list(self.egos), [self.motifs[i] for i in keep], self.values[:, keep])

    def rows(self, egos) -> "ProfileMatrix":
        idx = [self.egos.index(e) for e in egos]
        return ProfileMatrix(list(egos), list(self.motifs), self.values[idx])


@dataclass
class RatioProfile:
    egos: list[str]
    motifs: list[MotifId]
    rp: np.ndarray
    nrp: np.ndarray
    epsilon: int


def ratio_values(values: np.ndarray, epsilon: int = DEFAULT_EPSILON) -> np.ndarray:
    """(count - column mean) / (count + column mean + epsilon), per cell."""
    values = np.asarray(values, dtype=float)
    mean = values.mean(axis=0)
    return (values - mean) / (values + mean + epsilon)


def normalize_profile(rp) -> np.ndarray:
    """Scale to unit Euclidean norm; a zero vector stays zero.  Works row-wise on 2-D input."""
    rp = np.asarray(rp, dtype=float)
    norm = np.sqrt((rp ** 2).sum(axis=-1, keepdims=True))
    safe = np.where(norm > 0, norm, 1.0)
    return np.where(norm > 0, rp / safe, 0.0)


def ratio_profile(m: ProfileMatrix, epsilon: int = DEFAULT_EPSILON) -> RatioProfile:
    if epsilon < 1:
        raise ValueError("epsilon must be >= 1")
    if m.values.shape[0] == 0:
        raise ValueError("profile matrix has no egos")
    rp = ratio_values(m.values, epsilon)
    return RatioProfile(list(m.egos), list(m.motifs), rp, normalize_profile(rp), epsilon)


@dataclass
class Spatialization:
    coords: np.ndarray  # egos x 2
    explained_variance: np.ndarray  # fraction per component
    loadings: np.ndarray  # features x 2
    mean: np.ndarray

    def as_dict(self, egos) -> dict[str, tuple[float, float]]:
        return {e: (float(x), float(y)) for e, (x, y) in zip(egos, self.coords)}


def pca(x, n_components: int = 2) -> Spatialization:
    """Covariance eigendecomposition (dense, exact) with a fixed sign convention.

    The largest-magnitude loading of every component is made positive.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise ValueError("PCA needs at least 2 rows and 2 columns")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (x.shape[0] - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    for j in range(evecs.shape[1]):
        col = evecs[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            evecs[:, j] = -col
    total = evals.sum()
    frac = evals / total if total > 0 else np.zeros_like(evals)
    k = min(n_components, evecs.shape[1])
    loadings = evecs[:, :k]
    return Spatialization(centered @ loadings, frac[:k], loadings, mean)


def pca_2d(profiles) -> Spatialization:
    return pca(profiles, 2)


def two_motif_plot(m: ProfileMatrix, a: MotifId, b: MotifId,
                   epsilon: int = DEFAULT_EPSILON) -> dict[str, tuple[float, float]]:
    for motif in (a, b):
        if motif not in m.motifs:
            raise KeyError(f"motif {motif} not in profile matrix")
    ia, ib = m.motifs.index(a), m.motifs.index(b)
    nrp = ratio_profile(m, epsilon).nrp
    return {e: (float(nrp[i, ia]), float(nrp[i, ib])) for i, e in enumerate(m.egos)}
