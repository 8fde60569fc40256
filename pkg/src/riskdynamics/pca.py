"""Principal component analysis via SVD of the centered matrix.

SVD is used instead of an eigendecomposition of the covariance matrix
for numerical safety.  Components follow a deterministic sign
convention: the largest-magnitude entry of each component is positive.
Explained variances use the population convention (divide by n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficientError
from .preprocess import FeatureMatrix


@dataclass(frozen=True)
class PcaModel:
    components: np.ndarray        # (n_components, n_features), orthonormal rows
    explained_variance: np.ndarray  # non-increasing
    column_means: np.ndarray
    total_variance: float

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        return self.explained_variance / self.total_variance

    @property
    def n_components(self) -> int:
        return self.components.shape[0]


def _as_array(matrix) -> np.ndarray:
    if isinstance(matrix, FeatureMatrix):
        return matrix.values
    return np.asarray(matrix, dtype=float)


def pca_fit(matrix, n_components: int) -> PcaModel:
    """Fit the top principal directions of a row-sample matrix."""
    x = _as_array(matrix)
    n, d = x.shape
    if not 1 <= n_components <= min(n - 1, d):
        raise ValueError(
            f"n_components must be in [1, {min(n - 1, d)}], got {n_components}"
        )
    means = x.mean(axis=0)
    centered = x - means
    u, s, vt = np.linalg.svd(centered, full_matrices=False)

    rank_tol = s.max(initial=0.0) * max(n, d) * np.finfo(float).eps
    rank = int((s > rank_tol).sum())
    if n_components > rank:
        raise RankDeficientError(n_components, rank)

    components = vt[:n_components].copy()
    # sign convention: largest-magnitude entry of each component positive
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    explained = (s[:n_components] ** 2) / n
    total = float(centered.var(axis=0).sum())
    return PcaModel(components, explained, means, total)


def pca_transform(model: PcaModel, matrix) -> FeatureMatrix | np.ndarray:
    """Project rows onto the fitted components (after centering)."""
    x = _as_array(matrix)
    if x.shape[1] != model.components.shape[1]:
        raise ValueError("matrix width does not match fitted components")
    projected = (x - model.column_means) @ model.components.T
    if isinstance(matrix, FeatureMatrix):
        names = tuple(f"pc{j + 1}" for j in range(model.n_components))
        return FeatureMatrix(projected, names, matrix.row_keys)
    return projected


def pca_inverse_transform(model: PcaModel, projected) -> np.ndarray:
    """Map projected rows back to the original feature space."""
    z = _as_array(projected)
    return z @ model.components + model.column_means
