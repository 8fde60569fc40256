"""Clustering validity indices and binary-classification metrics.

All three validity indices use Euclidean distance.  Degenerate geometry
(coincident centroids, zero within-cluster scatter) yields an infinite
sentinel plus a flag instead of an exception so sweeps over k never
abort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    LengthMismatchError,
    NonBinaryLabelsError,
    OneClassError,
    SingleClusterError,
)


def _as_array(matrix) -> np.ndarray:
    values = getattr(matrix, "values", matrix)
    return np.asarray(values, dtype=float)


def _groups(labels: np.ndarray) -> list[np.ndarray]:
    return [np.flatnonzero(labels == c) for c in np.unique(labels)]


def silhouette(matrix, labels) -> float:
    """Mean silhouette coefficient; singleton-cluster points score 0."""
    x = _as_array(matrix)
    labels = np.asarray(labels)
    groups = _groups(labels)
    if len(groups) < 2:
        raise SingleClusterError("silhouette needs at least 2 clusters")

    # row-blocked pairwise distances: exact differences, modest memory
    dist = np.empty((len(x), len(x)))
    for i in range(len(x)):
        dist[i] = np.sqrt(((x[i] - x) ** 2).sum(axis=1))
    scores = np.zeros(len(x))
    for gi, members in enumerate(groups):
        size = len(members)
        for i in members:
            if size == 1:
                scores[i] = 0.0
                continue
            a = dist[i, members].sum() / (size - 1)
            b = min(dist[i, other].mean() for gj, other in enumerate(groups) if gj != gi)
            denom = max(a, b)
            scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def calinski_harabasz(matrix, labels) -> float:
    """Between/within scatter ratio, scaled by (n-k)/(k-1)."""
    x = _as_array(matrix)
    labels = np.asarray(labels)
    groups = _groups(labels)
    n, k = len(x), len(groups)
    if k < 2:
        raise SingleClusterError("calinski-harabasz needs at least 2 clusters")
    if k > n - 1:
        raise ValueError("need k <= n-1")

    overall = x.mean(axis=0)
    between = 0.0
    within = 0.0
    for members in groups:
        centroid = x[members].mean(axis=0)
        between += len(members) * float(((centroid - overall) ** 2).sum())
        within += float(((x[members] - centroid) ** 2).sum())
    if within == 0:
        return math.inf
    return (between / (k - 1)) / (within / (n - k))


def davies_bouldin(matrix, labels) -> float:
    """Mean over clusters of the worst (s_i + s_j) / d_ij similarity."""
    x = _as_array(matrix)
    labels = np.asarray(labels)
    groups = _groups(labels)
    k = len(groups)
    if k < 2:
        raise SingleClusterError("davies-bouldin needs at least 2 clusters")

    centroids = np.array([x[members].mean(axis=0) for members in groups])
    scatters = np.array([
        float(np.sqrt(((x[members] - centroids[gi]) ** 2).sum(axis=1)).mean())
        for gi, members in enumerate(groups)
    ])
    total = 0.0
    for i in range(k):
        worst = 0.0
        for j in range(k):
            if j == i:
                continue
            d = float(np.sqrt(((centroids[i] - centroids[j]) ** 2).sum()))
            if d == 0:
                return math.inf
            worst = max(worst, (scatters[i] + scatters[j]) / d)
        total += worst
    return total / k


@dataclass(frozen=True)
class ClusterValidityReport:
    silhouette: float
    calinski_harabasz: float
    davies_bouldin: float

    @property
    def degenerate(self) -> bool:
        return math.isinf(self.calinski_harabasz) or math.isinf(self.davies_bouldin)

    def to_dict(self) -> dict:
        return {
            "silhouette": self.silhouette,
            "calinski_harabasz": self.calinski_harabasz,
            "davies_bouldin": self.davies_bouldin,
        }


def cluster_validity(matrix, labels) -> ClusterValidityReport:
    return ClusterValidityReport(
        silhouette=silhouette(matrix, labels),
        calinski_harabasz=calinski_harabasz(matrix, labels),
        davies_bouldin=davies_bouldin(matrix, labels),
    )


@dataclass(frozen=True)
class ConfusionMatrix2:
    """2x2 confusion counts; cell c_ij = true class i predicted class j."""

    c00: int
    c01: int
    c10: int
    c11: int

    @property
    def total(self) -> int:
        return self.c00 + self.c01 + self.c10 + self.c11

    def as_array(self) -> list[list[int]]:
        return [[self.c00, self.c01], [self.c10, self.c11]]


def confusion(true_labels, predicted_labels) -> ConfusionMatrix2:
    t = np.asarray(true_labels)
    p = np.asarray(predicted_labels)
    if t.shape != p.shape:
        raise LengthMismatchError(f"{t.shape} vs {p.shape}")
    for arr in (t, p):
        if not np.isin(arr, (0, 1)).all():
            raise NonBinaryLabelsError("labels must be in {0, 1}")
    return ConfusionMatrix2(
        c00=int(((t == 0) & (p == 0)).sum()),
        c01=int(((t == 0) & (p == 1)).sum()),
        c10=int(((t == 1) & (p == 0)).sum()),
        c11=int(((t == 1) & (p == 1)).sum()),
    )


def accuracy(cm: ConfusionMatrix2) -> float:
    return (cm.c00 + cm.c11) / cm.total


def auc(scores, true_labels) -> float:
    """Mann-Whitney AUC with midranks: P(pos score > neg) + tie/2."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(true_labels)
    if s.shape != y.shape:
        raise LengthMismatchError(f"{s.shape} vs {y.shape}")
    if not np.isin(y, (0, 1)).all():
        raise NonBinaryLabelsError("labels must be in {0, 1}")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise OneClassError("AUC needs both classes present")

    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s))
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and s[order[j + 1]] == s[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1  # midrank, 1-based
        i = j + 1
    rank_sum = ranks[y == 1].sum()
    u = rank_sum - n_pos * (n_pos + 1) / 2
    return u / (n_pos * n_neg)
