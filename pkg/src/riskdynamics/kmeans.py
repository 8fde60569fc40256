"""KMeans clustering with k-means++ seeding, restarts, and canonical labels.

Cluster ids are relabeled after fitting so that cluster 0 has the
highest centroid value in the canonical column ("wri" when present,
otherwise column 0).  That pins "cluster 0 = the high-risk group" across
runs and makes transition reports unambiguous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatchError, TooFewRowsError
from .metrics import silhouette
from .preprocess import FeatureMatrix


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 2
    n_restarts: int = 10
    max_iter: int = 300
    tol: float = 1e-6
    seed: int = 42
    canonical_column: str = "wri"

    def __post_init__(self):
        if self.k < 1 or self.n_restarts < 1 or self.max_iter < 1:
            raise ValueError("k, n_restarts and max_iter must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class ClusterModel:
    centroids: np.ndarray             # (k, d)
    assignments: np.ndarray           # per-row cluster id in [0, k)
    inertia: float
    iterations_run: int
    inertia_history: tuple[float, ...]  # inertia at each assignment step
    canonical_order: tuple[int, ...]    # original id of each final cluster
    columns: tuple[str, ...]
    row_keys: tuple[tuple[str, int], ...]
    config: KMeansConfig

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def to_json(self) -> str:
        payload = {
            "k": self.k,
            "inertia": self.inertia,
            "iterations_run": self.iterations_run,
            "canonical_order": list(self.canonical_order),
            "centroids": [[float(v) for v in row] for row in self.centroids],
            "columns": list(self.columns),
            "assignments": [
                {"country": c, "year": y, "cluster": int(a)}
                for (c, y), a in zip(self.row_keys, self.assignments)
            ],
            "config": {
                "k": self.config.k,
                "n_restarts": self.config.n_restarts,
                "max_iter": self.config.max_iter,
                "tol": self.config.tol,
                "seed": self.config.seed,
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # (n, k) matrix of squared Euclidean distances, computed exactly
    return ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _plus_plus_seed(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = ((x - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total == 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centers[j] = x[idx]
        closest = np.minimum(closest, ((x - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    history = []
    assignments = np.zeros(len(x), dtype=int)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = _squared_distances(x, centers)
        assignments = d2.argmin(axis=1)  # ties -> lowest cluster id
        history.append(float(d2[np.arange(len(x)), assignments].sum()))

        new_centers = centers.copy()
        for c in range(centers.shape[0]):
            members = assignments == c
            if members.any():
                new_centers[c] = x[members].mean(axis=0)
        # re-seed empty clusters at the point farthest from its centroid
        empty = [c for c in range(centers.shape[0]) if not (assignments == c).any()]
        if empty:
            residual = d2[np.arange(len(x)), assignments].copy()
            for c in empty:
                far = int(residual.argmax())
                new_centers[c] = x[far]
                residual[far] = -1.0
        shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if shift < tol:
            break

    d2 = _squared_distances(x, centers)
    assignments = d2.argmin(axis=1)
    inertia = float(d2[np.arange(len(x)), assignments].sum())
    history.append(inertia)
    return centers, assignments, inertia, iterations, history


def kmeans_fit(matrix: FeatureMatrix, config: KMeansConfig | None = None) -> ClusterModel:
    """Best-of-restarts Lloyd iterations from k-means++ seeding."""
    config = config or KMeansConfig()
    x = matrix.values
    if x.shape[0] < config.k:
        raise TooFewRowsError(f"{x.shape[0]} rows < k={config.k}")

    best = None
    for restart in range(config.n_restarts):
        rng = np.random.default_rng([config.seed, restart])
        centers = _plus_plus_seed(x, config.k, rng)
        result = _lloyd(x, centers, config.max_iter, config.tol)
        if best is None or result[2] < best[2]:  # strict: first best wins ties
            best = result

    centers, assignments, inertia, iterations, history = best
    order = _canonical_order(centers, matrix.columns, config.canonical_column)
    relabel = np.empty(config.k, dtype=int)
    for new_id, old_id in enumerate(order):
        relabel[old_id] = new_id
    return ClusterModel(
        centroids=centers[list(order)],
        assignments=relabel[assignments],
        inertia=inertia,
        iterations_run=iterations,
        inertia_history=tuple(history),
        canonical_order=order,
        columns=matrix.columns,
        row_keys=matrix.row_keys,
        config=config,
    )


def _canonical_order(centers: np.ndarray, columns, canonical_column: str) -> tuple[int, ...]:
    col = columns.index(canonical_column) if canonical_column in columns else 0
    # descending canonical value; stable on ties
    order = sorted(range(len(centers)), key=lambda c: (-centers[c, col], c))
    return tuple(order)


def assign(model: ClusterModel, matrix) -> np.ndarray:
    """Map each row to its nearest centroid; ties go to the lowest id."""
    x = matrix.values if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=float)
    if x.shape[1] != model.centroids.shape[1]:
        raise DimensionMismatchError(
            f"matrix has {x.shape[1]} columns, centroids have {model.centroids.shape[1]}"
        )
    return _squared_distances(x, model.centroids).argmin(axis=1)


@dataclass(frozen=True)
class SelectKResult:
    k: int
    table: tuple[tuple[int, float], ...]  # (k, silhouette) per candidate


def select_k(matrix: FeatureMatrix, k_range: tuple[int, int],
             config: KMeansConfig | None = None) -> SelectKResult:
    """Pick k by maximum silhouette over an inclusive range; ties -> smaller k."""
    config = config or KMeansConfig()
    lo, hi = k_range
    if lo < 2 or hi < lo or hi > matrix.shape[0] - 1:
        raise ValueError(f"k range [{lo}, {hi}] outside [2, {matrix.shape[0] - 1}]")
    table = []
    for k in range(lo, hi + 1):
        model = kmeans_fit(matrix, replace(config, k=k))
        table.append((k, silhouette(matrix.values, model.assignments)))
    best_k = max(table, key=lambda row: (row[1], -row[0]))[0]
    return SelectKResult(k=best_k, table=tuple(table))
