"""Graph-based semi-supervised label refinement.

Builds a binary KNN affinity graph, hides a fraction of the cluster
labels, and iterates the clamped diffusion

    F <- alpha * S F + (1 - alpha) * Y,   S = D^-1/2 W D^-1/2

until the scores stabilize.  The hidden rows then provide an internal
accuracy check of the spread labels against the labels they replaced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import metrics
from .errors import (
    AllHiddenError,
    NoVisibleLabelsError,
    TooFewRowsError,
)
from .preprocess import FeatureMatrix

HIDDEN = -1


@dataclass(frozen=True)
class SpreadConfig:
    n_neighbors: int = 7
    alpha: float = 0.2
    max_iter: int = 1000
    tol: float = 1e-6
    hide_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.n_neighbors < 1:
            raise ValueError("n_neighbors must be >= 1")
        if not 0 <= self.hide_fraction < 1:
            raise ValueError("hide_fraction must be in [0, 1)")


@dataclass(frozen=True)
class AffinityGraph:
    """Symmetric binary KNN adjacency with strictly positive degrees."""

    weights: sp.csr_matrix
    degrees: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]


def build_knn_graph(matrix, n_neighbors: int) -> AffinityGraph:
    """Union-symmetrized KNN graph with unit edge weights.

    Edge (i, j) exists iff j is among i's k nearest neighbors or vice
    versa; distance ties are broken by the lower row index.
    """
    x = matrix.values if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=float)
    n = x.shape[0]
    if n <= n_neighbors:
        raise TooFewRowsError(f"{n} rows <= n_neighbors={n_neighbors}")

    rows = np.empty(n * n_neighbors, dtype=int)
    cols = np.empty(n * n_neighbors, dtype=int)
    for i in range(n):
        d = np.sqrt(((x[i] - x) ** 2).sum(axis=1))
        d[i] = np.inf
        neighbors = np.argsort(d, kind="stable")[:n_neighbors]
        rows[i * n_neighbors:(i + 1) * n_neighbors] = i
        cols[i * n_neighbors:(i + 1) * n_neighbors] = neighbors

    w = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    w = w.maximum(w.T)  # union symmetrization keeps every node connected
    w.setdiag(0)
    w.eliminate_zeros()
    degrees = np.asarray(w.sum(axis=1)).ravel()
    return AffinityGraph(weights=w, degrees=degrees)


def hide_labels(labels, fraction: float, seed: int) -> np.ndarray:
    """Replace round(fraction * n) labels with the hidden marker (-1).

    Redraws until every class keeps at least one visible label; raises
    AllHiddenError when that is impossible.
    """
    labels = np.asarray(labels, dtype=int)
    if not 0 <= fraction < 1:
        raise ValueError("fraction must be in [0, 1)")
    n = len(labels)
    n_hidden = int(np.floor(fraction * n + 0.5))
    classes = np.unique(labels)
    if n - n_hidden < len(classes):
        raise AllHiddenError(
            f"hiding {n_hidden} of {n} labels cannot keep all {len(classes)} classes visible"
        )
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        hidden_idx = rng.permutation(n)[:n_hidden]
        out = labels.copy()
        out[hidden_idx] = HIDDEN
        if np.isin(classes, out).all():
            return out
    raise AllHiddenError("could not draw a mask keeping every class visible")


@dataclass(frozen=True)
class SpreadEvaluation:
    """Spread labels vs the original labels on the hidden subset."""

    confusion: metrics.ConfusionMatrix2
    accuracy: float
    auc: float

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion.as_array(),
            "accuracy": self.accuracy,
            "auc": self.auc,
        }


@dataclass(frozen=True)
class TransductionResult:
    scores: np.ndarray            # (n, n_classes)
    classes: tuple[int, ...]      # class id per score column
    labels: np.ndarray            # argmax class per row
    iterations_run: int
    converged: bool
    residual: float
    hidden_mask: np.ndarray       # True where the input label was hidden
    evaluation: SpreadEvaluation | None = None

    def to_json(self) -> str:
        payload = {
            "classes": list(self.classes),
            "labels": [int(v) for v in self.labels],
            "iterations_run": self.iterations_run,
            "converged": self.converged,
            "residual": self.residual,
            "hidden_mask": [bool(v) for v in self.hidden_mask],
        }
        if self.evaluation is not None:
            payload["evaluation"] = self.evaluation.to_dict()
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv(self, path, row_keys) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("country,year,label,hidden\n")
            for (country, year), label, hidden in zip(row_keys, self.labels,
                                                      self.hidden_mask):
                handle.write(f'"{country}",{year},{int(label)},{int(hidden)}\n')


def spread(graph: AffinityGraph, partial_labels,
           config: SpreadConfig | None = None) -> TransductionResult:
    """Iterate clamped label diffusion to convergence.

    Visible labels are one-hot rows of Y; hidden rows start at zero.
    Convergence means the largest entrywise change fell below ``tol``;
    otherwise the result is returned with ``converged=False``.
    """
    config = config or SpreadConfig()
    partial = np.asarray(partial_labels, dtype=int)
    n = graph.n_nodes
    if len(partial) != n:
        raise ValueError("label vector length does not match graph size")
    visible = partial != HIDDEN
    if not visible.any():
        raise NoVisibleLabelsError("no visible labels to spread")
    classes = tuple(int(c) for c in np.unique(partial[visible]))

    d_inv_sqrt = 1.0 / np.sqrt(graph.degrees)
    s = sp.diags(d_inv_sqrt) @ graph.weights @ sp.diags(d_inv_sqrt)

    y = np.zeros((n, len(classes)))
    for col, c in enumerate(classes):
        y[(partial == c), col] = 1.0

    f = y.copy()
    clamp = (1 - config.alpha) * y
    residual = np.inf
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iter + 1):
        f_next = config.alpha * (s @ f) + clamp
        residual = float(np.abs(f_next - f).max())
        f = f_next
        if residual < config.tol:
            converged = True
            break

    labels = np.array([classes[j] for j in f.argmax(axis=1)])
    return TransductionResult(
        scores=f,
        classes=classes,
        labels=labels,
        iterations_run=iterations,
        converged=converged,
        residual=residual,
        hidden_mask=~visible,
    )


def transduce_full(matrix, labels, config: SpreadConfig | None = None) -> TransductionResult:
    """Graph construction, label hiding, and spreading in one pass.

    When labels are binary and at least one was hidden, the result
    carries a :class:`SpreadEvaluation` of the spread labels against the
    originals on the hidden rows (class-1 score column drives the AUC).
    """
    config = config or SpreadConfig()
    labels = np.asarray(labels, dtype=int)
    graph = build_knn_graph(matrix, config.n_neighbors)
    partial = hide_labels(labels, config.hide_fraction, config.seed)
    result = spread(graph, partial, config)

    evaluation = None
    hidden = result.hidden_mask
    if hidden.any() and set(np.unique(labels)) == {0, 1} and 1 in result.classes:
        true_hidden = labels[hidden]
        pred_hidden = result.labels[hidden]
        if len(np.unique(true_hidden)) == 2:
            cm = metrics.confusion(true_hidden, pred_hidden)
            pos_col = result.classes.index(1)
            evaluation = SpreadEvaluation(
                confusion=cm,
                accuracy=metrics.accuracy(cm),
                auc=metrics.auc(result.scores[hidden, pos_col], true_hidden),
            )
    return TransductionResult(
        scores=result.scores,
        classes=result.classes,
        labels=result.labels,
        iterations_run=result.iterations_run,
        converged=result.converged,
        residual=result.residual,
        hidden_mask=result.hidden_mask,
        evaluation=evaluation,
    )
