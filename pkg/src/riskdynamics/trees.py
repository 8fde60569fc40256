"""CART decision trees, bagged forests, and gradient-boosted trees.

Split search is exhaustive over midpoint thresholds between adjacent
sorted values.  Ties in impurity decrease go to the lower feature index,
then the lower threshold, which makes every fit reproducible.  Impure
nodes split even at zero decrease (an XOR pattern still reaches a pure
depth-2 tree); recursion stops at pure nodes, the depth limit, or the
minimum node size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonBinaryLabelsError, OneClassError


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int | None = None
    min_samples_split: int = 2


@dataclass
class SplitNode:
    feature: int
    threshold: float
    n: int
    left: "SplitNode | Leaf"
    right: "SplitNode | Leaf"


@dataclass
class Leaf:
    counts: np.ndarray  # class counts (classification) or [n] (regression)
    n: int
    value: float = 0.0  # regression / boosting leaf output
    sample_idx: np.ndarray | None = None


@dataclass(frozen=True)
class TreeModel:
    root: SplitNode | Leaf
    n_features: int
    config: TreeConfig


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p ** 2).sum())


def _best_split_gini(x: np.ndarray, y: np.ndarray, feature_ids) -> tuple | None:
    """Max Gini-decrease split over the given features; None if no valid cut."""
    n = len(y)
    counts = np.array([(y == 0).sum(), (y == 1).sum()], dtype=float)
    parent = _gini(counts)
    best = None  # (decrease, feature, threshold)
    for f in feature_ids:
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ys = y[order]
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        left_n = np.arange(1, n, dtype=float)
        left_c1 = np.cumsum(ys)[:-1].astype(float)
        left_c0 = left_n - left_c1
        right_n = n - left_n
        right_c1 = counts[1] - left_c1
        right_c0 = counts[0] - left_c0
        gini_left = 1.0 - (left_c0 / left_n) ** 2 - (left_c1 / left_n) ** 2
        gini_right = 1.0 - (right_c0 / right_n) ** 2 - (right_c1 / right_n) ** 2
        decrease = parent - (left_n * gini_left + right_n * gini_right) / n
        decrease[~valid] = -np.inf
        i = int(decrease.argmax())  # first max -> lowest threshold
        if best is None or decrease[i] > best[0]:
            best = (float(decrease[i]), f, float((xs[i] + xs[i + 1]) / 2))
    return best


def _grow_classification(x, y, depth, config: TreeConfig, rng, max_features):
    counts = np.array([(y == 0).sum(), (y == 1).sum()], dtype=float)
    n = len(y)
    pure = counts[0] == 0 or counts[1] == 0
    depth_ok = config.max_depth is None or depth < config.max_depth
    if pure or n < config.min_samples_split or not depth_ok:
        return Leaf(counts=counts, n=n)

    d = x.shape[1]
    if max_features is not None and max_features < d:
        feature_ids = np.sort(rng.choice(d, size=max_features, replace=False))
    else:
        feature_ids = range(d)
    best = _best_split_gini(x, y, feature_ids)
    if best is None:
        return Leaf(counts=counts, n=n)

    _, f, threshold = best
    mask = x[:, f] <= threshold
    return SplitNode(
        feature=f,
        threshold=threshold,
        n=n,
        left=_grow_classification(x[mask], y[mask], depth + 1, config, rng, max_features),
        right=_grow_classification(x[~mask], y[~mask], depth + 1, config, rng, max_features),
    )


def train_tree(x, y, config: TreeConfig | None = None, rng=None,
               max_features: int | None = None) -> TreeModel:
    """Grow a binary CART classifier by greedy Gini splits."""
    config = config or TreeConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    if not np.isin(y, (0, 1)).all():
        raise NonBinaryLabelsError("tree labels must be in {0, 1}")
    root = _grow_classification(x, y, 0, config, rng, max_features)
    return TreeModel(root=root, n_features=x.shape[1], config=config)


def _tree_leaf(node, row) -> Leaf:
    while isinstance(node, SplitNode):
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node


def tree_predict_proba(model: TreeModel, x) -> np.ndarray:
    """Per-row probability of class 1 (leaf class share)."""
    x = np.asarray(x, dtype=float)
    out = np.empty(len(x))
    for i, row in enumerate(x):
        leaf = _tree_leaf(model.root, row)
        total = leaf.counts.sum()
        out[i] = leaf.counts[1] / total if total else 0.0
    return out


def tree_predict(model: TreeModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty(len(x), dtype=int)
    for i, row in enumerate(x):
        leaf = _tree_leaf(model.root, row)
        out[i] = int(leaf.counts.argmax())  # tie -> class 0
    return out


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    bootstrap: bool = True
    max_features: str | int | None = "sqrt"
    seed: int = 0
    tree: TreeConfig = field(default_factory=TreeConfig)


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[TreeModel, ...]
    config: ForestConfig


def train_forest(x, y, config: ForestConfig | None = None) -> ForestModel:
    """Bagged CART trees with per-split feature subsampling."""
    config = config or ForestConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    n, d = x.shape
    if config.max_features == "sqrt":
        max_features = int(np.ceil(np.sqrt(d)))
    else:
        max_features = config.max_features

    trees = []
    for t in range(config.n_trees):
        rng = np.random.default_rng([config.seed, t])
        if config.bootstrap:
            idx = rng.integers(0, n, size=n)
            xt, yt = x[idx], y[idx]
        else:
            xt, yt = x, y
        trees.append(train_tree(xt, yt, config.tree, rng=rng, max_features=max_features))
    return ForestModel(trees=tuple(trees), config=config)


def forest_predict_proba(model: ForestModel, x) -> np.ndarray:
    """Vote share for class 1 across trees."""
    votes = np.zeros(len(np.asarray(x)))
    for tree in model.trees:
        votes += tree_predict(tree, x)
    return votes / len(model.trees)


def forest_predict(model: ForestModel, x) -> np.ndarray:
    # majority vote; exact tie -> class 0
    return (forest_predict_proba(model, x) > 0.5).astype(int)


@dataclass(frozen=True)
class BoostConfig:
    n_rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_samples_split: int = 2
    seed: int = 0


@dataclass(frozen=True)
class BoostedModel:
    initial_log_odds: float
    trees: tuple[TreeModel, ...]
    learning_rate: float


def _best_split_sse(x: np.ndarray, y: np.ndarray) -> tuple | None:
    n = len(y)
    best = None
    total_sum = y.sum()
    total_sq = (y ** 2).sum()
    parent = total_sq - total_sum ** 2 / n
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ys = y[order]
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        left_n = np.arange(1, n, dtype=float)
        left_sum = np.cumsum(ys)[:-1]
        left_sq = np.cumsum(ys ** 2)[:-1]
        right_n = n - left_n
        sse_left = left_sq - left_sum ** 2 / left_n
        sse_right = (total_sq - left_sq) - (total_sum - left_sum) ** 2 / right_n
        decrease = parent - (sse_left + sse_right)
        decrease[~valid] = -np.inf
        i = int(decrease.argmax())
        if best is None or decrease[i] > best[0]:
            best = (float(decrease[i]), f, float((xs[i] + xs[i + 1]) / 2))
    return best


def _grow_regression(x, y, idx, depth, max_depth, min_samples_split):
    n = len(y)
    if n < min_samples_split or depth >= max_depth or np.ptp(y) == 0:
        return Leaf(counts=np.array([float(n)]), n=n, value=float(y.mean()),
                    sample_idx=idx)
    best = _best_split_sse(x, y)
    if best is None:
        return Leaf(counts=np.array([float(n)]), n=n, value=float(y.mean()),
                    sample_idx=idx)
    _, f, threshold = best
    mask = x[:, f] <= threshold
    return SplitNode(
        feature=f,
        threshold=threshold,
        n=n,
        left=_grow_regression(x[mask], y[mask], idx[mask], depth + 1,
                              max_depth, min_samples_split),
        right=_grow_regression(x[~mask], y[~mask], idx[~mask], depth + 1,
                               max_depth, min_samples_split),
    )


def _leaves(node):
    if isinstance(node, Leaf):
        yield node
    else:
        yield from _leaves(node.left)
        yield from _leaves(node.right)


def train_boosted(x, y, config: BoostConfig | None = None) -> BoostedModel:
    """Gradient boosting with logistic loss and Newton leaf values.

    Each round fits a depth-limited regression tree to the residuals
    y - p and replaces every leaf mean with sum(residual) / sum(p(1-p))
    over the leaf's samples.
    """
    config = config or BoostConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.isin(y, (0, 1)).all():
        raise NonBinaryLabelsError("boosting labels must be in {0, 1}")
    pbar = y.mean()
    if pbar == 0 or pbar == 1:
        raise OneClassError("training labels contain a single class")

    f0 = float(np.log(pbar / (1 - pbar)))
    f = np.full(len(y), f0)
    trees = []
    for _ in range(config.n_rounds):
        p = 1.0 / (1.0 + np.exp(-f))
        residual = y - p
        hessian = p * (1.0 - p)
        root = _grow_regression(x, residual, np.arange(len(y)), 0,
                                config.max_depth, config.min_samples_split)
        for leaf in _leaves(root):
            h = hessian[leaf.sample_idx].sum()
            leaf.value = float(residual[leaf.sample_idx].sum() / max(h, 1e-12))
            leaf.sample_idx = None
        tree = TreeModel(root=root, n_features=x.shape[1],
                         config=TreeConfig(max_depth=config.max_depth,
                                           min_samples_split=config.min_samples_split))
        f = f + config.learning_rate * _regression_values(tree, x)
        trees.append(tree)
    return BoostedModel(initial_log_odds=f0, trees=tuple(trees),
                        learning_rate=config.learning_rate)


def _regression_values(tree: TreeModel, x: np.ndarray) -> np.ndarray:
    out = np.empty(len(x))
    for i, row in enumerate(x):
        out[i] = _tree_leaf(tree.root, row).value
    return out


def boosted_predict_proba(model: BoostedModel, x, n_rounds: int | None = None) -> np.ndarray:
    """Staged sigmoid prediction after the first ``n_rounds`` trees."""
    x = np.asarray(x, dtype=float)
    if n_rounds is None:
        n_rounds = len(model.trees)
    f = np.full(len(x), model.initial_log_odds)
    for tree in model.trees[:n_rounds]:
        f += model.learning_rate * _regression_values(tree, x)
    return 1.0 / (1.0 + np.exp(-f))


def boosted_predict(model: BoostedModel, x, n_rounds: int | None = None) -> np.ndarray:
    return (boosted_predict_proba(model, x, n_rounds) > 0.5).astype(int)
