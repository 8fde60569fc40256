"""Independent brute-force oracles used to pin expected values.

Everything here is written with plain Python loops (plus dense numpy
solves where the definition is a linear system) and deliberately avoids
the library's own code paths.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def euclidean(a, b) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def silhouette_bruteforce(x, labels) -> float:
    x = [list(row) for row in x]
    labels = list(labels)
    clusters = sorted(set(labels))
    members = {c: [i for i, l in enumerate(labels) if l == c] for c in clusters}
    scores = []
    for i, label in enumerate(labels):
        own = members[label]
        if len(own) == 1:
            scores.append(0.0)
            continue
        a = sum(euclidean(x[i], x[j]) for j in own if j != i) / (len(own) - 1)
        b = min(
            sum(euclidean(x[i], x[j]) for j in members[c]) / len(members[c])
            for c in clusters if c != label
        )
        denom = max(a, b)
        scores.append(0.0 if denom == 0 else (b - a) / denom)
    return sum(scores) / len(scores)


def _mean(rows):
    d = len(rows[0])
    return [sum(r[j] for r in rows) / len(rows) for j in range(d)]


def calinski_harabasz_bruteforce(x, labels) -> float:
    x = [list(row) for row in x]
    labels = list(labels)
    clusters = sorted(set(labels))
    n, k = len(x), len(clusters)
    overall = _mean(x)
    between = 0.0
    within = 0.0
    for c in clusters:
        rows = [x[i] for i, l in enumerate(labels) if l == c]
        centroid = _mean(rows)
        between += len(rows) * sum((a - b) ** 2 for a, b in zip(centroid, overall))
        within += sum(sum((a - b) ** 2 for a, b in zip(r, centroid)) for r in rows)
    if within == 0:
        return math.inf
    return (between / (k - 1)) / (within / (n - k))


def davies_bouldin_bruteforce(x, labels) -> float:
    x = [list(row) for row in x]
    labels = list(labels)
    clusters = sorted(set(labels))
    centroids = {}
    scatter = {}
    for c in clusters:
        rows = [x[i] for i, l in enumerate(labels) if l == c]
        centroids[c] = _mean(rows)
        scatter[c] = sum(euclidean(r, centroids[c]) for r in rows) / len(rows)
    total = 0.0
    for ci in clusters:
        worst = 0.0
        for cj in clusters:
            if ci == cj:
                continue
            d = euclidean(centroids[ci], centroids[cj])
            if d == 0:
                return math.inf
            worst = max(worst, (scatter[ci] + scatter[cj]) / d)
        total += worst
    return total / len(clusters)


def auc_paircount(scores, labels) -> float:
    """O(n^2) Mann-Whitney pair enumeration, ties counted as half."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def spread_closed_form(weights, partial_labels, alpha) -> np.ndarray:
    """Dense solve of F = (1-alpha) (I - alpha S)^-1 Y."""
    w = np.asarray(weights.todense() if hasattr(weights, "todense") else weights,
                   dtype=float)
    deg = w.sum(axis=1)
    d_inv_sqrt = np.diag(1.0 / np.sqrt(deg))
    s = d_inv_sqrt @ w @ d_inv_sqrt
    partial = np.asarray(partial_labels)
    classes = sorted(set(int(c) for c in partial[partial >= 0]))
    y = np.zeros((len(partial), len(classes)))
    for col, c in enumerate(classes):
        y[partial == c, col] = 1.0
    n = len(partial)
    return (1 - alpha) * np.linalg.solve(np.eye(n) - alpha * s, y)


def central_difference_gradient(func, beta, eps=1e-6) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    grad = np.zeros_like(beta)
    for i in range(len(beta)):
        up = beta.copy()
        up[i] += eps
        down = beta.copy()
        down[i] -= eps
        grad[i] = (func(up) - func(down)) / (2 * eps)
    return grad


def kmeans_min_inertia(x, k) -> float:
    """Exhaustive minimum inertia over all assignments (tiny n only)."""
    x = [list(row) for row in x]
    best = math.inf
    for assignment in itertools.product(range(k), repeat=len(x)):
        if len(set(assignment)) != k:
            continue
        inertia = 0.0
        for c in range(k):
            rows = [x[i] for i, a in enumerate(assignment) if a == c]
            centroid = _mean(rows)
            inertia += sum(
                sum((a - b) ** 2 for a, b in zip(r, centroid)) for r in rows
            )
        best = min(best, inertia)
    return best


# ------------------------------------------------------------- CART oracle
#
# Greedy CART by exhaustive split enumeration.  The Gini expressions are
# written with the exact same floating-point operation order as the
# library so that equal-gain ties resolve identically; the traversal and
# bookkeeping are otherwise independent.


def _oracle_best_split(rows, labels):
    n = len(rows)
    c0 = float(labels.count(0))
    c1 = float(labels.count(1))
    parent = 1.0 - ((c0 / n) ** 2 + (c1 / n) ** 2)
    best = None  # (decrease, feature, threshold)
    d = len(rows[0])
    for f in range(d):
        order = sorted(range(n), key=lambda i: rows[i][f])
        xs = [rows[i][f] for i in order]
        ys = [labels[i] for i in order]
        left_c1 = 0.0
        for cut in range(n - 1):
            left_c1 += ys[cut]
            if xs[cut + 1] <= xs[cut]:
                continue
            left_n = float(cut + 1)
            right_n = float(n - cut - 1)
            left_c0 = left_n - left_c1
            right_c1 = c1 - left_c1
            right_c0 = c0 - left_c0
            gini_left = 1.0 - (left_c0 / left_n) ** 2 - (left_c1 / left_n) ** 2
            gini_right = 1.0 - (right_c0 / right_n) ** 2 - (right_c1 / right_n) ** 2
            decrease = parent - (left_n * gini_left + right_n * gini_right) / n
            if best is None or decrease > best[0]:
                best = (decrease, f, (xs[cut] + xs[cut + 1]) / 2)
    return best


def cart_bruteforce(rows, labels, depth=0, max_depth=None, min_samples_split=2):
    """Returns a nested ('leaf', (c0, c1)) / ('split', f, thr, left, right) tree."""
    rows = [list(r) for r in rows]
    labels = list(labels)
    counts = (labels.count(0), labels.count(1))
    pure = counts[0] == 0 or counts[1] == 0
    depth_ok = max_depth is None or depth < max_depth
    if pure or len(rows) < min_samples_split or not depth_ok:
        return ("leaf", counts)
    best = _oracle_best_split(rows, labels)
    if best is None:
        return ("leaf", counts)
    _, f, threshold = best
    left_idx = [i for i, r in enumerate(rows) if r[f] <= threshold]
    right_idx = [i for i, r in enumerate(rows) if r[f] > threshold]
    return (
        "split", f, threshold,
        cart_bruteforce([rows[i] for i in left_idx], [labels[i] for i in left_idx],
                        depth + 1, max_depth, min_samples_split),
        cart_bruteforce([rows[i] for i in right_idx], [labels[i] for i in right_idx],
                        depth + 1, max_depth, min_samples_split),
    )


def tree_to_tuples(node):
    """Convert a library TreeModel node into the oracle's tuple shape."""
    from riskdynamics.trees import Leaf

    if isinstance(node, Leaf):
        return ("leaf", (int(node.counts[0]), int(node.counts[1])))
    return (
        "split", node.feature, node.threshold,
        tree_to_tuples(node.left), tree_to_tuples(node.right),
    )
