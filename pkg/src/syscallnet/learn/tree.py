"""C4.5-style decision tree on numeric features, plus a majority-class baseline.

Splits are binary thresholds ``x[j] <= t`` with ``t`` the midpoint of two
adjacent distinct training values.  Among all candidate splits whose
information gain is at least the mean gain of the candidates, the one with
the largest gain ratio is chosen.  No pruning is applied.
"""

from __future__ import annotations

import numpy as np

from .base import Classifier, _check_X, as_arrays, normalize_weights

MAX_DEPTH = 25
MIN_BRANCH_ROWS = 2
_EPS = 1e-12


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    """Base-2 entropy of each row of a (.., K) weight array."""
    tot = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(tot > 0, counts / tot, 0.0)
        logp = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -(p * logp).sum(axis=-1)


def candidate_splits(X, y, w, K, min_rows=MIN_BRANCH_ROWS):
    """All admissible binary splits of a node.

    Returns arrays ``(feature, threshold, gain, gain_ratio)`` in feature-major,
    threshold-ascending order.
    """
    n, F = X.shape
    onehot = np.zeros((n, K))
    onehot[np.arange(n), y] = w
    total = onehot.sum(axis=0)
    wtot = total.sum()
    h_parent = _entropy_rows(total)
    feats, thrs, gains, ratios = [], [], [], []
    for j in range(F):
        order = np.argsort(X[:, j], kind="stable")
        v = X[order, j]
        cum = np.cumsum(onehot[order], axis=0)
        pos = np.arange(min_rows - 1, n - min_rows)        # last index of the left branch
        pos = pos[v[pos] < v[pos + 1]]
        if pos.size == 0:
            continue
        left = cum[pos]
        right = total - left
        wl = left.sum(axis=1)
        wr = wtot - wl
        pl, pr = wl / wtot, wr / wtot
        gain = h_parent - pl * _entropy_rows(left) - pr * _entropy_rows(right)
        with np.errstate(divide="ignore", invalid="ignore"):
            split_info = -(np.where(pl > 0, pl * np.log2(np.where(pl > 0, pl, 1)), 0)
                           + np.where(pr > 0, pr * np.log2(np.where(pr > 0, pr, 1)), 0))
            ratio = np.where(split_info > 0, gain / split_info, 0.0)
        lo, hi = v[pos], v[pos + 1]
        t = (lo + hi) / 2.0
        t = np.where(t < hi, t, lo)   # midpoint can round up to hi for adjacent floats
        feats.append(np.full(pos.size, j))
        thrs.append(t)
        gains.append(gain)
        ratios.append(ratio)
    if not feats:
        empty = np.array([])
        return empty.astype(int), empty, empty, empty
    return np.concatenate(feats), np.concatenate(thrs), np.concatenate(gains), np.concatenate(ratios)


class DecisionTree(Classifier):
    """Array-encoded binary tree; leaves have ``feature == -1``."""

    kind = "c45"

    def __init__(self, label_set, feature, threshold, left, right, value, n_features, seed=None):
        super().__init__(label_set)
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float).reshape(len(self.feature), -1)
        self.n_features = int(n_features)
        self.seed = seed

    @property
    def depth(self) -> int:
        depth = np.zeros(len(self.feature), dtype=int)
        for i in range(len(self.feature)):     # children always follow their parent
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def apply(self, X) -> np.ndarray:
        X = _check_X(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            nd = node[rows]
            go_left = X[rows, self.feature[nd]] <= self.threshold[nd]
            node[rows] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node

    def predict_scores(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def params(self) -> dict:
        return {"seed": self.seed, "n_features": self.n_features, "feature": self.feature.tolist(),
                "threshold": self.threshold.tolist(), "left": self.left.tolist(),
                "right": self.right.tolist(), "value": self.value.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["label_set"], doc["feature"], doc["threshold"], doc["left"], doc["right"],
                   doc["value"], doc["n_features"], doc.get("seed"))


def train_c45(ds, seed: int = 10, max_depth: int = MAX_DEPTH, sample_weight=None) -> DecisionTree:
    """Grow an unpruned gain-ratio tree.

    A node becomes a leaf when it is pure, at ``max_depth``, when no split
    leaves at least two rows on each side, or when no split has positive
    information gain.  ``seed`` only breaks ties between splits of equal gain
    ratio.
    """
    X, y, label_set = as_arrays(ds)
    K = len(label_set)
    w = normalize_weights(sample_weight, len(y))
    rng = np.random.default_rng(seed)
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        dist = np.bincount(y[rows], weights=w[rows], minlength=K)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(dist / dist.sum() if dist.sum() > 0 else np.full(K, 1.0 / K))
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        if depth >= max_depth or np.unique(y[rows]).size < 2:
            continue
        f, t, gain, ratio = candidate_splits(X[rows], y[rows], w[rows], K)
        if f.size == 0:
            continue
        ok = gain >= gain.mean() - _EPS
        best_ratio = ratio[ok].max()
        tied = np.flatnonzero(ok & (ratio >= best_ratio - _EPS))
        pick = tied[0] if tied.size == 1 else rng.choice(tied)
        if gain[pick] <= _EPS:
            continue
        feature[node], threshold[node] = int(f[pick]), float(t[pick])
        mask = X[rows, f[pick]] <= t[pick]
        lrows, rrows = rows[mask], rows[~mask]
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        # push right first so the left subtree is numbered first
        stack.append((right[node], rrows, depth + 1))
        stack.append((left[node], lrows, depth + 1))
    return DecisionTree(label_set, feature, threshold, left, right, value, X.shape[1], seed)


class MajorityClass(Classifier):
    """Predicts the (weighted) class frequencies of the training set."""

    kind = "majority"

    def __init__(self, label_set, prior):
        super().__init__(label_set)
        self.prior = np.asarray(prior, dtype=float)

    def predict_scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.tile(self.prior, (X.shape[0], 1))

    def params(self) -> dict:
        return {"prior": self.prior.tolist()}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["label_set"], doc["prior"])


def train_majority(ds, sample_weight=None) -> MajorityClass:
    X, y, label_set = as_arrays(ds)
    w = normalize_weights(sample_weight, len(y))
    return MajorityClass(label_set, np.bincount(y, weights=w, minlength=len(label_set)))
