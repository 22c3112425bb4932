"""k-nearest-neighbour classifier on raw (unscaled) feature vectors."""

from __future__ import annotations

import numpy as np

from .base import Classifier, _check_X, as_arrays

WEIGHTINGS = ("uniform", "inverse_distance")


class KNearestNeighbors(Classifier):
    """Lazy model: stores the training rows.

    Neighbours are the ``k`` smallest Euclidean distances; equal distances are
    resolved by training-row order.  With inverse-distance weighting a
    neighbour at distance 0 takes all the vote (shared with any other
    zero-distance neighbour).  Scores are votes normalized to sum to 1.
    """

    kind = "knn"

    def __init__(self, label_set, X, y, k: int = 3, weighting: str = "inverse_distance",
                 row_weights=None):
        super().__init__(label_set)
        if weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}")
        self.X = np.asarray(X, dtype=float)
        self.y = np.asarray(y, dtype=np.int64)
        self.k = int(k)
        self.weighting = weighting
        self.row_weights = None if row_weights is None else np.asarray(row_weights, dtype=float)
        if not 1 <= self.k <= len(self.y):
            raise ValueError(f"k={k} must lie in [1, {len(self.y)}]")

    def neighbors(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Indices and distances of the k nearest training rows to ``x``."""
        d = np.sqrt(((self.X - x) ** 2).sum(axis=1))
        idx = np.argsort(d, kind="stable")[: self.k]
        return idx, d[idx]

    def predict_scores(self, X) -> np.ndarray:
        X = _check_X(X, self.X.shape[1])
        out = np.zeros((X.shape[0], self.n_classes))
        for r, x in enumerate(X):
            idx, d = self.neighbors(x)
            if self.weighting == "uniform":
                votes = np.ones_like(d)
            elif np.any(d == 0):
                votes = (d == 0).astype(float)
            else:
                votes = 1.0 / d
            if self.row_weights is not None:
                votes = votes * self.row_weights[idx]
            np.add.at(out[r], self.y[idx], votes)
            total = out[r].sum()
            if total > 0:
                out[r] /= total
        return out

    def params(self) -> dict:
        doc = {"k": self.k, "weighting": self.weighting, "X": self.X.tolist(), "y": self.y.tolist()}
        if self.row_weights is not None:
            doc["row_weights"] = self.row_weights.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["label_set"], doc["X"], doc["y"], doc["k"], doc["weighting"],
                   doc.get("row_weights"))


def train_knn(ds, k: int = 3, weighting: str = "inverse_distance", sample_weight=None):
    X, y, label_set = as_arrays(ds)
    return KNearestNeighbors(label_set, X, y, k, weighting, sample_weight)
