"""Common classifier interface and model (de)serialization."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def as_arrays(ds):
    """``(X, y, label_set)`` from a LabeledDataset or an ``(X, y, label_set)`` triple."""
    if isinstance(ds, tuple):
        X, y, label_set = ds
    else:
        X, y, label_set = ds.X, ds.y, ds.label_set
    return np.asarray(X, dtype=float), np.asarray(y, dtype=np.int64), tuple(label_set)


def normalize_weights(weights, n: int) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w < 0) or not w.sum() > 0:
        raise ValueError("sample weights must be nonnegative with a positive sum")
    return w / w.sum()


class Classifier:
    """Base class.  Subclasses implement ``predict_scores`` and ``params``."""

    kind = "base"

    def __init__(self, label_set):
        self.label_set = tuple(label_set)

    @property
    def n_classes(self) -> int:
        return len(self.label_set)

    def predict_scores(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        # np.argmax returns the first maximum, which is the label_set order tie rule
        return np.argmax(self.predict_scores(X), axis=1)

    def predict_labels(self, X) -> list[str]:
        return [self.label_set[i] for i in self.predict(X)]

    def params(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"kind": self.kind, "label_set": list(self.label_set), **self.params()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _check_X(X, n_features: int) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature vectors must be finite")
    return X


def model_from_dict(doc: dict) -> Classifier:
    from .boosting import BoostedEnsemble
    from .knn import KNearestNeighbors
    from .naive_bayes import NaiveBayes
    from .tree import DecisionTree, MajorityClass

    kinds = {cls.kind: cls for cls in (NaiveBayes, KNearestNeighbors, DecisionTree,
                                       BoostedEnsemble, MajorityClass)}
    try:
        cls = kinds[doc["kind"]]
    except KeyError:
        raise ValueError(f"unknown model kind {doc.get('kind')!r}") from None
    return cls.from_dict(doc)


def save_model(model: Classifier, path) -> None:
    Path(path).write_text(model.to_json(), encoding="utf-8")


def load_model(path) -> Classifier:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
