"""Multiclass AdaBoost (SAMME).

Round ``m`` trains a base model, measures its weighted training error
``err`` and, if ``err < (K-1)/K``, keeps it with coefficient
``ln((1-err)/err) + ln(K-1)`` and up-weights the rows it misclassified.
The ensemble score of a class is the coefficient-weighted vote share.
"""

from __future__ import annotations

import logging

import numpy as np

from ..errors import AllRoundsDiscarded, DomainError
from .base import Classifier, as_arrays, model_from_dict

log = logging.getLogger(__name__)

_ERR_FLOOR = 1e-10


class BoostedEnsemble(Classifier):
    kind = "adaboost"

    def __init__(self, label_set, models, alphas, base_kind: str, rounds: int, resample: bool,
                 seed, history=None):
        super().__init__(label_set)
        self.models = list(models)
        self.alphas = np.asarray(alphas, dtype=float)
        self.base_kind = base_kind
        self.rounds = int(rounds)
        self.resample = bool(resample)
        self.seed = seed
        self.history = list(history or [])   # per round: {"round", "error", "kept"}

    def predict_scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        votes = np.zeros((X.shape[0], self.n_classes))
        rows = np.arange(X.shape[0])
        for model, a in zip(self.models, self.alphas):
            votes[rows, model.predict(X)] += a
        return votes / self.alphas.sum()

    def params(self) -> dict:
        return {"base_kind": self.base_kind, "rounds": self.rounds, "resample": self.resample,
                "seed": self.seed, "alphas": self.alphas.tolist(), "history": self.history,
                "models": [m.to_dict() for m in self.models]}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["label_set"], [model_from_dict(m) for m in doc["models"]], doc["alphas"],
                   doc["base_kind"], doc["rounds"], doc["resample"], doc.get("seed"),
                   doc.get("history"))


def boost(base_spec, ds, rounds: int = 10, resample: bool = True, seed: int = 10) -> BoostedEnsemble:
    """Train a SAMME ensemble of ``base_spec`` models.

    ``base_spec`` is anything accepted by :func:`~syscallnet.learn.spec.make_trainer`.
    With ``resample`` each round trains on ``len(ds)`` rows drawn with
    replacement in proportion to the current weights; otherwise the weights
    are passed to the base learner.  A round whose error reaches ``(K-1)/K``
    (or whose base learner cannot be trained on its resample) is discarded
    and the weights are reset to uniform.  Training stops early once a
    retained model has zero weighted error.

    Raises
    ------
    AllRoundsDiscarded
        When no round produced a usable model.
    """
    from .spec import make_trainer, normalize_spec

    X, y, label_set = as_arrays(ds)
    base = normalize_spec(base_spec)
    train = make_trainer(base)
    n, K = len(y), len(label_set)
    rng = np.random.default_rng(seed)
    w = np.full(n, 1.0 / n)
    models, alphas, history = [], [], []
    for r in range(rounds):
        try:
            if resample:
                idx = np.sort(rng.choice(n, size=n, replace=True, p=w))
                model = train((X[idx], y[idx], label_set), None)
            else:
                model = train((X, y, label_set), w)
        except DomainError as exc:
            log.debug("round %d discarded: %s", r, exc)
            history.append({"round": r, "error": None, "kept": False})
            w = np.full(n, 1.0 / n)
            continue
        miss = model.predict(X) != y
        err = float(w[miss].sum())
        if err >= (K - 1) / K:
            history.append({"round": r, "error": err, "kept": False})
            uniform = np.allclose(w, 1.0 / n)
            w = np.full(n, 1.0 / n)
            if not resample and uniform:
                break       # deterministic retraining would repeat this round forever
            continue
        e = max(err, _ERR_FLOOR)
        alpha = np.log((1.0 - e) / e) + np.log(K - 1)
        models.append(model)
        alphas.append(alpha)
        history.append({"round": r, "error": err, "kept": True})
        if err == 0.0:
            break
        w = w * np.exp(alpha * miss)
        w /= w.sum()
    if not models:
        raise AllRoundsDiscarded(f"all {len(history)} boosting rounds were discarded")
    return BoostedEnsemble(label_set, models, alphas, base["kind"], rounds, resample, seed, history)
