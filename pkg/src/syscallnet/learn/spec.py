"""Classifier specifications: small JSON-able dicts naming a learner and its parameters.

Accepted shorthands::

    "naive_bayes"           Gaussian naive Bayes
    "naive_bayes_kernel"    kernel-density naive Bayes
    "knn"                   k=3, 1/distance votes
    "c45"                   gain-ratio tree, seed 10
    "adaboost_c45"          10 SAMME rounds over c45 with resampling
    "adaboost_<base>"       same over any other base
    "majority"              class-frequency baseline
"""

from __future__ import annotations

import json

from .boosting import boost
from .knn import train_knn
from .naive_bayes import train_naive_bayes
from .tree import train_c45, train_majority

DEFAULTS = {
    "naive_bayes": {"kernel": False},
    "knn": {"k": 3, "weighting": "inverse_distance"},
    "c45": {"seed": 10, "max_depth": 25},
    "adaboost": {"base": "c45", "rounds": 10, "resample": True, "seed": 10},
    "majority": {},
}

_DISPLAY = {"naive_bayes": "Naive Bayes", "knn": "K-NN", "c45": "C4.5", "majority": "Majority"}


def normalize_spec(spec) -> dict:
    """Expand a shorthand string or partial dict into a complete spec dict."""
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            return normalize_spec(json.loads(text))
        if text == "naive_bayes_kernel":
            return normalize_spec({"kind": "naive_bayes", "kernel": True})
        if text.startswith("adaboost_"):
            return normalize_spec({"kind": "adaboost", "base": text[len("adaboost_"):]})
        return normalize_spec({"kind": text})
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError(f"bad classifier spec {spec!r}")
    kind = spec["kind"]
    if kind not in DEFAULTS:
        raise ValueError(f"unknown classifier kind {kind!r}; expected one of {sorted(DEFAULTS)}")
    unknown = set(spec) - set(DEFAULTS[kind]) - {"kind"}
    if unknown:
        raise ValueError(f"unknown parameters for {kind}: {sorted(unknown)}")
    out = {"kind": kind, **DEFAULTS[kind], **{k: v for k, v in spec.items() if k != "kind"}}
    if kind == "adaboost":
        out["base"] = normalize_spec(out["base"])
        if out["base"]["kind"] == "adaboost":
            raise ValueError("nested boosting is not supported")
    return out


def make_trainer(spec):
    """Return ``train(data, sample_weight) -> Classifier`` for a spec."""
    spec = normalize_spec(spec)
    kind = spec["kind"]
    p = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "naive_bayes":
        return lambda data, w=None: train_naive_bayes(data, p["kernel"], sample_weight=w)
    if kind == "knn":
        return lambda data, w=None: train_knn(data, p["k"], p["weighting"], sample_weight=w)
    if kind == "c45":
        return lambda data, w=None: train_c45(data, p["seed"], p["max_depth"], sample_weight=w)
    if kind == "majority":
        return lambda data, w=None: train_majority(data, sample_weight=w)

    def train_boost(data, w=None):
        if w is not None:
            raise ValueError("boosted ensembles do not take sample weights")
        return boost(p["base"], data, p["rounds"], p["resample"], p["seed"])
    return train_boost


def train(spec, ds):
    return make_trainer(spec)(ds, None)


def spec_name(spec) -> str:
    """Short display name, e.g. ``AdaBoost(C4.5)`` or ``Naive Bayes (kernel)``."""
    spec = normalize_spec(spec)
    if spec["kind"] == "adaboost":
        return f"AdaBoost({spec_name(spec['base'])})"
    name = _DISPLAY[spec["kind"]]
    if spec["kind"] == "naive_bayes" and spec["kernel"]:
        name += " (kernel)"
    return name
