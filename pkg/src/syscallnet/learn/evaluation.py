"""Information-gain ranking, ROC AUC and repeated stratified cross-validation."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import rankdata

from ..errors import ClassTooSmall, NoValidClass
from .base import as_arrays
from .spec import make_trainer, normalize_spec, spec_name

# --------------------------------------------------------------- information gain


def entropy(labels, n_classes: int | None = None) -> float:
    """Base-2 entropy of a label vector."""
    counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=n_classes or 0)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def equal_frequency_bins(values, bins: int = 10) -> np.ndarray:
    """Bin index of every value.

    Cut points are the order statistics at positions ``ceil(i * n / bins)``
    for ``i = 1 .. bins-1``; duplicate cuts are merged, so tied values always
    share a bin and a feature with few distinct values gets fewer bins.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    s = np.sort(v)
    pos = np.minimum(np.ceil(np.arange(1, bins) * n / bins).astype(int), n - 1)
    cuts = np.unique(s[pos])
    cuts = cuts[cuts > s[0]]          # a cut at the minimum would leave an empty first bin
    return np.searchsorted(cuts, v, side="right")


def information_gain(ds, feature_index: int, bins: int = 10) -> float:
    """``H(C) - H(C | A)`` in bits, with ``A`` the equal-frequency binned feature."""
    X, y, label_set = as_arrays(ds)
    if len(y) == 0:
        raise ValueError("information gain needs at least one row")
    K = len(label_set)
    b = equal_frequency_bins(X[:, feature_index], bins)
    h_cond = 0.0
    for k in np.unique(b):
        sel = y[b == k]
        h_cond += sel.size / y.size * entropy(sel, K)
    return max(entropy(y, K) - h_cond, 0.0)


def rank_features(ds, bins: int = 10, names=None) -> list[tuple[str, float]]:
    """``(feature name, IG)`` sorted by decreasing gain; ties keep feature order."""
    X, _, _ = as_arrays(ds)
    if names is None:
        names = [f"f{j + 1}" for j in range(X.shape[1])]
    gains = [information_gain(ds, j, bins) for j in range(X.shape[1])]
    order = sorted(range(len(gains)), key=lambda j: -gains[j])
    return [(names[j], gains[j]) for j in order]


# ------------------------------------------------------------------------ ROC AUC


def binary_auc(scores, positive) -> float:
    """Mann-Whitney AUC; tied scores contribute one half."""
    scores = np.asarray(scores, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    n_pos, n_neg = int(positive.sum()), int((~positive).sum())
    if n_pos == 0 or n_neg == 0:
        raise NoValidClass("AUC needs at least one positive and one negative")
    ranks = rankdata(scores)
    return float((ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_auc_detail(scores, labels, n_classes: int | None = None) -> tuple[float, dict, list]:
    """Macro one-vs-rest AUC, the per-class AUCs and the skipped classes."""
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    labels = np.asarray(labels, dtype=np.int64)
    K = n_classes or scores.shape[1]
    per_class, skipped = {}, []
    for c in range(K):
        pos = labels == c
        if pos.all() or not pos.any():
            skipped.append(c)
            continue
        per_class[c] = binary_auc(scores[:, c], pos)
    if not per_class:
        raise NoValidClass("no class has both positive and negative rows")
    return float(np.mean(list(per_class.values()))), per_class, skipped


def roc_auc(scores, labels, n_classes: int | None = None) -> float:
    return roc_auc_detail(scores, labels, n_classes)[0]


# --------------------------------------------------------------- cross-validation


def stratified_folds(y, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Fold index per row.  Each class is shuffled and dealt round-robin,
    continuing from where the previous class stopped so fold sizes stay even."""
    y = np.asarray(y, dtype=np.int64)
    assign = np.empty(y.size, dtype=np.int64)
    offset = 0
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        assign[idx] = (offset + np.arange(idx.size)) % folds
        offset += idx.size
    return assign


@dataclass
class EvaluationReport:
    classifier: dict
    name: str
    label_set: list
    folds: int
    repeats: int
    seed: int
    accuracy: float
    auc: float | None
    confusion: list                    # rows = true class, columns = predicted
    per_fold: list = field(default_factory=list)
    per_repeat: list = field(default_factory=list)
    dataset: str = ""
    n_rows: int = 0

    @property
    def error_rate(self) -> float:
        return 1.0 - self.accuracy

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc) -> "EvaluationReport":
        return cls(**doc)


def _run_fold(args):
    spec, X, y, label_set, train_idx, test_idx = args
    model = make_trainer(spec)((X[train_idx], y[train_idx], label_set), None)
    return model.predict_scores(X[test_idx])


def _nanmean(values) -> float:
    vals = [v for v in values if v is not None and not math.isnan(v)]
    return float(np.mean(vals)) if vals else None


def cross_validate(ds, classifier_spec, folds: int = 5, repeats: int = 5, seed: int = 0,
                   jobs: int = 1, dataset: str = "") -> EvaluationReport:
    """Repeated stratified k-fold cross-validation.

    Repeat ``r`` shuffles with ``numpy.random.default_rng([seed, r])``.  The
    reported accuracy is ``trace(C) / sum(C)`` of the confusion matrix pooled
    over every fold and repeat; the reported AUC is the mean of the per-fold
    macro one-vs-rest AUCs.

    Raises
    ------
    ClassTooSmall
        When some class has fewer rows than ``folds``.
    """
    X, y, label_set = as_arrays(ds)
    spec = normalize_spec(classifier_spec)
    K = len(label_set)
    counts = np.bincount(y, minlength=K)
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if counts.min() < folds:
        bad = label_set[int(np.argmin(counts))]
        raise ClassTooSmall(f"class {bad!r} has {counts.min()} rows, fewer than {folds} folds")
    tasks, where = [], []
    for r in range(repeats):
        assign = stratified_folds(y, folds, np.random.default_rng([seed, r]))
        for f in range(folds):
            test = np.flatnonzero(assign == f)
            train = np.flatnonzero(assign != f)
            tasks.append((spec, X, y, label_set, train, test))
            where.append((r, f, test))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_run_fold, tasks))
    else:
        scores = [_run_fold(t) for t in tasks]

    confusion = np.zeros((K, K), dtype=np.int64)
    per_fold = []
    rep_conf = np.zeros((repeats, K, K), dtype=np.int64)
    for (r, f, test), s in zip(where, scores):
        pred = np.argmax(s, axis=1)
        cm = np.zeros((K, K), dtype=np.int64)
        np.add.at(cm, (y[test], pred), 1)
        confusion += cm
        rep_conf[r] += cm
        try:
            auc = roc_auc(s, y[test], K)
        except NoValidClass:
            auc = None
        per_fold.append({"repeat": r, "fold": f, "n_test": int(test.size),
                         "accuracy": float(np.trace(cm) / cm.sum()), "auc": auc})
    per_repeat = []
    for r in range(repeats):
        aucs = [p["auc"] for p in per_fold if p["repeat"] == r]
        per_repeat.append({"repeat": r, "accuracy": float(np.trace(rep_conf[r]) / rep_conf[r].sum()),
                           "auc": _nanmean(aucs)})
    return EvaluationReport(
        classifier=spec, name=spec_name(spec), label_set=list(label_set), folds=folds,
        repeats=repeats, seed=seed, accuracy=float(np.trace(confusion) / confusion.sum()),
        auc=_nanmean(p["auc"] for p in per_fold), confusion=confusion.tolist(),
        per_fold=per_fold, per_repeat=per_repeat, dataset=dataset, n_rows=int(len(y)),
    )


def format_table(reports) -> str:
    """Plain-text grid: one row per classifier, an Accuracy/AUC column pair per dataset."""
    reports = list(reports)
    datasets = list(dict.fromkeys(r.dataset or "dataset" for r in reports))
    names = list(dict.fromkeys(r.name for r in reports))
    cell = {(r.name, r.dataset or "dataset"): r for r in reports}
    w0 = max(len("Classifier"), *(len(n) for n in names))
    head1 = "Classifier".ljust(w0) + "".join(f" | {d:^17}" for d in datasets)
    head2 = " " * w0 + "".join(f" | {'Accuracy':>8} {'AUC':>8}" for _ in datasets)
    lines = [head1, head2, "-" * len(head2)]
    for n in names:
        row = n.ljust(w0)
        for d in datasets:
            r = cell.get((n, d))
            if r is None:
                row += f" | {'-':>8} {'-':>8}"
            else:
                auc = f"{r.auc:8.3f}" if r.auc is not None else f"{'n/a':>8}"
                row += f" | {r.accuracy * 100:7.2f}% {auc}"
        lines.append(row)
    return "\n".join(lines) + "\n"
