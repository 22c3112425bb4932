"""Seven-feature vectors and labeled datasets.

Feature order (fixed, used by every classifier and export)::

    f1  average in-degree centrality
    f2  average weighted in-degree centrality
    f3  portion of calls with in-degree 1
    f4  portion of calls with out-degree 1
    f5  portion of calls with weighted in-degree 1
    f6  portion of calls with weighted out-degree 1
    f7  average distance
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .callgraph import build_graph
from .errors import AllSamplesDropped, DomainError, MissingMetric, ParseError
from .metrics import MetricReport, compute_metrics
from .trace import CallSequence, read_trace

log = logging.getLogger(__name__)

FEATURE_NAMES = (
    "avg_in_degree_centrality",
    "avg_weighted_in_degree_centrality",
    "portion_in_degree_1",
    "portion_out_degree_1",
    "portion_weighted_in_degree_1",
    "portion_weighted_out_degree_1",
    "average_distance",
)
FEATURE_LABELS = (
    "Average in-degree centrality",
    "Average weighted in-degree centrality",
    "Portion of calls with in-degree of 1",
    "Portion of calls with out-degree of 1",
    "Portion of calls with weighted in-degree of 1",
    "Portion of calls with weighted out-degree of 1",
    "Average distance",
)
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureVector:
    f1: float
    f2: float
    f3: float
    f4: float
    f5: float
    f6: float
    f7: float

    def as_array(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.f3, self.f4, self.f5, self.f6, self.f7])


def featurize(report: MetricReport) -> FeatureVector:
    if report.average_distance is None:
        raise MissingMetric(f"sample {report.sample_id!r}: average distance undefined")
    return FeatureVector(*(float(getattr(report, name)) for name in FEATURE_NAMES))


@dataclass
class LabeledDataset:
    """Feature matrix ``X`` (n x 7), integer labels ``y`` indexing ``label_set``."""

    sample_ids: list
    X: np.ndarray
    y: np.ndarray
    label_set: tuple
    dropped: list = field(default_factory=list)  # (sample_id, reason)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float).reshape(len(self.sample_ids), -1)
        self.y = np.asarray(self.y, dtype=np.int64)
        self.label_set = tuple(self.label_set)
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise ValueError("duplicate sample ids in dataset")
        if len(self.y) != len(self.sample_ids):
            raise ValueError("labels and sample ids differ in length")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.label_set)):
            raise ValueError("label index outside label_set")

    def __len__(self):
        return len(self.sample_ids)

    @property
    def n_classes(self) -> int:
        return len(self.label_set)

    @property
    def labels(self) -> list[str]:
        return [self.label_set[i] for i in self.y]

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset([self.sample_ids[i] for i in idx], self.X[idx], self.y[idx], self.label_set)

    @classmethod
    def from_rows(cls, rows, label_set=None) -> "LabeledDataset":
        """``rows`` of ``(sample_id, features, label_name)``."""
        rows = list(rows)
        if label_set is None:
            label_set = list(dict.fromkeys(r[2] for r in rows))
        index = {name: i for i, name in enumerate(label_set)}
        X = [r[1].as_array() if isinstance(r[1], FeatureVector) else r[1] for r in rows]
        return cls([r[0] for r in rows], np.array(X, dtype=float).reshape(len(rows), -1),
                   [index[r[2]] for r in rows], label_set)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample_id", *[f"f{i + 1}" for i in range(self.X.shape[1])], "label"])
        for sid, row, yi in zip(self.sample_ids, self.X, self.y):
            w.writerow([sid, *(repr(float(v)) for v in row), self.label_set[yi]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label_set=None) -> "LabeledDataset":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty dataset CSV") from None
        if header[0] != "sample_id" or header[-1] != "label":
            raise ParseError("dataset CSV header must be sample_id,f1..fN,label")
        rows = []
        for lineno, r in enumerate(reader, start=2):
            if not r:
                continue
            if len(r) != len(header):
                raise ParseError(f"line {lineno}: expected {len(header)} columns")
            try:
                rows.append((r[0], np.array([float(v) for v in r[1:-1]]), r[-1]))
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
        return cls.from_rows(rows, label_set)

    def to_arff(self, relation: str = "syscall_graph_features") -> str:
        lines = [f"@RELATION {relation}", ""]
        for name in FEATURE_NAMES[: self.X.shape[1]]:
            lines.append(f"@ATTRIBUTE {name} NUMERIC")
        lines.append("@ATTRIBUTE class {" + ",".join(self.label_set) + "}")
        lines += ["", "@DATA"]
        for row, yi in zip(self.X, self.y):
            lines.append(",".join(repr(float(v)) for v in row) + "," + self.label_set[yi])
        return "\n".join(lines) + "\n"


def featurize_sequence(seq: CallSequence, dictionary) -> FeatureVector:
    g = build_graph(seq, dictionary)
    return featurize(compute_metrics(g, seq.sample_id))


def _featurize_item(args):
    sample_id, source, dictionary = args
    try:
        if isinstance(source, CallSequence):
            seq = source
        else:
            seq = read_trace(source, sample_id)
        return featurize_sequence(seq, dictionary), None
    except (DomainError, ParseError, OSError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def build_dataset(corpus: Sequence, dictionary, label_set=None, jobs: int = 1) -> LabeledDataset:
    """Featurize every ``(sample_id, trace, label)`` of ``corpus``.

    ``trace`` is a path or a :class:`CallSequence`.  Samples whose graph is
    empty or whose average distance is undefined are dropped and listed in
    ``dataset.dropped`` with the reason.  Row order follows corpus order.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    if label_set is None:
        label_set = list(dict.fromkeys(label for _, _, label in corpus))
    unknown = {label for _, _, label in corpus} - set(label_set)
    if unknown:
        raise ValueError(f"labels not in label_set: {sorted(unknown)}")
    items = [(sid, Path(src) if isinstance(src, str) else src, dictionary) for sid, src, _ in corpus]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_featurize_item, items, chunksize=max(1, len(items) // (4 * jobs))))
    else:
        results = [_featurize_item(it) for it in items]
    rows, dropped = [], []
    for (sid, _, label), (fv, reason) in zip(corpus, results):
        if fv is None:
            log.info("dropping sample %s: %s", sid, reason)
            dropped.append((sid, reason))
        else:
            rows.append((sid, fv, label))
    if not rows:
        raise AllSamplesDropped(f"all {len(corpus)} samples were dropped")
    ds = LabeledDataset.from_rows(rows, label_set)
    ds.dropped = dropped
    return ds


def read_manifest(path) -> list[tuple[str, Path, str]]:
    """CSV manifest ``sample_id,trace_path,label``; relative paths resolve against the manifest."""
    path = Path(path)
    out = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["sample_id", "trace_path", "label"]:
            raise ParseError("manifest header must be sample_id,trace_path,label")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 columns")
            sid, trace_path, label = (c.strip() for c in row)
            p = Path(trace_path)
            out.append((sid, p if p.is_absolute() else path.parent / p, label))
    return out


def write_manifest(path, rows) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "trace_path", "label"])
        for sid, trace_path, label in rows:
            w.writerow([sid, str(trace_path), label])
