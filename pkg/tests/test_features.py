import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from syscallnet.callgraph import SystemCallGraph, build_graph
from syscallnet.dictionary import SyscallDictionary, builtin_dictionary
from syscallnet.errors import AllSamplesDropped, EmptyGraph, MissingMetric, ParseError
from syscallnet.features import (
    FEATURE_NAMES,
    LabeledDataset,
    build_dataset,
    featurize,
    featurize_sequence,
    read_manifest,
    write_manifest,
)
from syscallnet.metrics import compute_metrics
from syscallnet.synth import default_profiles, generate_corpus
from syscallnet.trace import CallSequence


def test_path_features():
    g = SystemCallGraph.from_edges([("a", "b"), ("b", "c")])
    fv = featurize(compute_metrics(g))
    assert fv.f1 == pytest.approx(2 / 3)
    assert fv.f3 == pytest.approx(2 / 3)
    assert fv.f4 == pytest.approx(2 / 3)
    assert fv.f7 == pytest.approx(4 / 3)
    assert fv.as_array().shape == (len(FEATURE_NAMES),)


def test_unit_multiplicities_collapse_weighted_features():
    g = SystemCallGraph.from_edges([("a", "b"), ("b", "c"), ("c", "a"), ("a", "c")])
    fv = featurize(compute_metrics(g))
    assert fv.f1 == fv.f2 and fv.f3 == fv.f5 and fv.f4 == fv.f6


def test_missing_average_distance():
    g = SystemCallGraph.from_edges({("a", "a"): 4})
    with pytest.raises(MissingMetric):
        featurize(compute_metrics(g))


def _seq(names, sid):
    return CallSequence.from_names(names, sample_id=sid)


def test_build_dataset_three_valid_and_drop(tmp_path):
    d = SyscallDictionary.from_names(["NtA"])
    (tmp_path / "empty.trace").write_text("nothing here\n")
    corpus = [
        ("s1", _seq(["NtA", "NtB", "NtC", "NtA"], "s1"), "x"),
        ("s2", _seq(["NtB", "NtA", "NtB"], "s2"), "y"),
        ("s3", _seq(["NtA", "NtA", "NtD"], "s3"), "x"),
        ("s4", tmp_path / "empty.trace", "y"),
        ("s5", _seq(["NtX", "NtY"], "s5"), "y"),
    ]
    ds = build_dataset(corpus, d)
    assert ds.sample_ids == ["s1", "s2", "s3"]
    assert ds.label_set == ("x", "y")
    assert [sid for sid, _ in ds.dropped] == ["s4", "s5"]
    assert ds.dropped[0][1].startswith("EmptyTrace")
    assert ds.dropped[1][1].startswith("EmptyGraph")
    with pytest.raises(AllSamplesDropped):
        build_dataset(corpus[3:], d)


def test_dataset_csv_round_trip_and_arff():
    rng = np.random.default_rng(0)
    ds = LabeledDataset([f"s{i}" for i in range(6)], rng.random((6, 7)), [0, 1, 2, 0, 1, 2], ("a", "b", "c"))
    back = LabeledDataset.from_csv(ds.to_csv(), ds.label_set)
    assert back.sample_ids == ds.sample_ids
    np.testing.assert_array_equal(back.X, ds.X)
    np.testing.assert_array_equal(back.y, ds.y)
    arff = ds.to_arff().splitlines()
    assert arff[0] == "@RELATION syscall_graph_features"
    assert "@ATTRIBUTE class {a,b,c}" in arff
    assert len(arff) == 2 + 7 + 1 + 2 + 6
    with pytest.raises(ParseError):
        LabeledDataset.from_csv("id,f1\n")


def test_dataset_validation():
    with pytest.raises(ValueError):
        LabeledDataset(["a", "a"], np.zeros((2, 7)), [0, 0], ("x",))
    with pytest.raises(ValueError):
        LabeledDataset(["a"], np.zeros((1, 7)), [2], ("x",))


def test_manifest_round_trip(tmp_path):
    (tmp_path / "t").mkdir()
    rows = [("s1", "t/s1.trace", "x"), ("s2", str(tmp_path / "abs.trace"), "y")]
    write_manifest(tmp_path / "m.csv", rows)
    back = read_manifest(tmp_path / "m.csv")
    assert back[0] == ("s1", tmp_path / "t/s1.trace", "x")
    assert back[1][1] == tmp_path / "abs.trace"
    (tmp_path / "bad.csv").write_text("a,b,c\n")
    with pytest.raises(ParseError):
        read_manifest(tmp_path / "bad.csv")


def test_parallel_build_matches_serial():
    corpus = generate_corpus(default_profiles(4), seed=1)
    d = builtin_dictionary("adware")
    a, b = build_dataset(corpus, d), build_dataset(corpus, d, jobs=3)
    assert a.to_csv() == b.to_csv()


def test_planted_family_separation():
    """Concentrating calls on few hubs leaves fewer distinct links per node."""
    corpus = generate_corpus(default_profiles(30), seed=0)
    ds = build_dataset(corpus, builtin_dictionary("adware"))
    assert len(ds) == 120 and not ds.dropped
    a = ds.X[ds.y == ds.label_set.index("FamilyA")]
    b = ds.X[ds.y == ds.label_set.index("FamilyB")]
    benign = ds.X[ds.y == ds.label_set.index("benign")]
    assert stats.ttest_ind(a[:, 0], b[:, 0], equal_var=False).pvalue < 1e-6
    assert a[:, 0].mean() < b[:, 0].mean()
    assert benign[:, 6].mean() > max(a[:, 6].mean(), b[:, 6].mean())


names = st.sampled_from(["NtA", "NtB", "NtC", "NtX", "NtY", "NtZ"])


@settings(max_examples=200, deadline=None)
@given(st.lists(names, min_size=3, max_size=50))
def test_feature_ranges(seq):
    d = SyscallDictionary.from_names(["NtA", "NtB"])
    try:
        fv = featurize_sequence(_seq(seq, "p"), d)
    except (MissingMetric, EmptyGraph):
        return
    for v in (fv.f3, fv.f4, fv.f5, fv.f6):
        assert 0.0 <= v <= 1.0
    assert fv.f2 >= fv.f1 >= 0.0 and fv.f7 >= 1.0


@settings(max_examples=100, deadline=None)
@given(st.lists(names, min_size=3, max_size=50), st.data())
def test_features_ignore_pure_noise_runs(seq, data):
    d = SyscallDictionary.from_names(["NtA", "NtB"])
    spots = [i for i in range(len(seq) - 1) if seq[i] not in d and seq[i + 1] not in d]
    if not spots:
        return
    i = data.draw(st.sampled_from(spots))
    noisy = seq[: i + 1] + ["NtNoise"] * data.draw(st.integers(1, 5)) + seq[i + 1:]
    try:
        ref = build_graph(seq, d)
    except EmptyGraph:
        return
    assert build_graph(noisy, d) == ref
    try:
        fv = featurize(compute_metrics(ref))
    except MissingMetric:
        return
    assert featurize_sequence(_seq(noisy, "n"), d) == fv
