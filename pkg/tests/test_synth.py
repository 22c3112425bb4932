import numpy as np
import pytest
from scipy import stats

from syscallnet.callgraph import build_graph
from syscallnet.dictionary import SyscallDictionary, builtin_dictionary
from syscallnet.features import build_dataset, read_manifest
from syscallnet.metrics import degrees
from syscallnet.powerlaw import degree_sample, power_law_test
from syscallnet.synth import (
    FamilyProfile,
    default_profiles,
    dump_profiles,
    generate_corpus,
    generate_trace,
    load_profiles,
    sample_seed,
    write_corpus,
)
from syscallnet.trace import read_trace

POOL = tuple(f"NtDict{i:02d}" for i in range(12))
NOISE = tuple(f"NtNoise{i:02d}" for i in range(8))


def profile(name="F", **kw):
    return FamilyProfile(name, POOL, NOISE, **kw)


def test_trace_determinism():
    p = profile(hub_bias=2.0, self_loop_rate=0.2)
    assert generate_trace(p, 5) == generate_trace(p, 5)
    assert generate_trace(p, 5).names != generate_trace(p, 6).names


def test_trace_shape():
    p = profile(sequence_length=(50, 60), noise_rate=0.0)
    seq = generate_trace(p, 1)
    assert 50 <= len(seq) <= 60
    assert set(seq.names) <= set(POOL)
    assert seq.names[0] != seq.names[1]


def test_uniform_when_unbiased():
    p = profile(hub_bias=0.0, noise_rate=0.0, sequence_length=(6000, 6000))
    seq = generate_trace(p, 2)
    counts = np.array([seq.names.count(n) for n in POOL])
    assert stats.chisquare(counts).pvalue > 0.01
    g = build_graph(seq, SyscallDictionary.from_names(POOL))
    indeg = np.array([degrees(g, "in", weighted=True)[n] for n in POOL])
    assert stats.chisquare(indeg).pvalue > 0.01


def test_profile_validation():
    with pytest.raises(ValueError):
        FamilyProfile("x", ("NtA",), ("NtA",))
    with pytest.raises(ValueError):
        profile(sequence_length=(5, 20))
    with pytest.raises(ValueError):
        profile(noise_rate=1.5)
    with pytest.raises(ValueError):
        FamilyProfile("x", ("NtA", "NtB"), (), noise_rate=0.3)


def test_profiles_json_round_trip():
    profiles = default_profiles(7)
    assert load_profiles(dump_profiles(profiles)) == profiles


def test_corpus_counts_ids_and_seeds():
    corpus = generate_corpus([(profile("A"), 3), (profile("B"), 2)], seed=4)
    assert [sid for sid, _, _ in corpus] == ["A-0000", "A-0001", "A-0002", "B-0000", "B-0001"]
    assert [lab for _, _, lab in corpus] == ["A"] * 3 + ["B"] * 2
    assert corpus[0][1] == generate_trace(profile("A"), sample_seed(4, "A", 0), "A-0000")
    # identical profiles under different names still draw independent streams
    assert corpus[0][1].names != corpus[3][1].names
    with pytest.raises(ValueError):
        generate_corpus([(profile("A"), 1), (profile("A"), 1)])


def test_corpus_parallel_equals_serial():
    ps = default_profiles(5)
    a = generate_corpus(ps, seed=9)
    b = generate_corpus(ps, seed=9, jobs=3)
    assert a == b


def test_written_corpus_reparses(tmp_path):
    corpus = generate_corpus([(profile("A"), 2)], seed=0)
    manifest = write_corpus(corpus, tmp_path)
    rows = read_manifest(manifest)
    assert [r[0] for r in rows] == ["A-0000", "A-0001"]
    assert read_trace(rows[0][1], "A-0000").names == corpus[0][1].names


def test_pipeline_keeps_every_sample():
    corpus = generate_corpus(default_profiles(25), seed=3)
    ds = build_dataset(corpus, builtin_dictionary("adware"))
    assert len(ds) == len(corpus) == 100 and ds.dropped == []


def test_hub_bias_moves_degree_one_portion():
    from syscallnet.synth import _ADWARE, _NEIGHBORS

    ps = [(FamilyProfile("low", _ADWARE, _NEIGHBORS, hub_bias=0.5, noise_rate=0.1), 50),
          (FamilyProfile("high", _ADWARE, _NEIGHBORS, hub_bias=5.0, noise_rate=0.1), 50)]
    ds = build_dataset(generate_corpus(ps, seed=0), builtin_dictionary("adware"))
    low = ds.X[ds.y == 0, 2].mean()
    high = ds.X[ds.y == 1, 2].mean()
    assert abs(high - low) > 0.1


def test_identical_profiles_not_distinguishable():
    ps = [(profile("P", hub_bias=2.0), 60), (profile("Q", hub_bias=2.0), 60)]
    ds = build_dataset(generate_corpus(ps, seed=1), SyscallDictionary.from_names(POOL))
    for j in range(ds.X.shape[1]):
        p = stats.ttest_ind(ds.X[ds.y == 0, j], ds.X[ds.y == 1, j], equal_var=False).pvalue
        assert p > 0.01


@pytest.mark.slow
def test_large_hub_bias_gives_plausible_power_law():
    """Hub-heavy walks of length 5000: in-degree power law plausible on >= 16 of 20 seeds."""
    pool = tuple(f"NtSynth{i:03d}" for i in range(100))
    p = FamilyProfile("pl", pool, NOISE, hub_bias=10.0, sequence_length=(5000, 5000), noise_rate=0.0)
    d = SyscallDictionary.from_names(pool)
    pvals = [power_law_test(degree_sample(build_graph(generate_trace(p, s), d)), 1000, seed=s).p_value
             for s in range(20)]
    assert sum(pv > 0.1 for pv in pvals) >= 16, np.round(pvals, 3).tolist()
