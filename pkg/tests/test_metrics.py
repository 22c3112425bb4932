import itertools
import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import (
    average_distance_oracle,
    betweenness_oracle,
    clustering_oracle,
    component_ratio_oracle,
    degree_oracle,
    density_oracle,
    diameter_oracle,
    h_index_oracle,
    portion_oracle,
    random_graph,
    scc_count_oracle,
)

from syscallnet.callgraph import SystemCallGraph
from syscallnet.errors import DegenerateNormalization, EmptyGraph, NoFinitePairs, TooSmall
from syscallnet.metrics import (
    CSV_COLUMNS,
    avg_degree_centrality,
    average_distance,
    betweenness,
    clustering_coefficient,
    component_ratio,
    compute_metrics,
    degree_distribution,
    degrees,
    diameter,
    extras,
    h_index,
    network_density,
    portion_degree_one,
    reports_to_csv,
    strong_components,
    weak_components,
)

PATH = SystemCallGraph.from_edges([("a", "b"), ("b", "c")])
STAR = SystemCallGraph.from_edges([("hub", f"l{i}") for i in range(5)])
TRIANGLE = SystemCallGraph.from_edges([("a", "b"), ("b", "c"), ("c", "a")])
K4 = SystemCallGraph.from_edges([(u, v) for u, v in itertools.permutations("abcd", 2)])


def test_degree_distribution_examples():
    h = degree_distribution(PATH, "in")
    assert h.p(0) == pytest.approx(1 / 3) and h.p(1) == pytest.approx(2 / 3)
    s = degree_distribution(STAR, "out")
    assert s.p(5) == pytest.approx(1 / 6) and s.p(0) == pytest.approx(5 / 6)
    assert sum(h.counts.values()) == h.n == 3


def test_avg_degree_and_portion_examples():
    assert avg_degree_centrality(PATH, "in") == pytest.approx(2 / 3)
    assert portion_degree_one(PATH, "in") == pytest.approx(2 / 3)
    assert portion_degree_one(K4, "in") == 0.0
    assert avg_degree_centrality(PATH, "in", normalized=True) == pytest.approx(2 / 3)


def test_normalization_of_edgeless_graph():
    g = SystemCallGraph(["a", "b"], {})
    with pytest.raises(DegenerateNormalization):
        avg_degree_centrality(g, "in", normalized=True)
    assert compute_metrics(g).avg_normalized_in_degree_centrality is None


def test_self_loop_counts_in_degree_not_paths():
    g = SystemCallGraph.from_edges({("a", "a"): 3, ("a", "b"): 1})
    assert degrees(g, "in") == {"a": 1, "b": 1}
    assert degrees(g, "out", weighted=True) == {"a": 4, "b": 0}
    assert average_distance(g) == 1.0
    assert betweenness(g) == {"a": 0.0, "b": 0.0}


def test_betweenness_examples():
    assert betweenness(PATH) == {"a": 0.0, "b": 1.0, "c": 0.0}
    assert set(betweenness(STAR).values()) == {0.0}


def test_clustering_examples():
    assert clustering_coefficient(TRIANGLE) == 1.0
    assert clustering_coefficient(PATH) == 0.0


def test_average_distance_examples():
    assert average_distance(PATH) == pytest.approx(4 / 3)
    assert average_distance(K4) == 1.0
    with pytest.raises(NoFinitePairs):
        average_distance(SystemCallGraph(["a", "b"], {}))


def test_density_examples():
    assert network_density(PATH) == pytest.approx(2 / 3)
    assert network_density(SystemCallGraph.from_edges([("a", "b"), ("b", "a")])) == 2.0
    with pytest.raises(TooSmall):
        network_density(SystemCallGraph.from_edges([("a", "a")]))


def test_component_ratio_examples():
    assert component_ratio(PATH) == 0.0
    two = SystemCallGraph.from_edges([("a", "b"), ("c", "d")])
    assert component_ratio(two) == pytest.approx(1 / 3)
    assert sorted(weak_components(two)) == [["a", "b"], ["c", "d"]]


def test_extras_examples():
    assert extras(PATH) == {"diameter": 2, "h_index": 1, "strong_component_count": 3}
    t = extras(TRIANGLE)
    assert t["diameter"] == 2 and t["strong_component_count"] == 1 and t["h_index"] == 2


def test_empty_graph_raises():
    g = SystemCallGraph([], {})
    for fn in (degree_distribution, betweenness, clustering_coefficient, average_distance, h_index,
               compute_metrics):
        with pytest.raises(EmptyGraph):
            fn(g)


def _check_against_oracles(g):
    for direction in ("in", "out"):
        for weighted in (False, True):
            assert degrees(g, direction, weighted) == degree_oracle(g, direction, weighted)
            assert portion_degree_one(g, direction, weighted) == pytest.approx(
                portion_oracle(g, direction, weighted), abs=1e-12)
    bo = betweenness_oracle(g)
    for v, x in betweenness(g).items():
        assert x == pytest.approx(bo[v], abs=1e-9)
    assert clustering_coefficient(g) == pytest.approx(clustering_oracle(g), abs=1e-9)
    ad = average_distance_oracle(g)
    if ad is None:
        with pytest.raises(NoFinitePairs):
            average_distance(g)
    else:
        assert average_distance(g) == pytest.approx(ad, abs=1e-9)
        assert diameter(g) == diameter_oracle(g)
    if len(g.nodes) >= 2:
        assert network_density(g) == pytest.approx(density_oracle(g), abs=1e-12)
        assert component_ratio(g) == pytest.approx(component_ratio_oracle(g), abs=1e-12)
    assert len(strong_components(g)) == scc_count_oracle(g)
    assert h_index(g) == h_index_oracle(g)


def test_random_graphs_match_oracles():
    rng = np.random.default_rng(11)
    for _ in range(150):
        _check_against_oracles(random_graph(rng))


def _to_nx(g):
    G = nx.DiGraph()
    G.add_nodes_from(g.nodes)
    G.add_edges_from((u, v) for u, v in g.edges if u != v)
    return G


def test_random_graphs_match_networkx():
    """A third, independent route for the path and component measures."""
    rng = np.random.default_rng(12)
    for _ in range(150):
        g = random_graph(rng)
        G = _to_nx(g)
        ref = nx.betweenness_centrality(G, normalized=False)
        for v, x in betweenness(g).items():
            assert x == pytest.approx(ref[v], abs=1e-9)
        assert clustering_coefficient(g) == pytest.approx(nx.transitivity(G.to_undirected()), abs=1e-9)
        assert len(strong_components(g)) == nx.number_strongly_connected_components(G)
        assert len(weak_components(g)) == nx.number_weakly_connected_components(G)
        lengths = [d for s, row in nx.shortest_path_length(G) for t, d in row.items() if s != t]
        if lengths:
            assert average_distance(g) == pytest.approx(sum(lengths) / len(lengths), abs=1e-9)


def test_report_is_deterministic_and_serializable():
    rng = np.random.default_rng(3)
    g = random_graph(rng)
    a, b = compute_metrics(g, "s"), compute_metrics(g, "s")
    assert a.to_json() == b.to_json()
    assert json.loads(a.to_json())["sample_id"] == "s"
    lines = reports_to_csv([a, b]).splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert lines[1] == lines[2]


def test_path_report_values():
    r = compute_metrics(PATH)
    assert r.avg_in_degree_centrality == pytest.approx(2 / 3)
    assert r.portion_in_degree_1 == pytest.approx(2 / 3)
    assert r.average_distance == pytest.approx(4 / 3)
    assert r.network_density == pytest.approx(2 / 3)
    assert r.avg_betweenness == pytest.approx(1 / 3)


edge_sets = st.dictionaries(
    st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef")),
    st.integers(1, 5), min_size=1, max_size=20)


@settings(max_examples=200, deadline=None)
@given(edge_sets)
def test_invariants(edges):
    g = SystemCallGraph.from_edges(edges)
    n = len(g.nodes)
    r = compute_metrics(g)
    assert r.avg_in_degree_centrality == pytest.approx(avg_degree_centrality(g, "out"))
    assert sum(degrees(g, "in", True).values()) == sum(degrees(g, "out", True).values())
    for x in (r.portion_in_degree_1, r.portion_out_degree_1, r.clustering_coefficient):
        assert 0.0 <= x <= 1.0
    if r.component_ratio is not None:
        assert 0.0 <= r.component_ratio <= 1.0
    for v in g.nodes:
        assert 0.0 <= r.betweenness[v] <= (n - 1) * (n - 2) + 1e-9
    if r.average_distance is not None:
        assert 1.0 <= r.average_distance <= r.diameter <= n - 1
    assert 1 <= r.strong_component_count <= n


@settings(max_examples=100, deadline=None)
@given(edge_sets, st.randoms(use_true_random=False))
def test_relabeling_invariance(edges, rnd):
    g = SystemCallGraph.from_edges(edges)
    names = list(g.nodes)
    shuffled = names[:]
    rnd.shuffle(shuffled)
    m = {a: "x" + b for a, b in zip(names, shuffled)}
    h = SystemCallGraph.from_edges({(m[u], m[v]): k for (u, v), k in g.edges.items()})
    a, b = compute_metrics(g).to_dict(), compute_metrics(h).to_dict()
    for key in CSV_COLUMNS[1:]:
        if a[key] is None:
            assert b[key] is None
        else:
            assert b[key] == pytest.approx(a[key], abs=1e-9)
