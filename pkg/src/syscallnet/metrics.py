"""Social network analysis measures on system call graphs.

Conventions used throughout:

* degrees count self-loops (a loop adds one to both in- and out-degree);
  weighted degrees sum edge multiplicities;
* path based measures (betweenness, distances, diameter) follow edge
  direction, use unit edge lengths and ignore self-loops;
* clustering works on the undirected simple projection;
* density applies ``2m / (n(n-1))`` literally with ``m`` the number of
  distinct non-loop edges, so a directed graph can exceed 1.
"""

from __future__ import annotations

import csv
import io
import json
from collections import deque
from dataclasses import asdict, dataclass, field

from .callgraph import SystemCallGraph
from .errors import DegenerateNormalization, EmptyGraph, NoFinitePairs, TooSmall

DIRECTIONS = ("in", "out")


def _require_nodes(g: SystemCallGraph):
    if not g.nodes:
        raise EmptyGraph("metric undefined on a graph without nodes")


def degrees(g: SystemCallGraph, direction: str = "in", weighted: bool = False) -> dict[str, int]:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    deg = dict.fromkeys(g.nodes, 0)
    for (u, v), m in g.edges.items():
        deg[v if direction == "in" else u] += m if weighted else 1
    return deg


@dataclass(frozen=True)
class DegreeHistogram:
    direction: str
    weighted: bool
    counts: dict  # degree k -> n_k, sorted by k
    n: int

    def p(self, k: int) -> float:
        return self.counts.get(k, 0) / self.n


def degree_distribution(g: SystemCallGraph, direction: str = "in", weighted: bool = False) -> DegreeHistogram:
    _require_nodes(g)
    counts = {}
    for d in degrees(g, direction, weighted).values():
        counts[d] = counts.get(d, 0) + 1
    return DegreeHistogram(direction, weighted, dict(sorted(counts.items())), len(g.nodes))


def avg_degree_centrality(g: SystemCallGraph, direction: str = "in", weighted: bool = False,
                          normalized: bool = False) -> float:
    _require_nodes(g)
    deg = list(degrees(g, direction, weighted).values())
    if normalized:
        top = max(deg)
        if top == 0:
            raise DegenerateNormalization("maximum degree is 0")
        return sum(d / top for d in deg) / len(deg)
    return sum(deg) / len(deg)


def portion_degree_one(g: SystemCallGraph, direction: str = "in", weighted: bool = False) -> float:
    return degree_distribution(g, direction, weighted).p(1)


def _bfs(g: SystemCallGraph, source: str):
    """Distances, geodesic counts and visit order from ``source`` (loops ignored)."""
    dist = {source: 0}
    sigma = dict.fromkeys(g.nodes, 0)
    sigma[source] = 1
    preds = {source: []}
    order = []
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in g.successors(v):
            if w == v:
                continue
            if w not in dist:
                dist[w] = dist[v] + 1
                preds[w] = []
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return dist, sigma, preds, order


def betweenness(g: SystemCallGraph) -> dict[str, float]:
    """Directed betweenness: sum over ordered pairs of the geodesic fraction through each node."""
    _require_nodes(g)
    score = dict.fromkeys(g.nodes, 0.0)
    for s in g.nodes:
        _, sigma, preds, order = _bfs(g, s)
        delta = dict.fromkeys(order, 0.0)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                score[w] += delta[w]
    return score


def shortest_path_lengths(g: SystemCallGraph) -> dict[str, dict[str, int]]:
    """Finite directed distances between distinct nodes, keyed by source."""
    out = {}
    for s in g.nodes:
        dist = _bfs(g, s)[0]
        del dist[s]
        out[s] = dist
    return out


def average_distance(g: SystemCallGraph) -> float:
    """Mean finite geodesic length over ordered pairs of distinct nodes."""
    _require_nodes(g)
    total = count = 0
    for dist in shortest_path_lengths(g).values():
        total += sum(dist.values())
        count += len(dist)
    if count == 0:
        raise NoFinitePairs("no node reaches another distinct node")
    return total / count


def diameter(g: SystemCallGraph) -> int:
    _require_nodes(g)
    longest = [max(d.values()) for d in shortest_path_lengths(g).values() if d]
    if not longest:
        raise NoFinitePairs("no node reaches another distinct node")
    return max(longest)


def _undirected_neighbors(g: SystemCallGraph) -> dict[str, set]:
    nbrs = {n: set() for n in g.nodes}
    for (u, v) in g.edges:
        if u != v:
            nbrs[u].add(v)
            nbrs[v].add(u)
    return nbrs


def clustering_coefficient(g: SystemCallGraph) -> float:
    """3 x triangles / connected triples on the undirected simple projection."""
    _require_nodes(g)
    nbrs = _undirected_neighbors(g)
    triples = 0
    closed = 0  # = 6 x triangles: each triangle is seen from 3 centers, each pair twice
    for v in g.nodes:
        k = len(nbrs[v])
        triples += k * (k - 1) // 2
        for a in nbrs[v]:
            closed += len(nbrs[a] & nbrs[v])
    if triples == 0:
        return 0.0
    return (closed / 2) / triples


def network_density(g: SystemCallGraph) -> float:
    n = len(g.nodes)
    if n < 2:
        raise TooSmall("density needs at least 2 nodes")
    m = sum(1 for (u, v) in g.edges if u != v)
    return 2 * m / (n * (n - 1))


def weak_components(g: SystemCallGraph) -> list[list[str]]:
    nbrs = _undirected_neighbors(g)
    seen, comps = set(), []
    for s in g.nodes:
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def component_ratio(g: SystemCallGraph) -> float:
    """(c - 1) / (n - 1) with c the number of weakly connected components."""
    n = len(g.nodes)
    if n < 2:
        raise TooSmall("component ratio needs at least 2 nodes")
    return (len(weak_components(g)) - 1) / (n - 1)


def strong_components(g: SystemCallGraph) -> list[list[str]]:
    """Tarjan's algorithm, iterative."""
    index, low, on_stack = {}, {}, set()
    stack, comps = [], []
    counter = 0
    for root in g.nodes:
        if root in index:
            continue
        work = [(root, iter(g.successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def h_index(g: SystemCallGraph) -> int:
    """Largest h such that at least h nodes have total (in + out) degree >= h."""
    _require_nodes(g)
    din, dout = degrees(g, "in"), degrees(g, "out")
    total = sorted((din[n] + dout[n] for n in g.nodes), reverse=True)
    h = 0
    for i, d in enumerate(total, start=1):
        if d >= i:
            h = i
        else:
            break
    return h


def extras(g: SystemCallGraph) -> dict:
    return {
        "diameter": diameter(g),
        "h_index": h_index(g),
        "strong_component_count": len(strong_components(g)),
    }


# ------------------------------------------------------------------ reporting

CSV_COLUMNS = (
    "sample_id",
    "n_nodes",
    "n_edges",
    "avg_in_degree_centrality",
    "avg_weighted_in_degree_centrality",
    "avg_normalized_in_degree_centrality",
    "avg_normalized_weighted_in_degree_centrality",
    "avg_normalized_weighted_out_degree_centrality",
    "avg_betweenness",
    "avg_normalized_betweenness",
    "portion_in_degree_1",
    "portion_out_degree_1",
    "portion_weighted_in_degree_1",
    "portion_weighted_out_degree_1",
    "clustering_coefficient",
    "average_distance",
    "network_density",
    "component_ratio",
    "diameter",
    "h_index",
    "strong_component_count",
)


@dataclass
class MetricReport:
    """Every node- and network-level measure of one graph.

    Scalars that are undefined on the graph (no reachable pair, fewer than two
    nodes, all-zero normalizer) are None.
    """

    sample_id: str
    n_nodes: int
    n_edges: int
    in_degree: dict = field(repr=False)
    out_degree: dict = field(repr=False)
    weighted_in_degree: dict = field(repr=False)
    weighted_out_degree: dict = field(repr=False)
    betweenness: dict = field(repr=False)
    avg_in_degree_centrality: float
    avg_weighted_in_degree_centrality: float
    avg_normalized_in_degree_centrality: float | None
    avg_normalized_weighted_in_degree_centrality: float | None
    avg_normalized_weighted_out_degree_centrality: float | None
    avg_betweenness: float
    avg_normalized_betweenness: float | None
    portion_in_degree_1: float
    portion_out_degree_1: float
    portion_weighted_in_degree_1: float
    portion_weighted_out_degree_1: float
    clustering_coefficient: float
    average_distance: float | None
    network_density: float | None
    component_ratio: float | None
    diameter: int | None
    h_index: int
    strong_component_count: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def csv_row(self) -> list:
        return ["" if getattr(self, c) is None else getattr(self, c) for c in CSV_COLUMNS]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r.csv_row()])
    return buf.getvalue()


def _optional(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (NoFinitePairs, TooSmall, DegenerateNormalization):
        return None


def compute_metrics(g: SystemCallGraph, sample_id: str = "") -> MetricReport:
    _require_nodes(g)
    n = len(g.nodes)
    bc = betweenness(g)
    top_bc = max(bc.values())
    return MetricReport(
        sample_id=sample_id,
        n_nodes=n,
        n_edges=len(g.edges),
        in_degree=degrees(g, "in"),
        out_degree=degrees(g, "out"),
        weighted_in_degree=degrees(g, "in", True),
        weighted_out_degree=degrees(g, "out", True),
        betweenness=bc,
        avg_in_degree_centrality=avg_degree_centrality(g, "in"),
        avg_weighted_in_degree_centrality=avg_degree_centrality(g, "in", True),
        avg_normalized_in_degree_centrality=_optional(avg_degree_centrality, g, "in", False, True),
        avg_normalized_weighted_in_degree_centrality=_optional(avg_degree_centrality, g, "in", True, True),
        avg_normalized_weighted_out_degree_centrality=_optional(avg_degree_centrality, g, "out", True, True),
        avg_betweenness=sum(bc.values()) / n,
        avg_normalized_betweenness=(sum(b / top_bc for b in bc.values()) / n) if top_bc > 0 else None,
        portion_in_degree_1=portion_degree_one(g, "in"),
        portion_out_degree_1=portion_degree_one(g, "out"),
        portion_weighted_in_degree_1=portion_degree_one(g, "in", True),
        portion_weighted_out_degree_1=portion_degree_one(g, "out", True),
        clustering_coefficient=clustering_coefficient(g),
        average_distance=_optional(average_distance, g),
        network_density=_optional(network_density, g),
        component_ratio=_optional(component_ratio, g),
        diameter=_optional(diameter, g),
        h_index=h_index(g),
        strong_component_count=len(strong_components(g)),
    )
