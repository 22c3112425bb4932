"""System call graphs built from dictionary-filtered call sequences.

Two consecutive calls ``(u, v)`` produce a directed edge when at least one of
them belongs to the malicious dictionary.  Repeated pairs are not parallel
edges: they raise the multiplicity of the single ``(u, v)`` edge.  Self-loops
are kept.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import Counter
from types import MappingProxyType
from typing import Iterable, Mapping

from .dictionary import SyscallDictionary
from .errors import EmptyGraph, ParseError
from .trace import CallSequence

FORMATS = ("edge-list", "dot", "gexf")
GEXF_NS = "http://gexf.net/1.2"


class SystemCallGraph:
    """Directed labeled graph with per-edge multiplicities.

    Nodes are stored sorted by name so every traversal (and therefore every
    floating point reduction downstream) has a canonical order.
    """

    __slots__ = ("nodes", "edges", "malicious", "_succ", "_pred")

    def __init__(self, nodes: Iterable[str], edges: Mapping[tuple[str, str], int],
                 malicious: Iterable[str] = ()):
        edges = {(u, v): int(m) for (u, v), m in edges.items()}
        node_set = set(nodes)
        for (u, v), m in edges.items():
            if m < 1:
                raise ValueError(f"edge {(u, v)} has multiplicity {m} < 1")
            node_set.add(u)
            node_set.add(v)
        self.nodes = tuple(sorted(node_set))
        self.edges = MappingProxyType(dict(sorted(edges.items())))
        self.malicious = frozenset(malicious) & frozenset(self.nodes)
        succ = {n: [] for n in self.nodes}
        pred = {n: [] for n in self.nodes}
        for (u, v) in self.edges:
            succ[u].append(v)
            pred[v].append(u)
        self._succ = {n: tuple(vs) for n, vs in succ.items()}
        self._pred = {n: tuple(vs) for n, vs in pred.items()}

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]] | Mapping, malicious: Iterable[str] = (),
                   nodes: Iterable[str] = ()):
        if not isinstance(edges, Mapping):
            edges = Counter(tuple(e) for e in edges)
        return cls(nodes, edges, malicious)

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        if not isinstance(other, SystemCallGraph):
            return NotImplemented
        return (self.nodes == other.nodes and dict(self.edges) == dict(other.edges)
                and self.malicious == other.malicious)

    def __repr__(self):
        return f"SystemCallGraph(n={len(self.nodes)}, edges={len(self.edges)})"

    def in_dictionary(self, node: str) -> bool:
        return node in self.malicious

    def successors(self, node: str) -> tuple[str, ...]:
        return self._succ[node]

    def predecessors(self, node: str) -> tuple[str, ...]:
        return self._pred[node]

    def with_node(self, node: str, malicious: bool = False) -> "SystemCallGraph":
        """Copy of the graph with one extra (possibly isolated) node."""
        mal = set(self.malicious)
        if malicious:
            mal.add(node)
        return SystemCallGraph(self.nodes + (node,), self.edges, mal)

    def violations(self) -> list[str]:
        """Structural rule violations; an empty list means the graph is well formed."""
        problems = []
        for (u, v) in self.edges:
            if u not in self.malicious and v not in self.malicious:
                problems.append(f"edge {u}->{v} has no dictionary endpoint")
        for n in self.nodes:
            if n in self.malicious:
                continue
            if not any(x in self.malicious for x in self._succ[n] + self._pred[n]):
                problems.append(f"node {n} is not adjacent to a dictionary node")
        return problems


def _names(seq) -> list[str]:
    if isinstance(seq, CallSequence):
        return seq.names
    return list(seq)


def refine_sequence(seq, dictionary) -> list[tuple[str, str]]:
    """Consecutive call pairs with at least one endpoint in ``dictionary``, in order."""
    names = _names(seq)
    return [(a, b) for a, b in zip(names, names[1:]) if a in dictionary or b in dictionary]


def build_graph(seq, dictionary) -> SystemCallGraph:
    """Build the system call graph of ``seq`` filtered by ``dictionary``.

    Raises
    ------
    EmptyGraph
        When no consecutive pair touches the dictionary.
    """
    pairs = refine_sequence(seq, dictionary)
    if not pairs:
        sid = seq.sample_id if isinstance(seq, CallSequence) else "<sequence>"
        raise EmptyGraph(f"sample {sid!r} has no dictionary activity")
    counts = Counter(pairs)
    nodes = {x for p in pairs for x in p}
    return SystemCallGraph(nodes, counts, (n for n in nodes if n in dictionary))


# --------------------------------------------------------------------- export

def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_graph(g: SystemCallGraph, fmt: str = "edge-list") -> bytes:
    if not g.nodes:
        raise EmptyGraph("cannot export an empty graph")
    if fmt == "edge-list":
        return "".join(f"{u}\t{v}\t{m}\n" for (u, v), m in g.edges.items()).encode()
    if fmt == "dot":
        lines = ["digraph syscalls {"]
        for n in g.nodes:
            mal = "true" if n in g.malicious else "false"
            lines.append(f"  {_dot_quote(n)} [label={_dot_quote(n)}, malicious={mal}];")
        for (u, v), m in g.edges.items():
            lines.append(f"  {_dot_quote(u)} -> {_dot_quote(v)} [weight={m}, label={m}];")
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "gexf":
        return _to_gexf(g)
    raise ValueError(f"unknown graph format {fmt!r}; expected one of {FORMATS}")


def _to_gexf(g: SystemCallGraph) -> bytes:
    root = ET.Element("gexf", {"xmlns": GEXF_NS, "version": "1.2"})
    graph = ET.SubElement(root, "graph", {"mode": "static", "defaultedgetype": "directed"})
    attrs = ET.SubElement(graph, "attributes", {"class": "node"})
    ET.SubElement(attrs, "attribute", {"id": "0", "title": "malicious", "type": "boolean"})
    nodes_el = ET.SubElement(graph, "nodes")
    ids = {}
    for i, n in enumerate(g.nodes):
        ids[n] = f"n{i}"
        node = ET.SubElement(nodes_el, "node", {"id": ids[n], "label": n})
        vals = ET.SubElement(node, "attvalues")
        ET.SubElement(vals, "attvalue", {"for": "0", "value": "true" if n in g.malicious else "false"})
    edges_el = ET.SubElement(graph, "edges")
    for i, ((u, v), m) in enumerate(g.edges.items()):
        ET.SubElement(edges_el, "edge", {"id": str(i), "source": ids[u], "target": ids[v],
                                         "weight": str(m)})
    ET.indent(root)
    return b'<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="utf-8") + b"\n"


# --------------------------------------------------------------------- import

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _from_gexf(data: bytes) -> SystemCallGraph:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"invalid GEXF: {exc}") from exc
    mal_attr = None
    labels, malicious, edges = {}, set(), Counter()
    for el in root.iter():
        tag = _local(el.tag)
        if tag == "attribute" and el.get("title") == "malicious":
            mal_attr = el.get("id")
        elif tag == "node":
            nid = el.get("id")
            if nid is None:
                raise ParseError("GEXF node without id")
            labels[nid] = el.get("label", nid)
            for av in el.iter():
                if _local(av.tag) == "attvalue" and av.get("for") == mal_attr:
                    if av.get("value", "").lower() == "true":
                        malicious.add(labels[nid])
        elif tag == "edge":
            s, t = el.get("source"), el.get("target")
            if s not in labels or t not in labels:
                raise ParseError(f"GEXF edge references unknown node {s!r} or {t!r}")
            try:
                w = int(round(float(el.get("weight", "1"))))
            except ValueError:
                raise ParseError(f"bad edge weight {el.get('weight')!r}") from None
            edges[(labels[s], labels[t])] += w
    if not labels:
        raise ParseError("GEXF document has no nodes")
    return SystemCallGraph(labels.values(), edges, malicious)


def _from_edge_list(data: bytes, malicious) -> SystemCallGraph:
    edges = {}
    for lineno, line in enumerate(data.decode("utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"line {lineno}: expected '<u>\\t<v>\\t<multiplicity>'")
        u, v, m = cols
        try:
            m = int(m)
        except ValueError:
            raise ParseError(f"line {lineno}: bad multiplicity {m!r}") from None
        if m < 1 or (u, v) in edges:
            raise ParseError(f"line {lineno}: invalid or duplicate edge {u}->{v}")
        edges[(u, v)] = m
    if not edges:
        raise ParseError("edge list is empty")
    nodes = {x for e in edges for x in e}
    if isinstance(malicious, SyscallDictionary):
        malicious = malicious.names
    return SystemCallGraph(nodes, edges, (n for n in nodes if n in set(malicious)))


def import_graph(data, fmt: str = "edge-list", dictionary=None) -> SystemCallGraph:
    """Inverse of :func:`export_graph` for ``edge-list`` and ``gexf``.

    An edge list carries no node attributes, so dictionary membership is
    recomputed from ``dictionary`` (a :class:`SyscallDictionary` or iterable of
    names); without it no node is flagged.
    """
    if isinstance(data, str):
        data = data.encode()
    if not data.strip():
        raise ParseError("empty graph file")
    if fmt == "edge-list":
        return _from_edge_list(data, dictionary if dictionary is not None else ())
    if fmt == "gexf":
        return _from_gexf(data)
    raise ValueError(f"cannot import format {fmt!r}")
