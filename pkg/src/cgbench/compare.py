"""Merge per-tool call graphs and compare them edge by edge.

A merged graph tags every node and edge with the ids of the tools that
reported it. Edges may additionally carry a ``valid`` flag recorded during
manual validation; the flag is ternary so partially validated merges are
representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import DuplicateToolId, SchemaViolation, UnknownEdge
from .model import (CallEdge, CallGraph, EdgeKey, FunctionNode, NodeKey, dump_document,
                    load_json, parse_edges, parse_nodes)


class MergedNode(NamedTuple):
    id: int
    label: str
    position: NodeKey
    tools: frozenset
    labels: tuple = ()


class MergedEdge(NamedTuple):
    source: int
    target: int
    tools: frozenset
    valid: bool | None = None


@dataclass(frozen=True)
class MergedGraph:
    tools: tuple[str, ...]
    nodes: tuple[MergedNode, ...] = ()
    edges: tuple[MergedEdge, ...] = ()

    @cached_property
    def _by_id(self) -> dict[int, MergedNode]:
        return {n.id: n for n in self.nodes}

    def key_of(self, node_id: int) -> NodeKey:
        return self._by_id[node_id].position

    def edge_key(self, edge: MergedEdge) -> EdgeKey:
        return (self.key_of(edge.source), self.key_of(edge.target))

    @cached_property
    def edges_by_key(self) -> dict[EdgeKey, MergedEdge]:
        return {self.edge_key(e): e for e in self.edges}

    def edge_keys(self) -> frozenset[EdgeKey]:
        return frozenset(self.edges_by_key)

    def node_keys(self) -> frozenset[NodeKey]:
        return frozenset(n.position for n in self.nodes)

    def project(self, tool: str) -> CallGraph:
        """The edges (and nodes) reported by one tool, as a plain graph."""
        tool = tool.lower()
        nodes = tuple(FunctionNode(n.id, n.label, n.position) for n in self.nodes if tool in n.tools)
        edges = tuple(CallEdge(e.source, e.target) for e in self.edges if tool in e.tools)
        return CallGraph(nodes, edges)

    def as_callgraph(self) -> CallGraph:
        return CallGraph(tuple(FunctionNode(n.id, n.label, n.position) for n in self.nodes),
                         tuple(CallEdge(e.source, e.target) for e in self.edges))

    def is_validated(self) -> bool:
        return all(e.valid is not None for e in self.edges)


MergeInput = Union[tuple[str, CallGraph], MergedGraph]


def merge(inputs: Iterable[MergeInput]) -> MergedGraph:
    """Union graphs by node key and edge key, tagging each element with the
    tools that reported it. Validity flags of merged inputs carry over; the
    first flag seen for an edge wins."""
    universe: list[str] = []
    node_tools: dict[NodeKey, set] = {}
    node_labels: dict[NodeKey, list[str]] = {}
    edge_tools: dict[EdgeKey, set] = {}
    edge_valid: dict[EdgeKey, bool] = {}

    def claim(tool: str) -> str:
        tool = tool.lower()
        if tool in universe:
            raise DuplicateToolId(f"tool id {tool!r} given more than once")
        universe.append(tool)
        return tool

    def add_node(key: NodeKey, label: str, tools) -> None:
        node_tools.setdefault(key, set()).update(tools)
        seen = node_labels.setdefault(key, [])
        if label not in seen:
            seen.append(label)

    for item in inputs:
        if isinstance(item, MergedGraph):
            for t in item.tools:
                claim(t)
            for n in item.nodes:
                for label in n.labels or (n.label,):
                    add_node(n.position, label, n.tools)
            for e in item.edges:
                key = item.edge_key(e)
                edge_tools.setdefault(key, set()).update(e.tools)
                if e.valid is not None:
                    edge_valid.setdefault(key, e.valid)
        else:
            tool, graph = item
            tool = claim(tool)
            for n in sorted(graph.nodes, key=lambda n: n.id):
                add_node(n.position, n.label, (tool,))
            for key in sorted(graph.edge_keys()):
                edge_tools.setdefault(key, set()).add(tool)

    ids = {}
    nodes = []
    for key, tools in node_tools.items():
        ids[key] = len(nodes)
        labels = tuple(node_labels[key])
        nodes.append(MergedNode(len(nodes), labels[0], key, frozenset(tools), labels))
    edges = tuple(MergedEdge(ids[a], ids[b], frozenset(tools), edge_valid.get((a, b)))
                  for (a, b), tools in edge_tools.items())
    return MergedGraph(tuple(sorted(universe)), tuple(nodes), edges)


class Diff(NamedTuple):
    common: frozenset
    only_a: frozenset
    only_b: frozenset

    @property
    def union(self) -> int:
        return len(self.common) + len(self.only_a) + len(self.only_b)


def diff(a, b) -> Diff:
    """Partition the union of two graphs' edge keys by membership."""
    ka, kb = a.edge_keys(), b.edge_keys()
    return Diff(ka & kb, ka - kb, kb - ka)


class Region(NamedTuple):
    total: int
    true: int | None


def tool_subsets(tools: Sequence[str]) -> list[tuple[str, ...]]:
    """Every non-empty subset, ordered by size then lexicographically."""
    tools = sorted(tools)
    return [c for r in range(1, len(tools) + 1) for c in combinations(tools, r)]


def venn_regions(m: MergedGraph) -> dict[tuple[str, ...], Region]:
    """Edge counts per exact tool subset; empty regions are reported as 0.
    True counts are None when no edge carries a validity flag."""
    totals: dict[tuple[str, ...], int] = {}
    trues: dict[tuple[str, ...], int] = {}
    any_valid = False
    for e in m.edges:
        key = tuple(sorted(e.tools))
        totals[key] = totals.get(key, 0) + 1
        if e.valid is not None:
            any_valid = True
        if e.valid:
            trues[key] = trues.get(key, 0) + 1
    return {s: Region(totals.get(s, 0), trues.get(s, 0) if any_valid else None)
            for s in tool_subsets(m.tools)}


def set_validity(m: MergedGraph, labels: Iterable[tuple[EdgeKey, bool]] | Mapping[EdgeKey, bool]) -> MergedGraph:
    """Return ``m`` with the given edges marked true or false."""
    items = labels.items() if isinstance(labels, Mapping) else labels
    by_key = m.edges_by_key
    updates: dict[EdgeKey, bool] = {}
    for key, flag in items:
        key = (key[0], key[1])
        if key not in by_key:
            raise UnknownEdge(f"no edge {key[0]}->{key[1]} in the merged graph")
        updates[key] = bool(flag)
    if not updates:
        return m
    edges = tuple(e._replace(valid=updates[k]) if (k := m.edge_key(e)) in updates else e for e in m.edges)
    return MergedGraph(m.tools, m.nodes, edges)


# -- merged documents ---------------------------------------------------------

def serialize_merged(m: MergedGraph) -> str:
    nodes = []
    for n in sorted(m.nodes, key=lambda n: n.id):
        nodes.append({"id": n.id, "label": n.label, "file": n.position.file, "line": n.position.line,
                      "column": n.position.column, "tools": sorted(n.tools),
                      "labels": list(n.labels or (n.label,))})
    edges = []
    for e in sorted(m.edges, key=lambda e: (e.source, e.target)):
        rec = {"source": e.source, "target": e.target, "tools": sorted(e.tools)}
        if e.valid is not None:
            rec["valid"] = e.valid
        edges.append(rec)
    return dump_document(nodes, edges, extra={"tools": list(m.tools)})


def _tool_list(rec: Mapping, where: str, required: bool) -> frozenset:
    if "tools" not in rec:
        if required:
            raise SchemaViolation(f"{where}: missing field 'tools'")
        return frozenset()
    tools = rec["tools"]
    if not isinstance(tools, list) or not all(isinstance(t, str) and t for t in tools):
        raise SchemaViolation(f"{where}: 'tools' must be a list of non-empty strings")
    return frozenset(t.lower() for t in tools)


def merged_from_document(doc: Mapping) -> MergedGraph:
    nodes = []
    for i, (n, rec) in enumerate(parse_nodes(doc)):
        labels = rec.get("labels")
        if labels is not None and not (isinstance(labels, list) and all(isinstance(x, str) for x in labels)):
            raise SchemaViolation(f"nodes[{i}]: 'labels' must be a list of strings")
        nodes.append(MergedNode(n.id, n.label, n.position, _tool_list(rec, f"nodes[{i}]", False),
                                tuple(labels) if labels else (n.label,)))
    edges = []
    for i, (e, rec) in enumerate(parse_edges(doc, {n.id for n in nodes})):
        tools = _tool_list(rec, f"edges[{i}]", True)
        if not tools:
            raise SchemaViolation(f"edges[{i}]: 'tools' must be non-empty")
        valid = rec.get("valid")
        if valid is not None and not isinstance(valid, bool):
            raise SchemaViolation(f"edges[{i}]: 'valid' must be a boolean")
        edges.append(MergedEdge(e.source, e.target, tools, valid))
    if "tools" in doc:
        universe = _tool_list(doc, "document", True)
    else:
        universe = frozenset().union(*(e.tools for e in edges), *(n.tools for n in nodes))
    for i, e in enumerate(edges):
        if not e.tools <= universe:
            raise SchemaViolation(f"edges[{i}]: tools outside the declared universe")
    return MergedGraph(tuple(sorted(universe)), tuple(nodes), tuple(edges))


def deserialize_merged(text: str) -> MergedGraph:
    return merged_from_document(load_json(text))
