"""Unified call-graph model: node identity, canonical construction, JSON I/O.

A node is identified by its source position (file, line, column); the
integer ``id`` is only a local alias used inside one document. Calls made
from the global scope are attributed to an artificial ``toplevel`` node at
``toplevel:1:1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import MalformedDocument, SchemaViolation

TOPLEVEL = "toplevel"
ANONYMOUS = "anonymous"


class NodeKey(NamedTuple):
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    @classmethod
    def parse(cls, text: str) -> "NodeKey":
        """Parse ``file:line:column``; the file part may itself contain colons."""
        try:
            file, line, column = text.strip().rsplit(":", 2)
            key = cls(normalize_path(file), int(line), int(column))
        except ValueError:
            raise ValueError(f"not a file:line:column position: {text!r}") from None
        check_position(key)
        return key


# Positions and identity keys share one shape; a key is a normalized position.
SourcePosition = NodeKey

TOPLEVEL_KEY = NodeKey(TOPLEVEL, 1, 1)


class _GlobalScope:
    __slots__ = ()

    def __repr__(self) -> str:
        return "GLOBAL_SCOPE"


GLOBAL_SCOPE = _GlobalScope()

EdgeKey = tuple  # (NodeKey, NodeKey)


def normalize_path(path: str) -> str:
    return path.replace("\\", "/")


def check_position(pos: NodeKey) -> None:
    if not pos.file:
        raise ValueError("position file must be non-empty")
    if pos.line < 1 or pos.column < 1:
        raise ValueError(f"positions are 1-based, got {pos}")


class FunctionNode(NamedTuple):
    id: int
    label: str
    position: NodeKey


class CallEdge(NamedTuple):
    source: int
    target: int


def node_key(node: FunctionNode) -> NodeKey:
    pos = node.position
    return NodeKey(normalize_path(pos.file), pos.line, pos.column)


def format_edge_key(edge: EdgeKey) -> str:
    return f"{edge[0]}->{edge[1]}"


def parse_edge_key(text: str) -> EdgeKey:
    left, sep, right = text.partition("->")
    if not sep:
        raise ValueError(f"not an edge key: {text!r}")
    return NodeKey.parse(left), NodeKey.parse(right)


@dataclass(frozen=True)
class CallGraph:
    nodes: tuple[FunctionNode, ...] = ()
    edges: tuple[CallEdge, ...] = ()

    @cached_property
    def _by_id(self) -> dict[int, FunctionNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _by_key(self) -> dict[NodeKey, FunctionNode]:
        return {node_key(n): n for n in self.nodes}

    def node(self, node_id: int) -> FunctionNode:
        return self._by_id[node_id]

    def key_of(self, node_id: int) -> NodeKey:
        return node_key(self._by_id[node_id])

    def find(self, key: NodeKey) -> FunctionNode | None:
        return self._by_key.get(key)

    def node_keys(self) -> frozenset[NodeKey]:
        return frozenset(self._by_key)

    def edge_keys(self) -> frozenset[EdgeKey]:
        key_of = self.key_of
        return frozenset((key_of(e.source), key_of(e.target)) for e in self.edges)

    def labels(self) -> dict[NodeKey, str]:
        return {k: n.label for k, n in self._by_key.items()}

    def signature(self) -> tuple[frozenset, frozenset]:
        """Id-independent identity: labelled node keys plus edge key pairs."""
        return (frozenset((k, n.label) for k, n in self._by_key.items()), self.edge_keys())

    def flatten(self) -> list[tuple[object, NodeKey]]:
        """Raw (caller, callee) pairs with the toplevel caller mapped back to GLOBAL_SCOPE."""
        out = []
        for e in self.edges:
            src = self.key_of(e.source)
            out.append((GLOBAL_SCOPE if src == TOPLEVEL_KEY else src, self.key_of(e.target)))
        return out


def canonicalize(
    raw: Iterable[tuple[object, NodeKey]],
    labels: Mapping[NodeKey, str] | None = None,
    nodes: Iterable[NodeKey] = (),
) -> CallGraph:
    """Build a canonical graph from raw caller/callee key pairs.

    Duplicate pairs collapse, ``GLOBAL_SCOPE`` callers become the toplevel
    node, and ids are assigned densely in first-appearance order. ``nodes``
    lists keys to include even without incident edges; they count as
    appearing before the pairs.
    """
    labels = labels or {}
    ids: dict[NodeKey, int] = {}
    order: list[NodeKey] = []

    def intern(key) -> int:
        if key is GLOBAL_SCOPE:
            key = TOPLEVEL_KEY
        i = ids.get(key)
        if i is None:
            i = ids[key] = len(order)
            order.append(key)
        return i

    for key in nodes:
        intern(key)
    seen: set[tuple[int, int]] = set()
    edges = []
    for caller, callee in raw:
        pair = (intern(caller), intern(callee))
        if pair not in seen:
            seen.add(pair)
            edges.append(CallEdge(*pair))

    fnodes = []
    for i, key in enumerate(order):
        if key == TOPLEVEL_KEY:
            label = TOPLEVEL
        else:
            label = labels.get(key) or ANONYMOUS
            if label == TOPLEVEL:
                label = ANONYMOUS
        fnodes.append(FunctionNode(i, label, key))
    return CallGraph(tuple(fnodes), tuple(edges))


# -- serialization -----------------------------------------------------------

def _record(obj: Mapping) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def dump_document(node_records: Sequence[Mapping], edge_records: Sequence[Mapping],
                  extra: Mapping | None = None) -> str:
    """Write one record per line so documents diff cleanly."""
    parts = ["{\n"]
    for name, value in (extra or {}).items():
        parts.append(f'  "{name}": {json.dumps(value, ensure_ascii=False)},\n')
    for name, records, last in (("nodes", node_records, False), ("edges", edge_records, True)):
        if records:
            body = ",\n".join("    " + _record(r) for r in records)
            parts.append(f'  "{name}": [\n{body}\n  ]')
        else:
            parts.append(f'  "{name}": []')
        parts.append("\n" if last else ",\n")
    parts.append("}\n")
    return "".join(parts)


def node_record(node: FunctionNode) -> dict:
    return {"id": node.id, "label": node.label, "file": node.position.file,
            "line": node.position.line, "column": node.position.column}


def serialize(graph: CallGraph) -> str:
    nodes = sorted(graph.nodes, key=lambda n: n.id)
    edges = sorted(graph.edges)
    return dump_document([node_record(n) for n in nodes],
                         [{"source": e.source, "target": e.target} for e in edges])


def load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(str(exc)) from None
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level value must be an object")
    return doc


def _int_field(rec: Mapping, name: str, where: str, minimum: int | None = None) -> int:
    if name not in rec:
        raise SchemaViolation(f"{where}: missing field {name!r}")
    value = rec[name]
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaViolation(f"{where}: field {name!r} must be an integer")
    if minimum is not None and value < minimum:
        raise SchemaViolation(f"{where}: field {name!r} must be >= {minimum}")
    return value


def _str_field(rec: Mapping, name: str, where: str) -> str:
    if name not in rec:
        raise SchemaViolation(f"{where}: missing field {name!r}")
    if not isinstance(rec[name], str):
        raise SchemaViolation(f"{where}: field {name!r} must be a string")
    return rec[name]


def parse_nodes(doc: Mapping) -> list[tuple[FunctionNode, Mapping]]:
    records = doc.get("nodes")
    if not isinstance(records, list):
        raise SchemaViolation("document must contain a 'nodes' list")
    out = []
    ids: set[int] = set()
    keys: set[NodeKey] = set()
    for i, rec in enumerate(records):
        where = f"nodes[{i}]"
        if not isinstance(rec, dict):
            raise SchemaViolation(f"{where}: node record must be an object")
        node_id = _int_field(rec, "id", where, 0)
        label = _str_field(rec, "label", where)
        file = _str_field(rec, "file", where)
        if not file:
            raise SchemaViolation(f"{where}: empty file")
        key = NodeKey(normalize_path(file), _int_field(rec, "line", where, 1),
                      _int_field(rec, "column", where, 1))
        if node_id in ids:
            raise SchemaViolation(f"{where}: duplicate node id {node_id}")
        if key in keys:
            raise SchemaViolation(f"{where}: duplicate node position {key}")
        if label == TOPLEVEL and key != TOPLEVEL_KEY:
            raise SchemaViolation(f"{where}: 'toplevel' label at {key}")
        ids.add(node_id)
        keys.add(key)
        out.append((FunctionNode(node_id, label, key), rec))
    return out


def parse_edges(doc: Mapping, ids: set[int]) -> list[tuple[CallEdge, Mapping]]:
    records = doc.get("edges")
    if not isinstance(records, list):
        raise SchemaViolation("document must contain an 'edges' list")
    out = []
    seen: set[CallEdge] = set()
    for i, rec in enumerate(records):
        where = f"edges[{i}]"
        if not isinstance(rec, dict):
            raise SchemaViolation(f"{where}: edge record must be an object")
        edge = CallEdge(_int_field(rec, "source", where), _int_field(rec, "target", where))
        for end in edge:
            if end not in ids:
                raise SchemaViolation(f"{where}: dangling endpoint {end}")
        if edge in seen:
            raise SchemaViolation(f"{where}: duplicate edge {edge.source}->{edge.target}")
        seen.add(edge)
        out.append((edge, rec))
    return out


def graph_from_document(doc: Mapping) -> CallGraph:
    nodes = [n for n, _ in parse_nodes(doc)]
    edges = [e for e, _ in parse_edges(doc, {n.id for n in nodes})]
    return CallGraph(tuple(nodes), tuple(edges))


def deserialize(text: str) -> CallGraph:
    return graph_from_document(load_json(text))
