"""Read foreign call-graph dumps into the unified model.

Two input formats are understood: a DOT subset (``digraph`` with node
statements, ``label`` attributes and ``->`` chains) and a plain positioned
edge list with one ``file:line:col -> file:line:col`` pair per line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DotSyntaxError, KeyCollision, LabelMismatch, UnknownKey
from .model import (GLOBAL_SCOPE, TOPLEVEL, TOPLEVEL_KEY, CallGraph, NodeKey, canonicalize,
                    normalize_path)


@dataclass(frozen=True)
class LabelPattern:
    """How to read a position out of a node label.

    ``regex`` must define the named groups ``file`` and ``line`` and may
    define ``column`` and ``label``. A missing column group reads as column 1.
    The offsets are added to the extracted line and column so 0-based tool
    conventions can be repaired on the way in.
    """

    regex: str = r"(?P<file>.+):(?P<line>\d+):(?P<column>\d+)"
    line_offset: int = 0
    column_offset: int = 0
    global_label: str = TOPLEVEL

    def __post_init__(self):
        compiled = re.compile(self.regex)
        missing = {"file", "line"} - set(compiled.groupindex)
        if missing:
            raise ValueError(f"label pattern lacks group(s): {', '.join(sorted(missing))}")
        object.__setattr__(self, "_compiled", compiled)

    def match(self, text: str) -> tuple[object, str | None] | None:
        """Return ``(key, label)`` for ``text``, ``key`` being GLOBAL_SCOPE
        for the global-scope label, or None when the label does not match."""
        if text == self.global_label:
            return GLOBAL_SCOPE, TOPLEVEL
        m = self._compiled.fullmatch(text)
        if m is None:
            return None
        groups = m.groupdict()
        line = int(groups["line"]) + self.line_offset
        column = int(groups["column"]) + self.column_offset if groups.get("column") else 1 + self.column_offset
        if line < 1 or column < 1 or not groups["file"]:
            return None
        key = NodeKey(normalize_path(groups["file"]), line, column)
        if key == TOPLEVEL_KEY:
            return GLOBAL_SCOPE, TOPLEVEL
        return key, groups.get("label")


# Best-effort label grammars; the exact dump formats of these tools are not
# documented, so these are starting points to adjust with --node-pattern.
PRESETS: dict[str, LabelPattern] = {
    "unified": LabelPattern(),
    "wala": LabelPattern(r"(?P<label>[^@]*)@(?P<file>[^:]+):(?P<line>\d+)", global_label="<main>"),
    "tajs": LabelPattern(r"(?P<label>.*?)\s*\((?P<file>[^:()]+):(?P<line>\d+):(?P<column>\d+)\)",
                         global_label="<main>"),
}


_DOT_TOKEN = re.compile(r"""
    (?P<ws>\s+|//[^\n]*|\#[^\n]*|/\*[\s\S]*?\*/)
  | (?P<str>"(?:[^"\\]|\\[\s\S])*")
  | (?P<id>[A-Za-z_\u0080-\uffff][\w\u0080-\uffff]*|-?(?:\.\d+|\d+(?:\.\d*)?))
  | (?P<arrow>->)
  | (?P<undirected>--)
  | (?P<punct>[{}\[\]=;,:<])
""", re.VERBOSE)


def _dot_tokens(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    line = 1
    while pos < len(text):
        m = _DOT_TOKEN.match(text, pos)
        if m is None:
            raise DotSyntaxError(f"line {line}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "str":
                value = re.sub(r'\\(["\\])', r"\1", value[1:-1]).replace("\\\n", "")
                kind = "id"
            elif kind == "undirected":
                raise DotSyntaxError(f"line {line}: undirected edges are not supported")
            elif value == ":":
                raise DotSyntaxError(f"line {line}: node ports are not supported")
            elif value == "<":
                raise DotSyntaxError(f"line {line}: HTML labels are not supported")
            out.append((kind, value, line))
        line += m.group().count("\n")
        pos = m.end()
    out.append(("eof", "", line))
    return out


class _DotReader:
    def __init__(self, text: str):
        self.toks = _dot_tokens(text)
        self.i = 0
        self.labels: dict[str, str] = {}
        self.order: list[str] = []
        self.edges: list[tuple[str, str]] = []

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self, value: str | None = None, kind: str | None = None) -> str:
        k, v, line = self.toks[self.i]
        if (value is not None and (v != value or k == "id")) or (kind is not None and k != kind):
            want = value or kind
            raise DotSyntaxError(f"line {line}: expected {want!r} but found {v or 'end of input'!r}")
        self.i += 1
        return v

    def is_punct(self, value: str) -> bool:
        k, v, _ = self.toks[self.i]
        return k in ("punct", "arrow") and v == value

    def node(self, name: str) -> None:
        if name not in self.labels:
            self.labels[name] = name
            self.order.append(name)

    def attrs(self) -> dict[str, str]:
        out = {}
        while self.is_punct("["):
            self.take("[")
            while not self.is_punct("]"):
                key = self.take(kind="id")
                self.take("=")
                out[key] = self.take(kind="id")
                if self.is_punct(",") or self.is_punct(";"):
                    self.i += 1
            self.take("]")
        return out

    def read(self) -> None:
        k, v, _ = self.peek()
        if k == "id" and v.lower() == "strict":
            self.i += 1
        kw = self.take(kind="id")
        if kw.lower() != "digraph":
            raise DotSyntaxError(f"expected 'digraph' but found {kw!r}")
        if self.peek()[0] == "id":
            self.i += 1
        self.take("{")
        while not self.is_punct("}"):
            self.statement()
        self.take("}")
        if self.peek()[0] != "eof":
            raise DotSyntaxError(f"line {self.peek()[2]}: trailing content after graph")

    def statement(self) -> None:
        k, v, line = self.peek()
        if k == "eof":
            raise DotSyntaxError("unexpected end of input inside graph body")
        if k != "id":
            if v == ";":
                self.i += 1
                return
            if v == "{":
                raise DotSyntaxError(f"line {line}: subgraphs are not supported")
            raise DotSyntaxError(f"line {line}: unexpected {v!r}")
        low = v.lower()
        if low == "subgraph":
            raise DotSyntaxError(f"line {line}: subgraphs are not supported")
        self.i += 1
        if low in ("graph", "node", "edge") and self.is_punct("["):
            self.attrs()
        elif self.is_punct("="):
            self.i += 1
            self.take(kind="id")
        elif self.is_punct("->"):
            chain = [v]
            while self.is_punct("->"):
                self.i += 1
                if self.is_punct("{"):
                    raise DotSyntaxError(f"line {line}: subgraphs are not supported")
                chain.append(self.take(kind="id"))
            self.attrs()
            for name in chain:
                self.node(name)
            self.edges.extend(zip(chain, chain[1:]))
        else:
            attrs = self.attrs()
            self.node(v)
            if "label" in attrs:
                self.labels[v] = attrs["label"]
        if self.is_punct(";") or self.is_punct(","):
            self.i += 1


def parse_dot(text: str, pattern: LabelPattern | None = None) -> CallGraph:
    """Read a DOT digraph whose node labels encode source positions."""
    pattern = pattern or LabelPattern()
    reader = _DotReader(text)
    reader.read()
    keys: dict[str, object] = {}
    labels: dict[NodeKey, str] = {}
    for name in reader.order:
        label = reader.labels[name]
        hit = pattern.match(label)
        if hit is None:
            raise LabelMismatch(name, label)
        key, text_label = hit
        keys[name] = key
        if text_label and key is not GLOBAL_SCOPE:
            labels.setdefault(key, text_label)
    nodes = [TOPLEVEL_KEY if k is GLOBAL_SCOPE else k for k in keys.values()]
    return canonicalize(((keys[a], keys[b]) for a, b in reader.edges), labels, nodes=nodes)


def parse_edge_list(text: str, global_label: str = TOPLEVEL) -> CallGraph:
    """Read ``file:line:col -> file:line:col`` lines; blank and ``#`` lines are skipped."""
    pattern = LabelPattern(global_label=global_label)
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        left, sep, right = line.partition("->")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'caller -> callee'")
        ends = []
        for part in (left.strip(), right.strip()):
            hit = pattern.match(part)
            if hit is None:
                raise LabelMismatch(f"line {lineno}", part)
            ends.append(hit[0])
        raw.append(tuple(ends))
    return canonicalize(raw)


def repair_positions(graph: CallGraph, patch: Mapping[NodeKey, NodeKey] | Iterable[tuple[NodeKey, NodeKey]]) -> CallGraph:
    """Re-key nodes according to ``patch``; edges follow their nodes."""
    mapping = dict(patch.items() if isinstance(patch, Mapping) else patch)
    present = graph.node_keys()
    for old in mapping:
        if old not in present:
            raise UnknownKey(f"no node at {old}")
    seen: dict[NodeKey, NodeKey] = {}
    for n in sorted(graph.nodes, key=lambda n: n.id):
        old = n.position
        new = mapping.get(old, old)
        if new in seen:
            raise KeyCollision(f"{seen[new]} and {old} would both become {new}")
        seen[new] = old
    labels = {mapping.get(n.position, n.position): n.label for n in graph.nodes}
    order = [mapping.get(n.position, n.position) for n in sorted(graph.nodes, key=lambda n: n.id)]
    raw = [(mapping.get(a, a), mapping.get(b, b)) for a, b in
           ((graph.key_of(e.source), graph.key_of(e.target)) for e in graph.edges)]
    return canonicalize(raw, labels, nodes=order)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: CallGraph) -> str:
    """Render ``graph`` in the DOT dialect :func:`parse_dot` reads back."""
    lines = ["digraph callgraph {"]
    for n in sorted(graph.nodes, key=lambda n: n.id):
        lines.append(f"  n{n.id} [label={_dot_quote(str(n.position))}];")
    for e in sorted(graph.edges):
        lines.append(f"  n{e.source} -> n{e.target};")
    lines.append("}")
    return "\n".join(lines) + "\n"
