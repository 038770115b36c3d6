"""ESTree interchange documents: load external parser dumps, dump our own ASTs.

Interchange locations use 1-based lines and 0-based columns (the esprima and
acorn convention); internally both are 1-based.
"""

from __future__ import annotations

import json

from ..errors import MalformedDocument, MissingLocations, UnsupportedConstruct
from .ast import ATTRS, CALL_TYPES, CHILDREN, FUNCTION_TYPES, Ast, Node

_LOCATED = FUNCTION_TYPES | CALL_TYPES
# Optional fields that default to None when an interchange dump omits them.
_OPTIONAL = {"id", "init", "alternate", "label", "test", "update", "argument",
             "handler", "finalizer"}


def _position(loc, which: str):
    if not isinstance(loc, dict):
        return None
    pos = loc.get(which)
    if not isinstance(pos, dict):
        return None
    line, column = pos.get("line"), pos.get("column")
    if not isinstance(line, int) or not isinstance(column, int):
        return None
    return (line, column + 1)


def _convert(raw: dict, path: str) -> Node:
    # Iterative so deeply nested dumps do not hit the recursion limit.
    root_holder: list[Node] = []
    stack = [(raw, root_holder, None)]
    while stack:
        obj, parent, slot = stack.pop()
        if not isinstance(obj, dict) or not isinstance(obj.get("type"), str):
            raise MalformedDocument(f"expected an ESTree node, got {type(obj).__name__}")
        kind = obj["type"]
        start = _position(obj.get("loc"), "start")
        end = _position(obj.get("loc"), "end")
        if kind not in CHILDREN:
            line, col = start or (0, 0)
            raise UnsupportedConstruct(kind, path, line, col)
        if start is None and kind in _LOCATED:
            raise MissingLocations(f"{kind} node without a start location in {path}")
        fields = {}
        if kind == "Literal":
            regex = obj.get("regex")
            if isinstance(regex, dict):
                fields["regex"] = (regex.get("pattern"), regex.get("flags"))
                fields["value"] = None
            else:
                fields["regex"] = None
                fields["value"] = obj.get("value")
            fields["raw"] = obj.get("raw")
        else:
            for attr in ATTRS.get(kind, ()):
                fields[attr] = obj.get(attr)
        if kind == "ArrowFunctionExpression":
            fields["id"] = None
        node = Node(kind, start, end, **fields)
        if slot is None:
            parent.append(node)
        elif isinstance(slot, int):
            parent[slot] = node
        else:
            setattr(parent, slot, node)
        for name in CHILDREN[kind]:
            if name == "id" and kind == "ArrowFunctionExpression":
                continue
            value = obj.get(name)
            if isinstance(value, list):
                items: list = [None] * len(value)
                setattr(node, name, items)
                for i, item in enumerate(value):
                    if item is not None:
                        stack.append((item, items, i))
            elif value is None:
                if name not in _OPTIONAL:
                    raise MalformedDocument(f"{kind} node is missing field {name!r}")
                setattr(node, name, None)
            else:
                setattr(node, name, None)
                stack.append((value, node, name))
    return root_holder[0]


def load_ast_document(text: str, path: str = "<input>") -> Ast:
    """Load an ESTree JSON dump into an :class:`Ast` equivalent to parsing the
    original source. Node kinds outside the supported subset raise
    ``UnsupportedConstruct`` naming the kind."""
    try:
        raw = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(str(exc)) from None
    if isinstance(raw, dict) and raw.get("type") == "File" and isinstance(raw.get("program"), dict):
        raw = raw["program"]
    if not isinstance(raw, dict) or raw.get("type") != "Program":
        raise MalformedDocument("root must be a Program node")
    root = _convert(raw, path)
    if root.start is None:
        root.start = (1, 1)
    return Ast(root, path)


def to_estree(ast: Ast) -> dict:
    """Dump ``ast`` as an ESTree-compatible dict with 0-based columns."""

    def loc(node: Node) -> dict:
        return {"start": {"line": node.start[0], "column": node.start[1] - 1},
                "end": {"line": node.end[0], "column": node.end[1] - 1}}

    out: dict = {}
    stack = [(ast.root, out)]
    while stack:
        node, target = stack.pop()
        target["type"] = node.type
        target["loc"] = loc(node)
        if node.type == "Literal":
            if node.regex is not None:
                target["regex"] = {"pattern": node.regex[0], "flags": node.regex[1]}
                target["value"] = None
            else:
                target["value"] = node.value
            target["raw"] = node.raw
        for attr in ATTRS.get(node.type, ()):
            if node.type != "Literal":
                target[attr] = getattr(node, attr)
        for name in CHILDREN[node.type]:
            value = getattr(node, name)
            if isinstance(value, list):
                items = []
                for item in value:
                    if item is None:
                        items.append(None)
                    else:
                        d: dict = {}
                        items.append(d)
                        stack.append((item, d))
                target[name] = items
            elif value is None:
                target[name] = None
            else:
                d = {}
                target[name] = d
                stack.append((value, d))
    return out


def dump_ast_document(ast: Ast) -> str:
    return json.dumps(to_estree(ast))

