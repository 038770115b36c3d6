"""Positioned ESTree-shaped AST used by the parser and the ESTree loader."""

from __future__ import annotations

from typing import Iterator

# Child-bearing fields per node type, in source order.
CHILDREN: dict[str, tuple[str, ...]] = {
    "Program": ("body",),
    "EmptyStatement": (),
    "DebuggerStatement": (),
    "BlockStatement": ("body",),
    "ExpressionStatement": ("expression",),
    "IfStatement": ("test", "consequent", "alternate"),
    "LabeledStatement": ("label", "body"),
    "BreakStatement": ("label",),
    "ContinueStatement": ("label",),
    "SwitchStatement": ("discriminant", "cases"),
    "SwitchCase": ("test", "consequent"),
    "ReturnStatement": ("argument",),
    "ThrowStatement": ("argument",),
    "TryStatement": ("block", "handler", "finalizer"),
    "CatchClause": ("param", "body"),
    "WhileStatement": ("test", "body"),
    "DoWhileStatement": ("body", "test"),
    "ForStatement": ("init", "test", "update", "body"),
    "ForInStatement": ("left", "right", "body"),
    "FunctionDeclaration": ("id", "params", "body"),
    "VariableDeclaration": ("declarations",),
    "VariableDeclarator": ("id", "init"),
    "ThisExpression": (),
    "ArrayExpression": ("elements",),
    "ObjectExpression": ("properties",),
    "Property": ("key", "value"),
    "FunctionExpression": ("id", "params", "body"),
    "ArrowFunctionExpression": ("id", "params", "body"),
    "SequenceExpression": ("expressions",),
    "UnaryExpression": ("argument",),
    "BinaryExpression": ("left", "right"),
    "AssignmentExpression": ("left", "right"),
    "UpdateExpression": ("argument",),
    "LogicalExpression": ("left", "right"),
    "ConditionalExpression": ("test", "consequent", "alternate"),
    "CallExpression": ("callee", "arguments"),
    "NewExpression": ("callee", "arguments"),
    "MemberExpression": ("object", "property"),
    "Identifier": (),
    "Literal": (),
}

# Scalar attributes that take part in structural equality.
ATTRS: dict[str, tuple[str, ...]] = {
    "Identifier": ("name",),
    "Literal": ("value", "regex"),
    "VariableDeclaration": ("kind",),
    "Property": ("kind",),
    "UnaryExpression": ("operator", "prefix"),
    "UpdateExpression": ("operator", "prefix"),
    "BinaryExpression": ("operator",),
    "LogicalExpression": ("operator",),
    "AssignmentExpression": ("operator",),
    "MemberExpression": ("computed",),
    "ArrowFunctionExpression": ("expression",),
}

FUNCTION_TYPES = frozenset({"FunctionDeclaration", "FunctionExpression", "ArrowFunctionExpression"})
CALL_TYPES = frozenset({"CallExpression", "NewExpression"})


class Node:
    """One AST node. ``start``/``end`` are 1-based (line, column) pairs; ``end``
    is the column just past the last character."""

    def __init__(self, type: str, start, end, **fields):
        self.type = type
        self.start = start
        self.end = end
        self.__dict__.update(fields)

    def __repr__(self) -> str:
        extra = ""
        if self.type == "Identifier":
            extra = f" {self.name}"
        elif self.type == "Literal":
            extra = f" {self.raw}"
        return f"<{self.type}{extra} @{self.start}>"


def iter_children(node: Node) -> Iterator[Node]:
    for name in CHILDREN[node.type]:
        value = getattr(node, name)
        if value is None:
            continue
        if isinstance(value, list):
            for item in value:
                if item is not None:
                    yield item
        else:
            yield value


def walk(node: Node) -> Iterator[Node]:
    """Pre-order, source-ordered traversal without recursion."""
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        kids = list(iter_children(cur))
        kids.reverse()
        stack.extend(kids)


def _attr_equal(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return type(a) is type(b) and a == b
    return a == b


def ast_equal(a: Node | None, b: Node | None) -> bool:
    """Structural equality over types, positions, children and ATTRS."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is None or y is None:
            if x is not y:
                return False
            continue
        if x.type != y.type or x.start != y.start or x.end != y.end:
            return False
        for attr in ATTRS.get(x.type, ()):
            if not _attr_equal(getattr(x, attr, None), getattr(y, attr, None)):
                return False
        for name in CHILDREN[x.type]:
            xv, yv = getattr(x, name), getattr(y, name)
            if isinstance(xv, list) or isinstance(yv, list):
                if not (isinstance(xv, list) and isinstance(yv, list)) or len(xv) != len(yv):
                    return False
                stack.extend(zip(xv, yv))
            else:
                stack.append((xv, yv))
    return True


class Ast:
    """A parsed program plus the path it was read from."""

    def __init__(self, root: Node, path: str):
        self.root = root
        self.path = path

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ast):
            return NotImplemented
        return self.path == other.path and ast_equal(self.root, other.root)

    def __repr__(self) -> str:
        return f"Ast({self.path!r}, {len(self.root.body)} statements)"
