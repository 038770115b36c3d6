"""Function and call-site enumeration plus lexical scope reconstruction."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import NodeKey, normalize_path
from .ast import CALL_TYPES, FUNCTION_TYPES, Ast, Node, iter_children


@dataclass(eq=False)
class FunctionInfo:
    position: NodeKey
    name: str | None
    params: list[str]
    enclosing: "FunctionInfo | None"
    node: Node = field(repr=False)
    end: tuple[int, int] = (0, 0)

    def contains(self, line: int, column: int) -> bool:
        p = self.position
        return (p.line, p.column) <= (line, column) < self.end


@dataclass(eq=False)
class CallSiteInfo:
    position: NodeKey
    callee: Node = field(repr=False)
    enclosing: FunctionInfo | None
    arguments: list[Node] = field(repr=False)
    is_new: bool = False
    one_shot: bool = False
    node: Node = field(repr=False, default=None)

    @property
    def key(self) -> tuple[NodeKey, tuple[int, int]]:
        # Start position alone is ambiguous for chained calls such as f()().
        return (self.position, self.node.end)


class Scope:
    """A function or catch-clause scope. The global scope is represented by
    ``None``: global names are modelled as properties of the global object."""

    __slots__ = ("uid", "parent", "names", "function")

    def __init__(self, uid, parent: "Scope | None", names, function: FunctionInfo | None):
        self.uid = uid
        self.parent = parent
        self.names = set(names)
        self.function = function

    def lookup(self, name: str) -> "Scope | None":
        s = self
        while s is not None:
            if name in s.names:
                return s
            s = s.parent
        return None

    def __repr__(self) -> str:
        return f"Scope({self.uid})"


def hoisted_names(body: list[Node]) -> list[str]:
    """``var`` and function-declaration names of a function body, not
    descending into nested functions."""
    names: list[str] = []
    stack = list(reversed(body))
    while stack:
        node = stack.pop()
        t = node.type
        if t == "FunctionDeclaration":
            names.append(node.id.name)
            continue
        if t in FUNCTION_TYPES:
            continue
        if t == "VariableDeclarator":
            names.append(node.id.name)
        kids = list(iter_children(node))
        kids.reverse()
        stack.extend(kids)
    return names


@dataclass
class ProgramInfo:
    path: str
    functions: list[FunctionInfo]
    calls: list[CallSiteInfo]
    function_of: dict[int, FunctionInfo]
    call_of: dict[int, CallSiteInfo]
    scope_of: dict[int, Scope]


def analyze(ast: Ast, path: str | None = None) -> ProgramInfo:
    """One pass over ``ast`` collecting functions, call sites and scopes.

    ``function_of``, ``call_of`` and ``scope_of`` are keyed by ``id(node)``;
    ``scope_of`` has an entry for every function node and catch clause.
    """
    path = normalize_path(path if path is not None else ast.path)
    functions: list[FunctionInfo] = []
    calls: list[CallSiteInfo] = []
    function_of: dict[int, FunctionInfo] = {}
    call_of: dict[int, CallSiteInfo] = {}
    scope_of: dict[int, Scope] = {}

    stack: list[tuple[Node, FunctionInfo | None, Scope | None]] = [
        (n, None, None) for n in reversed(ast.root.body)]
    while stack:
        node, fn, scope = stack.pop()
        t = node.type
        if t in FUNCTION_TYPES:
            params = [p.name for p in node.params]
            name = node.id.name if node.id is not None else None
            info = FunctionInfo(NodeKey(path, *node.start), name, params, fn, node, node.end)
            functions.append(info)
            function_of[id(node)] = info
            body = node.body
            stmts = body.body if body.type == "BlockStatement" else [body]
            names = params + hoisted_names(stmts)
            if t != "FunctionDeclaration" and name is not None:
                names.append(name)
            inner = Scope((path, *node.start), scope, names, info)
            scope_of[id(node)] = inner
            stack.extend((s, info, inner) for s in reversed(stmts))
            continue
        if t == "CatchClause":
            inner = Scope((path, *node.start, "catch"), scope, [node.param.name], fn)
            scope_of[id(node)] = inner
            stack.append((node.body, fn, inner))
            continue
        if t in CALL_TYPES:
            info = CallSiteInfo(NodeKey(path, *node.start), node.callee, fn, list(node.arguments),
                                t == "NewExpression", node.callee.type in FUNCTION_TYPES, node)
            calls.append(info)
            call_of[id(node)] = info
        kids = list(iter_children(node))
        kids.reverse()
        stack.extend((k, fn, scope) for k in kids)
    return ProgramInfo(path, functions, calls, function_of, call_of, scope_of)


def enumerate_functions(ast: Ast, path: str | None = None) -> list[FunctionInfo]:
    """Every function declaration or expression in source order."""
    return analyze(ast, path).functions


def enumerate_call_sites(ast: Ast, path: str | None = None) -> list[CallSiteInfo]:
    """Every call and ``new`` expression with its lexically enclosing function."""
    return analyze(ast, path).calls
