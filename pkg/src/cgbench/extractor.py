"""Field-based call-graph extraction for the ES5 subset.

Values are tracked through a flow graph whose vertices abstract program
locations:

    ("FUN", pos)          a function literal
    ("VAR", scope, name)  a local variable of one lexical scope
    ("PROP", name)        every property called ``name`` (and every global)
    ("PARAM", pos, i)     the i-th parameter of a function
    ("RET", pos)          a function's return value
    ("ARG", call, i)      the i-th argument at a call site
    ("RES", call)         the result of a call site
    ("EXP", file)         ``module.exports`` of one input file

Function literals propagate forward along flow edges. A call site's targets
are the functions reaching its callee vertex.
"""

from __future__ import annotations

import enum
import os
import posixpath
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from .js.analysis import CallSiteInfo, FunctionInfo, ProgramInfo, Scope, analyze
from .js.ast import FUNCTION_TYPES, Ast, Node
from .js.estree import load_ast_document
from .js.parser import parse_program
from .model import GLOBAL_SCOPE, CallGraph, NodeKey, canonicalize, normalize_path

_RECURSION_LIMIT = 20000

Vertex = tuple


class ExtractionMode(enum.Enum):
    PESSIMISTIC_ONESHOT = "pessimistic"
    OPTIMISTIC = "optimistic"

    @classmethod
    def parse(cls, text: str) -> "ExtractionMode":
        text = text.lower()
        for mode in cls:
            if text in (mode.value, mode.name.lower()):
                return mode
        if text == "oneshot":
            return cls.PESSIMISTIC_ONESHOT
        raise ValueError(f"unknown extraction mode {text!r}")


@dataclass
class FlowGraph:
    vertices: set = field(default_factory=set)
    edges: set = field(default_factory=set)
    # (call site, callee vertices); a conditional callee has several.
    call_sites: list[tuple[CallSiteInfo, tuple]] = field(default_factory=list)
    # ARG->PARAM and RET->RES edges of immediately-invoked function expressions.
    one_shot_edges: list[tuple[Vertex, Vertex]] = field(default_factory=list)
    functions: dict[Vertex, FunctionInfo] = field(default_factory=dict)
    labels: dict[NodeKey, str] = field(default_factory=dict)

    def add_edge(self, a: Vertex, b: Vertex) -> None:
        self.edges.add((a, b))
        self.vertices.add(a)
        self.vertices.add(b)


def _unresolved(name: str, scope: Scope | None) -> bool:
    return scope is None or scope.lookup(name) is None


class _Builder:
    def __init__(self, fg: FlowGraph, modules: set[str]):
        self.fg = fg
        self.modules = modules

    def run(self, ast: Ast, info: ProgramInfo) -> None:
        self.info = info
        self.path = info.path
        for stmt in ast.root.body:
            self.stmt(stmt, None)

    # -- helpers -------------------------------------------------------------

    def lookup(self, name: str, scope: Scope | None) -> Vertex:
        s = scope.lookup(name) if scope is not None else None
        if s is None:
            if name == "exports":
                return ("EXP", self.path)
            return ("PROP", name)
        return ("VAR", s.uid, name)

    def flow(self, sources: list, target: Vertex | None) -> None:
        if target is None:
            return
        for v in sources:
            self.fg.add_edge(v, target)

    def hint(self, value: Node, name: str) -> None:
        # Anonymous functions take the name they are bound to as display label.
        if value.type in FUNCTION_TYPES and getattr(value, "id", None) is None:
            self.fg.labels.setdefault(NodeKey(self.path, *value.start), name)

    def resolve_module(self, spec: str) -> str | None:
        base = posixpath.dirname(self.path)
        root = posixpath.normpath(posixpath.join(base, spec)) if spec.startswith(".") else spec
        for cand in (root, root + ".js", root + "/index.js"):
            if cand in self.modules:
                return cand
        return None

    # -- statements ----------------------------------------------------------

    def stmt(self, node: Node, scope: Scope | None) -> None:
        t = node.type
        if t == "ExpressionStatement":
            self.expr(node.expression, scope)
        elif t == "VariableDeclaration":
            self.declarations(node, scope)
        elif t == "FunctionDeclaration":
            fv = self.function(node, scope)
            self.fg.add_edge(fv, self.lookup(node.id.name, scope))
        elif t == "ReturnStatement":
            if node.argument is not None:
                values = self.expr(node.argument, scope)
                fn = scope.function if scope is not None else None
                if fn is not None:
                    self.flow(values, ("RET", fn.position))
        elif t == "TryStatement":
            self.stmt(node.block, scope)
            if node.handler is not None:
                self.stmt(node.handler.body, self.info.scope_of[id(node.handler)])
            if node.finalizer is not None:
                self.stmt(node.finalizer, scope)
        elif t == "ForInStatement":
            if node.left.type == "VariableDeclaration":
                self.declarations(node.left, scope)
            else:
                self.lvalue(node.left, scope)
            self.expr(node.right, scope)
            self.stmt(node.body, scope)
        elif t in ("BlockStatement", "Program"):
            for s in node.body:
                self.stmt(s, scope)
        elif t == "IfStatement":
            self.expr(node.test, scope)
            self.stmt(node.consequent, scope)
            if node.alternate is not None:
                self.stmt(node.alternate, scope)
        elif t == "ForStatement":
            if node.init is not None:
                if node.init.type == "VariableDeclaration":
                    self.declarations(node.init, scope)
                else:
                    self.expr(node.init, scope)
            for part in (node.test, node.update):
                if part is not None:
                    self.expr(part, scope)
            self.stmt(node.body, scope)
        elif t in ("WhileStatement", "DoWhileStatement"):
            self.expr(node.test, scope)
            self.stmt(node.body, scope)
        elif t == "SwitchStatement":
            self.expr(node.discriminant, scope)
            for case in node.cases:
                if case.test is not None:
                    self.expr(case.test, scope)
                for s in case.consequent:
                    self.stmt(s, scope)
        elif t == "LabeledStatement":
            self.stmt(node.body, scope)
        elif t == "ThrowStatement":
            self.expr(node.argument, scope)
        # Empty, debugger, break and continue carry no flow.

    def declarations(self, node: Node, scope: Scope | None) -> None:
        for d in node.declarations:
            if d.init is not None:
                self.hint(d.init, d.id.name)
                self.flow(self.expr(d.init, scope), self.lookup(d.id.name, scope))

    def function(self, node: Node, scope: Scope | None) -> Vertex:
        info = self.info.function_of[id(node)]
        inner = self.info.scope_of[id(node)]
        pos = info.position
        fv = ("FUN", pos)
        fg = self.fg
        fg.functions[fv] = info
        fg.vertices.add(fv)
        if info.name is not None:
            fg.labels[pos] = info.name
            if node.type != "FunctionDeclaration":
                fg.add_edge(fv, ("VAR", inner.uid, info.name))
        for i, p in enumerate(info.params):
            fg.add_edge(("PARAM", pos, i), ("VAR", inner.uid, p))
        body = node.body
        if body.type == "BlockStatement":
            for s in body.body:
                self.stmt(s, inner)
        else:
            self.flow(self.expr(body, inner), ("RET", pos))
        return fv

    # -- expressions ---------------------------------------------------------

    def lvalue(self, node: Node, scope: Scope | None) -> Vertex | None:
        t = node.type
        if t == "Identifier":
            return self.lookup(node.name, scope)
        if t == "MemberExpression":
            values = self.expr(node, scope)
            return values[0] if values else None
        self.expr(node, scope)
        return None

    def expr(self, node: Node, scope: Scope | None) -> list:
        """Visit ``node`` and return the vertices its value may come from."""
        t = node.type
        if t == "Identifier":
            return [self.lookup(node.name, scope)]
        if t == "MemberExpression":
            obj = node.object
            if node.computed:
                self.expr(obj, scope)
                self.expr(node.property, scope)
                return []
            name = node.property.name
            if (name == "exports" and obj.type == "Identifier" and obj.name == "module"
                    and _unresolved("module", scope)):
                return [("EXP", self.path)]
            self.expr(obj, scope)
            return [("PROP", name)]
        if t in ("CallExpression", "NewExpression"):
            return self.call(node, scope)
        if t in FUNCTION_TYPES:
            return [self.function(node, scope)]
        if t == "AssignmentExpression":
            values = self.expr(node.right, scope)
            left = node.left
            target = self.lvalue(left, scope)
            if node.operator != "=":
                return []
            if left.type == "Identifier":
                self.hint(node.right, left.name)
            elif left.type == "MemberExpression" and not left.computed:
                self.hint(node.right, left.property.name)
            self.flow(values, target)
            return values
        if t == "ObjectExpression":
            for prop in node.properties:
                key = prop.key
                name = key.name if key.type == "Identifier" else _property_name(key.value)
                self.hint(prop.value, name)
                self.flow(self.expr(prop.value, scope), ("PROP", name))
            return []
        if t == "ConditionalExpression":
            self.expr(node.test, scope)
            return self.expr(node.consequent, scope) + self.expr(node.alternate, scope)
        if t == "LogicalExpression":
            return self.expr(node.left, scope) + self.expr(node.right, scope)
        if t == "SequenceExpression":
            values: list = []
            for e in node.expressions:
                values = self.expr(e, scope)
            return values
        if t == "ArrayExpression":
            for e in node.elements:
                if e is not None:
                    self.expr(e, scope)
            return []
        if t in ("UnaryExpression", "UpdateExpression"):
            self.expr(node.argument, scope)
            return []
        if t == "BinaryExpression":
            self.expr(node.left, scope)
            self.expr(node.right, scope)
            return []
        # Literals and ``this`` carry no function values.
        return []

    def call(self, node: Node, scope: Scope | None) -> list:
        info = self.info.call_of[id(node)]
        ckey = info.key
        callee = node.callee
        targets = self.expr(callee, scope)
        fg = self.fg
        for i, arg in enumerate(node.arguments):
            self.flow(self.expr(arg, scope), ("ARG", ckey, i))
        res = ("RES", ckey)
        fg.vertices.add(res)
        if info.one_shot:
            f = fg.functions[targets[0]]
            for i in range(min(len(node.arguments), len(f.params))):
                fg.one_shot_edges.append((("ARG", ckey, i), ("PARAM", f.position, i)))
            fg.one_shot_edges.append((("RET", f.position), res))
        if (callee.type == "Identifier" and callee.name == "require" and _unresolved("require", scope)
                and len(node.arguments) == 1 and node.arguments[0].type == "Literal"
                and isinstance(node.arguments[0].value, str)):
            target = self.resolve_module(node.arguments[0].value)
            if target is not None:
                fg.add_edge(("EXP", target), res)
        fg.vertices.update(targets)
        fg.call_sites.append((info, tuple(targets)))
        return [res]


def _property_name(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def build_flow_graph(asts: Iterable[Ast | tuple[Ast, str]]) -> FlowGraph:
    """Apply the intraprocedural flow rules to every program.

    All programs share one property namespace and one global scope.
    """
    items = [(a, a.path) if isinstance(a, Ast) else a for a in asts]
    modules = {normalize_path(p) for _, p in items}
    fg = FlowGraph()
    builder = _Builder(fg, modules)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, _RECURSION_LIMIT))
    try:
        for ast, path in items:
            builder.run(ast, analyze(ast, path))
    finally:
        sys.setrecursionlimit(old)
    return fg


class _Solver:
    """Difference propagation of function vertices over a growing edge set."""

    def __init__(self, fg: FlowGraph):
        self.ids: dict[Vertex, int] = {}
        self.succ: list[list[int]] = []
        self.pts: list[set[int]] = []
        self.delta: list[set[int]] = []
        self.queued: list[bool] = []
        self.work: list[int] = []
        self.edges: set[tuple[int, int]] = set()
        for v in fg.vertices:
            self.vid(v)
        for fv in fg.functions:
            i = self.vid(fv)
            self.pts[i].add(i)
            self.delta[i].add(i)
            self.push(i)
        for a, b in fg.edges:
            self.add_edge(a, b)

    def vid(self, v: Vertex) -> int:
        i = self.ids.get(v)
        if i is None:
            i = self.ids[v] = len(self.succ)
            self.succ.append([])
            self.pts.append(set())
            self.delta.append(set())
            self.queued.append(False)
        return i

    def push(self, i: int) -> None:
        if not self.queued[i]:
            self.queued[i] = True
            self.work.append(i)

    def add_edge(self, a: Vertex, b: Vertex) -> None:
        ia, ib = self.vid(a), self.vid(b)
        if (ia, ib) in self.edges:
            return
        self.edges.add((ia, ib))
        self.succ[ia].append(ib)
        new = self.pts[ia] - self.pts[ib]
        if new:
            self.pts[ib] |= new
            self.delta[ib] |= new
            self.push(ib)

    def solve(self) -> None:
        work, succ, pts, delta, queued = self.work, self.succ, self.pts, self.delta, self.queued
        while work:
            v = work.pop()
            queued[v] = False
            d = delta[v]
            delta[v] = set()
            for w in succ[v]:
                new = d - pts[w]
                if new:
                    pts[w] |= new
                    delta[w] |= new
                    if not queued[w]:
                        queued[w] = True
                        work.append(w)

    def reaching(self, v: Vertex) -> set[int]:
        i = self.ids.get(v)
        return self.pts[i] if i is not None else set()


def _solve(fg: FlowGraph, mode: ExtractionMode) -> tuple[_Solver, list[Vertex]]:
    solver = _Solver(fg)
    for a, b in fg.one_shot_edges:
        solver.add_edge(a, b)
    solver.solve()
    names = [None] * len(solver.succ)
    for v, i in solver.ids.items():
        names[i] = v
    if mode is ExtractionMode.OPTIMISTIC:
        linked: set[tuple[int, int]] = set()
        changed = True
        while changed:
            changed = False
            for site, callees in fg.call_sites:
                ckey = site.key
                nargs = len(site.arguments)
                for cv in callees:
                    for g in list(solver.reaching(cv)):
                        if (id(site), g) in linked:
                            continue
                        linked.add((id(site), g))
                        changed = True
                        f = fg.functions[names[g]]
                        for i in range(min(nargs, len(f.params))):
                            solver.add_edge(("ARG", ckey, i), ("PARAM", f.position, i))
                        solver.add_edge(("RET", f.position), ("RES", ckey))
            solver.solve()
            if len(names) < len(solver.succ):
                names.extend([None] * (len(solver.succ) - len(names)))
                for v, i in solver.ids.items():
                    names[i] = v
    return solver, names


def propagate(fg: FlowGraph, mode: ExtractionMode = ExtractionMode.PESSIMISTIC_ONESHOT) -> dict:
    """Map every callee vertex to the function vertices reaching it."""
    solver, names = _solve(fg, mode)
    out: dict = {}
    for _, callees in fg.call_sites:
        for cv in callees:
            if cv not in out:
                out[cv] = frozenset(names[i] for i in solver.reaching(cv))
    return out


Source = Union[str, os.PathLike, Ast, tuple]


def _load_sources(sources: Iterable[Source], base: str | os.PathLike | None, ast_input: bool) -> list[Ast]:
    asts = []
    for src in sources:
        if isinstance(src, Ast):
            asts.append(src)
            continue
        if isinstance(src, tuple):
            path, text = src
            key = normalize_path(str(path))
        else:
            path = Path(src)
            text = path.read_text(encoding="utf-8")
            key = normalize_path(os.path.relpath(path, base) if base is not None else str(path))
        if ast_input:
            asts.append(load_ast_document(text, key))
        else:
            asts.append(parse_program(text, key))
    return asts


def extract_call_graph(sources: Iterable[Source],
                       mode: ExtractionMode = ExtractionMode.PESSIMISTIC_ONESHOT,
                       *, base: str | os.PathLike | None = None, ast_input: bool = False) -> CallGraph:
    """Extract the call graph of a set of files.

    ``sources`` holds file paths, ``(path, text)`` pairs or parsed ASTs.
    File paths are keyed relative to ``base`` when given. With ``ast_input``
    the inputs are ESTree JSON dumps instead of JavaScript source.
    """
    asts = _load_sources(sources, base, ast_input)
    fg = build_flow_graph(asts)
    solver, names = _solve(fg, mode)
    raw = []
    for site, callees in fg.call_sites:
        caller = site.enclosing.position if site.enclosing is not None else GLOBAL_SCOPE
        targets = set()
        for cv in callees:
            targets |= solver.reaching(cv)
        for g in sorted(names[i][1] for i in targets):
            raw.append((caller, g))
    function_keys = [fv[1] for fv in fg.functions]
    return canonicalize(raw, fg.labels, nodes=function_keys)

