"""Random ES5 program generator with an exact ground-truth call graph.

SIMPLE programs consist of function declarations whose bodies make direct
calls interleaved with filler statements. COMPLEX programs add parameters,
function expressions, a no-op ``log`` function and callback helpers: a helper
``hK(cbK)`` calls its parameter, and a caller that passes ``fB`` to it realizes
the edge ``hK -> fB``. Those edges need interprocedural flow to be found and
are annotated ``requires_interprocedural`` in the manifest.

Every identifier is derived from the owning function's index, so names never
collide across scopes and field-based resolution stays exact.
"""

from __future__ import annotations

import enum
import os
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .errors import InfeasibleParams, JSParseError
from .model import (TOPLEVEL_KEY, CallGraph, NodeKey, canonicalize, dump_document, load_json,
                    node_record, parse_edges, parse_nodes, format_edge_key)


class Category(enum.Enum):
    SIMPLE = "simple"
    COMPLEX = "complex"


@dataclass(frozen=True)
class GeneratorParams:
    category: Category = Category.SIMPLE
    functions: int = 10
    edges: int = 20
    seed: int = 0
    statements: tuple[int, int] = (4, 11)
    files: int = 1
    callback_fraction: float = 0.5
    helper_fraction: float = 0.05
    name: str = "generated"

    def __post_init__(self):
        if isinstance(self.category, str):
            object.__setattr__(self, "category", Category(self.category.lower()))
        if self.functions < 1 or self.edges < 0 or self.files < 1:
            raise InfeasibleParams("function-count and file-count must be positive, edge-count non-negative")
        lo, hi = self.statements
        if lo < 0 or hi < lo:
            raise InfeasibleParams(f"bad statements-per-body range {self.statements}")
        if self.files > self.functions:
            raise InfeasibleParams("more files than functions")
        limit = self.functions * (self.functions - 1)
        if self.edges > limit:
            raise InfeasibleParams(f"{self.edges} edges exceed the {limit} distinct ordered pairs "
                                   f"of {self.functions} functions")
        if self.category is Category.COMPLEX:
            if self.functions < 4:
                raise InfeasibleParams("COMPLEX programs need at least 4 functions")
            # The log function never calls anything.
            callers = self.functions - 1
            if self.edges > callers * (self.functions - 1):
                raise InfeasibleParams(f"{self.edges} edges exceed the {callers * (self.functions - 1)} "
                                       "pairs available when log makes no calls")
            if not (0 <= self.callback_fraction <= 1 and 0 <= self.helper_fraction <= 1):
                raise InfeasibleParams("fractions must lie in [0, 1]")


PRESETS: dict[str, GeneratorParams] = {
    "s_small": GeneratorParams(Category.SIMPLE, 1000, 49_286, name="s_small"),
    "s_medium": GeneratorParams(Category.SIMPLE, 2_600, 331_267, name="s_medium"),
    "s_large": GeneratorParams(Category.SIMPLE, 5_000, 1_224_251, name="s_large"),
    # COMPLEX bodies are longer relative to their call count.
    "c_medium": GeneratorParams(Category.COMPLEX, 400, 3_000, statements=(22, 36), name="c_medium"),
    "c_large": GeneratorParams(Category.COMPLEX, 1_000, 50_000, statements=(140, 190), name="c_large"),
}


def preset(name: str, **overrides) -> GeneratorParams:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return replace(base, **overrides)


@dataclass
class Manifest:
    graph: CallGraph
    interprocedural: frozenset = frozenset()

    def edge_keys(self) -> frozenset:
        return self.graph.edge_keys()

    def direct_edge_keys(self) -> frozenset:
        return self.graph.edge_keys() - self.interprocedural

    def to_document(self) -> str:
        g = self.graph
        edges = []
        for e in sorted(g.edges):
            key = (g.key_of(e.source), g.key_of(e.target))
            edges.append({"source": e.source, "target": e.target,
                          "requires_interprocedural": key in self.interprocedural})
        return dump_document([node_record(n) for n in g.nodes], edges)


def manifest_from_document(text: str) -> Manifest:
    doc = load_json(text)
    nodes = [n for n, _ in parse_nodes(doc)]
    graph_edges = []
    inter = set()
    by_id = {n.id: n.position for n in nodes}
    for e, rec in parse_edges(doc, set(by_id)):
        graph_edges.append(e)
        if rec.get("requires_interprocedural") is True:
            inter.add((by_id[e.source], by_id[e.target]))
    return Manifest(CallGraph(tuple(nodes), tuple(graph_edges)), frozenset(inter))


@dataclass
class GeneratedProgram:
    params: GeneratorParams
    files: dict[str, str]
    manifest: Manifest

    def line_count(self) -> int:
        return sum(text.count("\n") for text in self.files.values())


def _sample_pairs(rng: random.Random, callers: int, n: int, m: int) -> list[tuple[int, int]]:
    # Index idx enumerates ordered pairs (i, j), i < callers, j != i.
    pairs = []
    for idx in rng.sample(range(callers * (n - 1)), m):
        i, r = divmod(idx, n - 1)
        pairs.append((i, r if r < i else r + 1))
    return pairs


class _Emitter:
    def __init__(self, rng: random.Random, params: GeneratorParams):
        self.rng = rng
        self.params = params
        self.lines: list[str] = []

    def filler(self, i: int, k: int, pending: list[str]) -> None:
        """Emit one filler statement for function ``i``; loops may absorb a
        pending call."""
        rng = self.rng
        out = self.lines
        kind = rng.randrange(5)
        if kind == 0:
            out.append(f"  var v{i}_{k} = {rng.randrange(1000)};")
        elif kind == 1:
            a, b = rng.randrange(50), rng.randrange(50, 100)
            out.append(f"  var o{i}_{k} = {{p{a}: {rng.randrange(100)}, p{b}: {rng.randrange(100)}}};")
            out.append(f"  o{i}_{k}.p{a} = o{i}_{k}.p{b} + 1;")
        elif kind == 2:
            out.append(f"  for (var i{i}_{k} = 0; i{i}_{k} < {rng.randrange(2, 9)}; i{i}_{k}++) {{")
            out.append("    " + pending.pop() if pending else f"    i{i}_{k} += 0;")
            out.append("  }")
        elif kind == 3:
            out.append(f"  var w{i}_{k} = {rng.randrange(1, 6)};")
            out.append(f"  while (w{i}_{k} > 0) {{")
            out.append(f"    w{i}_{k}--;")
            out.append("  }")
        else:
            out.append(f"  var s{i}_{k} = \"t{rng.randrange(1000)}\" + {rng.randrange(10)};")


def generate(params: GeneratorParams) -> GeneratedProgram:
    """Generate a program and its manifest; deterministic for fixed params."""
    rng = random.Random(params.seed)
    n, m = params.functions, params.edges
    complex_ = params.category is Category.COMPLEX
    log = n - 1 if complex_ else None
    callers = n - 1 if complex_ else n
    pairs = _sample_pairs(rng, callers, n, m)

    helpers: set[int] = set()
    expressions: set[int] = set()
    arity = [0] * n
    inter: set[tuple[int, int]] = set()
    # calls[i]: call statements of function i, without indentation.
    calls: list[list[str]] = [[] for _ in range(n)]

    def name(j: int) -> str:
        return "log" if j == log else (f"h{j}" if j in helpers else f"f{j}")

    if complex_:
        pool = list(range(callers))
        helpers = set(rng.sample(pool, max(1, round(params.helper_fraction * n))))
        expressions = {j for j in pool if j not in helpers and rng.random() < 0.3}
        for j in pool:
            if j not in helpers and rng.random() < 0.4:
                arity[j] = rng.randrange(1, 4)
        arity[log] = 1
        incoming: dict[int, list[int]] = {h: [] for h in helpers}
        for a, b in pairs:
            if b in helpers:
                incoming[b].append(a)
        for a, b in pairs:
            if a in helpers and b not in helpers and incoming[a] and rng.random() < params.callback_fraction:
                inter.add((a, b))
        # Each callback edge (h, b) is realized by some direct caller of h.
        passed: dict[tuple[int, int], list[int]] = {}
        for h, b in sorted(inter):
            a = rng.choice(incoming[h])
            passed.setdefault((a, h), []).append(b)
        for a, b in pairs:
            if (a, b) in inter:
                continue
            if b == log:
                calls[a].append(f'log("m{a}_{b}");')
            elif b in helpers:
                for cb in passed.get((a, b), [None]):
                    calls[a].append(f"{name(b)}({name(cb) if cb is not None else 0});")
            else:
                args = ", ".join(str(rng.randrange(100)) for _ in range(arity[b]))
                calls[a].append(f"{name(b)}({args});")
    else:
        for a, b in pairs:
            calls[a].append(f"f{b}();")

    files = params.files
    file_names = [f"{params.name}.js"] if files == 1 else [f"{params.name}_{k}.js" for k in range(files)]
    emitters = [_Emitter(rng, params) for _ in range(files)]
    positions: dict[int, NodeKey] = {}
    lo, hi = params.statements
    for i in range(n):
        f = i % files
        em = emitters[f]
        out = em.lines
        fname = name(i)
        if i in helpers:
            plist = [f"cb{i}"]
        else:
            plist = [f"a{i}_{k}" for k in range(arity[i])]
        header = f"function ({', '.join(plist)}) {{"
        if i in expressions:
            prefix = f"var {fname} = "
            out.append(prefix + header)
            positions[i] = NodeKey(file_names[f], len(out), len(prefix) + 1)
        else:
            out.append(f"function {fname}({', '.join(plist)}) {{")
            positions[i] = NodeKey(file_names[f], len(out), 1)
        if i == log:
            out.append(f"  var v{i}_0 = a{i}_0;")
            out.append("}")
            continue
        pending = list(calls[i])
        rng.shuffle(pending)
        fillers = rng.randint(lo, hi)
        if i in helpers:
            out.append(f"  if (typeof cb{i} === \"function\") {{")
            out.append(f"    cb{i}({rng.randrange(100)});")
            out.append("  }")
        # Interleave: each step emits either a filler or the next pending call.
        k = 0
        while pending or k < fillers:
            if k < fillers and (not pending or rng.random() < fillers / (fillers + len(pending))):
                em.filler(i, k, pending)
                k += 1
            else:
                out.append("  " + pending.pop())
        out.append(f"  return {rng.randrange(100)};")
        out.append("}" + (";" if i in expressions else ""))
    emitters[0].lines.append("f0();" if 0 not in helpers else "h0(0);")

    texts = {file_names[f]: "\n".join(em.lines) + "\n" for f, em in enumerate(emitters)}
    labels = {positions[i]: name(i) for i in range(n)}
    raw = [(TOPLEVEL_KEY, positions[0])] + [(positions[a], positions[b]) for a, b in pairs]
    graph = canonicalize(raw, labels, nodes=[positions[i] for i in range(n)])
    inter_keys = frozenset((positions[a], positions[b]) for a, b in inter)
    return GeneratedProgram(params, texts, Manifest(graph, inter_keys))


def write_generated(program: GeneratedProgram, outdir: str | os.PathLike, name: str | None = None) -> Path:
    """Write ``<outdir>/<name>/src/*.js`` and ``<outdir>/<name>/ground-truth.json``."""
    root = Path(outdir) / (name or program.params.name)
    src = root / "src"
    src.mkdir(parents=True, exist_ok=True)
    for fname, text in program.files.items():
        (src / fname).write_text(text, encoding="utf-8")
    (root / "ground-truth.json").write_text(program.manifest.to_document(), encoding="utf-8")
    return root


def read_generated(root: str | os.PathLike) -> tuple[dict[str, str], Manifest]:
    root = Path(root)
    files = {p.name: p.read_text(encoding="utf-8") for p in sorted((root / "src").glob("*.js"))}
    manifest = manifest_from_document((root / "ground-truth.json").read_text(encoding="utf-8"))
    return files, manifest


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    counterexample: str | None = None


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            line = f"[{'ok' if c.ok else 'FAIL'}] {c.name}"
            if c.detail:
                line += f": {c.detail}"
            if c.counterexample:
                line += f" (first counterexample: {c.counterexample})"
            lines.append(line)
        return "\n".join(lines)


def _first(keys) -> str | None:
    return format_edge_key(min(keys)) if keys else None


def verify_generated(files: Mapping[str, str], manifest: Manifest) -> VerificationReport:
    """Check (a) every file parses, (b) pessimistic extraction equals the
    manifest's direct edges, (c) optimistic extraction covers the manifest."""
    from .extractor import ExtractionMode, extract_call_graph
    from .js.parser import parse_program

    report = VerificationReport()
    asts = []
    try:
        for fname, text in sorted(files.items()):
            asts.append(parse_program(text, fname))
    except JSParseError as exc:
        report.checks.append(Check("a: sources parse", False, str(exc)))
        report.checks.append(Check("b: pessimistic = direct edges", False, "skipped: parse failed"))
        report.checks.append(Check("c: optimistic covers manifest", False, "skipped: parse failed"))
        return report
    report.checks.append(Check("a: sources parse", True, f"{len(asts)} file(s)"))

    expected = manifest.direct_edge_keys()
    got = extract_call_graph(asts, ExtractionMode.PESSIMISTIC_ONESHOT).edge_keys()
    missing, extra = expected - got, got - expected
    if missing or extra:
        example = f"missing {_first(missing)}" if missing else f"unexpected {_first(extra)}"
        report.checks.append(Check("b: pessimistic = direct edges", False,
                                   f"{len(missing)} missing, {len(extra)} unexpected", example))
    else:
        report.checks.append(Check("b: pessimistic = direct edges", True, f"{len(got)} edges"))

    full = manifest.edge_keys()
    got = extract_call_graph(asts, ExtractionMode.OPTIMISTIC).edge_keys()
    missing = full - got
    if missing:
        report.checks.append(Check("c: optimistic covers manifest", False, f"{len(missing)} missing",
                                   f"missing {_first(missing)}"))
    else:
        report.checks.append(Check("c: optimistic covers manifest", True,
                                   f"{len(full)} manifest edges, {len(got)} found"))
    return report

