"""Shared builders for the test suite."""

from __future__ import annotations

from itertools import combinations
from pathlib import Path

from cgbench.compare import MergedEdge, MergedGraph, MergedNode, merge, set_validity
from cgbench.model import GLOBAL_SCOPE, NodeKey, canonicalize

FIXTURES = Path(__file__).parent / "fixtures"
JS = FIXTURES / "js"
ESTREE = FIXTURES / "estree"

# Filled by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def key(i: int, file: str = "prog.js") -> NodeKey:
    return NodeKey(file, i + 1, 1)


def graph_of(pairs, file: str = "prog.js"):
    """Canonical graph over integer pairs; -1 stands for the global scope."""
    return canonicalize([(GLOBAL_SCOPE if a < 0 else key(a, file), key(b, file)) for a, b in pairs])


def labels_by_name(graph):
    return {(graph.node(e.source).label, graph.node(e.target).label) for e in graph.edges}


def merged_from_regions(regions, tools):
    """Build a validated merged graph from ``{tool subset: (total, true)}``;
    edge i runs from node i to node i + 1."""
    nodes, edges = [], []
    i = 0
    for subset, (total, true) in regions.items():
        for k in range(total):
            a, b = 2 * i, 2 * i + 1
            nodes.append(MergedNode(a, f"f{a}", key(a), frozenset(subset), (f"f{a}",)))
            nodes.append(MergedNode(b, f"f{b}", key(b), frozenset(subset), (f"f{b}",)))
            edges.append(MergedEdge(a, b, frozenset(subset), k < true))
            i += 1
    return MergedGraph(tuple(sorted(tools)), tuple(nodes), tuple(edges))


FIVE_TOOLS = ("acg", "closure", "npm-cg", "tajs", "wala")


def five_tool_benchmark() -> MergedGraph:
    """A validated SunSpider-scale merge: 348 edges, 257 true, 93 found by all
    five tools."""
    everyone = frozenset(FIVE_TOOLS)
    regions = {
        everyone: (93, 93),
        frozenset({"npm-cg"}): (18, 0),
        frozenset({"acg"}): (1, 1),
        frozenset({"wala"}): (19, 0),
        frozenset({"closure"}): (50, 2),
    }
    # Spread the remaining 167 edges over the mixed regions; the first six
    # dealt are false, leaving 161 true.
    mixed = [frozenset(c) for r in (2, 3, 4) for c in combinations(FIVE_TOOLS, r)]
    counts = {s: [0, 0] for s in mixed}
    for n in range(167):
        s = mixed[n % len(mixed)]
        counts[s][0] += 1
        counts[s][1] += n >= 6
    regions.update({s: tuple(v) for s, v in counts.items()})
    return merged_from_regions(regions, FIVE_TOOLS)


def merged_by_tool(edge_sets: dict[str, set]) -> MergedGraph:
    return merge([(t, graph_of(sorted(es))) for t, es in edge_sets.items()])


def validate_all(m: MergedGraph, truth) -> MergedGraph:
    return set_validity(m, {k: truth(k) for k in m.edge_keys()})
