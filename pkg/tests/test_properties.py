"""Randomized checks of the algebraic laws the modules promise."""

from itertools import combinations, permutations

from hypothesis import HealthCheck, given, settings, strategies as st

from cgbench.compare import deserialize_merged, merge, serialize_merged, set_validity, tool_subsets, venn_regions
from cgbench.extractor import ExtractionMode, extract_call_graph
from cgbench.generator import Category, GeneratorParams, generate
from cgbench.metrics import combination_stats
from cgbench.model import GLOBAL_SCOPE, NodeKey, canonicalize, deserialize, serialize

from support import graph_of, key

TOOLS = ("t1", "t2", "t3")

# Positions over a couple of files, plus the global-scope marker for callers.
positions = st.builds(NodeKey, st.sampled_from(["a.js", "b.js", "dir/c.js"]), st.integers(1, 6), st.integers(1, 3))
raw_pairs = st.lists(st.tuples(st.one_of(st.just(GLOBAL_SCOPE), positions), positions), max_size=30)


@st.composite
def three_tool_instances(draw):
    """Up to 20 distinct edges, each reported by a non-empty subset of three
    tools; returns per-tool edge-pair lists."""
    universe = draw(st.lists(st.tuples(st.integers(-1, 7), st.integers(0, 7)), unique=True, max_size=20))
    masks = draw(st.lists(st.integers(1, 7), min_size=len(universe), max_size=len(universe)))
    per_tool = {t: [p for p, m in zip(universe, masks) if m >> i & 1] for i, t in enumerate(TOOLS)}
    return per_tool


def _shape(m):
    return ({(n.position, n.tools) for n in m.nodes},
            {(m.edge_key(e), e.tools, e.valid) for e in m.edges})


@settings(max_examples=1000, deadline=None)
@given(three_tool_instances())
def test_merge_order_insensitive_and_projective(per_tool):
    graphs = {t: graph_of(pairs) for t, pairs in per_tool.items()}
    reference = merge(graphs.items())
    for order in permutations(TOOLS):
        m = merge([(t, graphs[t]) for t in order])
        assert _shape(m) == _shape(reference)
        assert m.tools == TOOLS

    # Associativity with incremental merging.
    staged = merge([merge([("t1", graphs["t1"]), ("t2", graphs["t2"])]), ("t3", graphs["t3"])])
    assert _shape(staged) == _shape(reference)

    # Per-tool projection returns each input exactly.
    for t, g in graphs.items():
        assert reference.project(t).edge_keys() == g.edge_keys()
        assert {k for k, e in reference.edges_by_key.items() if t in e.tools} == g.edge_keys()

    # Venn regions against a brute-force recount over every subset and edge.
    regions = venn_regions(reference)
    all_keys = set().union(*(g.edge_keys() for g in graphs.values()))
    for subset in tool_subsets(TOOLS):
        expected = sum(1 for k in all_keys
                       if {t for t in TOOLS if k in graphs[t].edge_keys()} == set(subset))
        assert regions[subset].total == expected
    assert sum(r.total for r in regions.values()) == len(reference.edges)


@settings(max_examples=1000, deadline=None)
@given(three_tool_instances(), st.data())
def test_combination_stats_match_brute_force(per_tool, data):
    graphs = {t: graph_of(pairs) for t, pairs in per_tool.items()}
    m = merge(graphs.items())
    keys = sorted(m.edge_keys())
    flags = data.draw(st.lists(st.booleans(), min_size=len(keys), max_size=len(keys)))
    truth = dict(zip(keys, flags))
    m = set_validity(m, truth)
    tp_star = sum(flags)
    for s in combination_stats(m):
        found = {k for t in s.combination for k in graphs[t].edge_keys()}
        assert s.all == len(found)
        assert s.tp == sum(truth[k] for k in found)
        assert s.tp_star == tp_star
        for value in (s.precision, s.recall, s.f):
            assert 0 <= value <= 1
    regions = venn_regions(m)
    if keys:
        assert sum(r.true for r in regions.values()) == tp_star
    else:
        assert all(r.true is None for r in regions.values())


@settings(max_examples=300, deadline=None)
@given(raw_pairs)
def test_canonicalize_idempotent(raw):
    once = canonicalize(raw)
    twice = canonicalize(once.flatten())
    assert twice.node_keys() == once.node_keys()
    assert twice.edge_keys() == once.edge_keys()
    assert len(once.edges) <= len(once.nodes) ** 2
    assert sorted(n.id for n in once.nodes) == list(range(len(once.nodes)))
    assert sum(n.label == "toplevel" for n in once.nodes) == (GLOBAL_SCOPE in {c for c, _ in raw})


@settings(max_examples=300, deadline=None)
@given(raw_pairs)
def test_serialize_roundtrip(raw):
    g = canonicalize(raw)
    back = deserialize(serialize(g))
    assert back.signature() == g.signature()
    assert serialize(back) == serialize(g)


@settings(max_examples=200, deadline=None)
@given(three_tool_instances(), st.data())
def test_merged_document_roundtrip(per_tool, data):
    m = merge((t, graph_of(p)) for t, p in per_tool.items())
    keys = sorted(m.edge_keys())
    chosen = data.draw(st.lists(st.sampled_from(keys), unique=True) if keys else st.just([]))
    m = set_validity(m, {k: bool(i % 2) for i, k in enumerate(chosen)})
    back = deserialize_merged(serialize_merged(m))
    assert _shape(back) == _shape(m)


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seed=st.integers(0, 2**63 - 1), n=st.integers(4, 24), density=st.floats(0.0, 1.0),
       callbacks=st.floats(0.0, 1.0), files=st.integers(1, 3))
def test_mode_monotonicity_on_complex_programs(seed, n, density, callbacks, files):
    m = int(density * (n - 1) * (n - 1))
    params = GeneratorParams(Category.COMPLEX, n, m, seed=seed, statements=(0, 4), files=files,
                             callback_fraction=callbacks)
    program = generate(params)
    sources = sorted(program.files.items())
    pess = extract_call_graph(sources, ExtractionMode.PESSIMISTIC_ONESHOT).edge_keys()
    opt = extract_call_graph(sources, ExtractionMode.OPTIMISTIC).edge_keys()
    manifest = program.manifest
    assert pess <= opt
    assert manifest.direct_edge_keys() <= pess
    assert manifest.edge_keys() <= opt


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 5), st.data())
def test_recall_monotone_under_combination_growth(k, data):
    tools = [f"t{i}" for i in range(k)]
    n_edges = data.draw(st.integers(1, 25))
    masks = data.draw(st.lists(st.integers(1, 2 ** k - 1), min_size=n_edges, max_size=n_edges))
    flags = data.draw(st.lists(st.booleans(), min_size=n_edges, max_size=n_edges))
    per_tool = {t: [(2 * e, 2 * e + 1) for e, mask in enumerate(masks) if mask >> i & 1]
                for i, t in enumerate(tools)}
    m = merge((t, graph_of(p)) for t, p in per_tool.items())
    m = set_validity(m, {(key(2 * e), key(2 * e + 1)): f for e, f in enumerate(flags)})
    stats = {s.combination: s for s in combination_stats(m)}
    for small in stats:
        for extra in tools:
            if extra in small:
                continue
            big = tuple(sorted(small + (extra,)))
            a, b = stats[small], stats[big]
            assert a.all <= b.all and a.tp <= b.tp and a.recall <= b.recall
    if any(flags):
        assert stats[tuple(tools)].recall == 1


def test_brute_force_helper_covers_all_subsets():
    assert len(tool_subsets(TOOLS)) == sum(1 for r in (1, 2, 3) for _ in combinations(TOOLS, r))
