from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from cgbench.adapters import PRESETS, LabelPattern, parse_dot, parse_edge_list, repair_positions, to_dot
from cgbench.errors import DotSyntaxError, KeyCollision, LabelMismatch, UnknownKey
from cgbench.model import TOPLEVEL_KEY, NodeKey

from support import graph_of

SUN = NodeKey("access-nbody.js", 74, 1)


def test_toplevel_edge_from_dot():
    g = parse_dot('digraph cg {\n  n0 [label="toplevel:1:1"];\n  n1 [label="access-nbody.js:74:1"];\n  n0 -> n1;\n}')
    assert len(g.nodes) == 2
    assert g.edge_keys() == {(TOPLEVEL_KEY, SUN)}
    assert g.find(TOPLEVEL_KEY).label == "toplevel"


def test_duplicate_arrows_collapse():
    text = 'digraph { a [label="x.js:1:1"]; b [label="x.js:2:1"]; a -> b; a -> b [color=red]; a -> b }'
    assert len(parse_dot(text).edges) == 1


def test_label_mismatch_names_the_node():
    with pytest.raises(LabelMismatch) as info:
        parse_dot('digraph { bad [label="no-position-here"] }')
    assert info.value.node_id == "bad"


def test_unlabelled_node_uses_its_id():
    g = parse_dot('digraph { "x.js:3:4" -> "x.js:3:4" }')
    k = NodeKey("x.js", 3, 4)
    assert g.edge_keys() == {(k, k)}


def test_chains_comments_and_strict_header():
    text = ('strict digraph "g" { a -> b -> c; a [label="x.js:1:1"] b [label="x.js:2:1"]\n'
            'c [label="x.js:3:1"] // trailing\n /* block */ # hash\n}')
    g = parse_dot(text)
    assert len(g.edges) == 2 and len(g.nodes) == 3


def test_graph_level_attributes_and_escapes():
    text = 'digraph { graph [rankdir=LR]; node [shape=box]; a [label="dir\\\\x.js:1:2"]; a -> a }'
    g = parse_dot(text)
    assert g.node_keys() == {NodeKey("dir/x.js", 1, 2)}


@pytest.mark.parametrize("text", [
    "graph g { a -- b }",
    "digraph { a:p -> b }",
    "digraph { subgraph s { a } }",
    "digraph { a [label=<b>x</b>] }",
    "digraph {",
    "digraph { a -> }",
    "digraph { a [label=] }",
    "strict",
    "",
])
def test_dot_syntax_errors(text):
    with pytest.raises(DotSyntaxError):
        parse_dot(text)


def test_wala_preset_line_only():
    g = parse_dot('digraph { "Sun@access-nbody.js:74" -> "Sun@access-nbody.js:74"; "<main>" -> "Sun@access-nbody.js:74" }',
                  PRESETS["wala"])
    assert g.edge_keys() == {(SUN, SUN), (TOPLEVEL_KEY, SUN)}
    assert g.find(SUN).label == "Sun"


def test_tajs_preset_with_column_repair():
    pattern = replace(PRESETS["tajs"], column_offset=1)
    g = parse_dot('digraph { a [label="Sun (access-nbody.js:74:0)"]; m [label="<main>"]; m -> a }', pattern)
    assert g.edge_keys() == {(TOPLEVEL_KEY, SUN)}


def test_zero_based_column_without_offset_is_rejected():
    with pytest.raises(LabelMismatch):
        parse_dot('digraph { a [label="a.js:1:0"] }')


def test_label_pattern_offsets_and_validation():
    assert LabelPattern(line_offset=1, column_offset=1).match("a.js:1:0") == (NodeKey("a.js", 2, 1), None)
    assert LabelPattern().match("nothing") is None
    with pytest.raises(ValueError):
        LabelPattern(regex=r"(?P<file>.+)")


def test_custom_global_label():
    g = parse_dot('digraph { m [label="GLOBAL"]; f [label="a.js:1:1"]; m -> f }', LabelPattern(global_label="GLOBAL"))
    assert g.edge_keys() == {(TOPLEVEL_KEY, NodeKey("a.js", 1, 1))}


def test_edge_list():
    g = parse_edge_list("toplevel:1:1 -> a.js:2:3\n# comment\n\na.js:2:3->a.js:2:3\na.js:2:3 -> a.js:2:3\n")
    assert g.edge_keys() == {(TOPLEVEL_KEY, NodeKey("a.js", 2, 3)), (NodeKey("a.js", 2, 3), NodeKey("a.js", 2, 3))}
    with pytest.raises(ValueError):
        parse_edge_list("junk")
    with pytest.raises(LabelMismatch):
        parse_edge_list("a -> b")


def test_repair_line_only_key():
    wala = parse_dot('digraph { "<main>" -> "Sun@access-nbody.js:74" }', PRESETS["wala"])
    fixed = repair_positions(wala, [(NodeKey("access-nbody.js", 74, 1), NodeKey("access-nbody.js", 74, 10))])
    assert fixed.edge_keys() == {(TOPLEVEL_KEY, NodeKey("access-nbody.js", 74, 10))}
    assert len(fixed.edges) == len(wala.edges) and fixed.find(NodeKey("access-nbody.js", 74, 10)).label == "Sun"


def test_repair_empty_patch_is_identity():
    g = graph_of([(-1, 0), (0, 1), (1, 1)])
    assert repair_positions(g, []).signature() == g.signature()


def test_repair_collision():
    g = graph_of([(0, 1)])
    with pytest.raises(KeyCollision):
        repair_positions(g, {NodeKey("prog.js", 1, 1): NodeKey("prog.js", 2, 1)})


def test_repair_unknown_key():
    with pytest.raises(UnknownKey):
        repair_positions(graph_of([(0, 1)]), {NodeKey("nope.js", 1, 1): NodeKey("prog.js", 9, 1)})


def test_repair_swap_is_allowed():
    g = graph_of([(0, 1)])
    a, b = NodeKey("prog.js", 1, 1), NodeKey("prog.js", 2, 1)
    assert repair_positions(g, {a: b, b: a}).edge_keys() == {(b, a)}


pairs = st.lists(st.tuples(st.integers(-1, 8), st.integers(0, 8)), max_size=25)


@settings(max_examples=200, deadline=None)
@given(pairs)
def test_dot_roundtrip(raw):
    g = graph_of(raw)
    back = parse_dot(to_dot(g))
    assert back.node_keys() == g.node_keys() and back.edge_keys() == g.edge_keys()
    ids = {n.id for n in back.nodes}
    assert all(e.source in ids and e.target in ids for e in back.edges)
    assert len(set(back.edges)) == len(back.edges)


@settings(max_examples=100, deadline=None)
@given(pairs, st.integers(1, 5))
def test_injective_repair_preserves_counts(raw, shift):
    g = graph_of(raw)
    patch = {k: NodeKey(k.file, k.line + 100 * shift, k.column) for k in g.node_keys() if k != TOPLEVEL_KEY}
    fixed = repair_positions(g, patch)
    assert len(fixed.nodes) == len(g.nodes) and len(fixed.edges) == len(g.edges)
