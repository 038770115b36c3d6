import json

import pytest

from cgbench.errors import MalformedDocument, SchemaViolation
from cgbench.model import (GLOBAL_SCOPE, TOPLEVEL_KEY, CallEdge, CallGraph, FunctionNode, NodeKey,
                           canonicalize, deserialize, format_edge_key, node_key, parse_edge_key,
                           serialize)

A = NodeKey("a.js", 1, 1)
B = NodeKey("a.js", 5, 3)


def test_node_key_ignores_label_and_id():
    sun = FunctionNode(7, "Sun", NodeKey("access-nbody.js", 74, 1))
    assert node_key(sun) == ("access-nbody.js", 74, 1)
    assert node_key(FunctionNode(0, "x", sun.position)) == node_key(FunctionNode(3, "y", sun.position))


def test_node_key_normalizes_separators_only():
    n = FunctionNode(0, "f", NodeKey("lib\\Mod.js", 2, 4))
    assert node_key(n) == ("lib/Mod.js", 2, 4)
    assert node_key(n) != ("lib/mod.js", 2, 4)


def test_toplevel_key():
    assert TOPLEVEL_KEY == ("toplevel", 1, 1)
    assert str(TOPLEVEL_KEY) == "toplevel:1:1"


def test_node_key_parse_keeps_colons_in_file():
    assert NodeKey.parse("C:/x/a.js:3:9") == ("C:/x/a.js", 3, 9)
    with pytest.raises(ValueError):
        NodeKey.parse("a.js:0:1")
    with pytest.raises(ValueError):
        NodeKey.parse("a.js:1")


def test_edge_key_text_roundtrip():
    k = (TOPLEVEL_KEY, NodeKey("access-nbody.js", 74, 1))
    assert format_edge_key(k) == "toplevel:1:1->access-nbody.js:74:1"
    assert parse_edge_key(format_edge_key(k)) == k
    with pytest.raises(ValueError):
        parse_edge_key("a.js:1:1")


def test_canonicalize_collapses_duplicates():
    g = canonicalize([(A, B)] * 3)
    assert len(g.nodes) == 2 and len(g.edges) == 1


def test_canonicalize_empty():
    g = canonicalize([])
    assert g.nodes == () and g.edges == ()


def test_canonicalize_injects_single_toplevel():
    g = canonicalize([(GLOBAL_SCOPE, A), (GLOBAL_SCOPE, B)])
    assert [n.label for n in g.nodes] == ["toplevel", "anonymous", "anonymous"]
    assert [n.id for n in g.nodes] == [0, 1, 2]
    assert g.edge_keys() == {(TOPLEVEL_KEY, A), (TOPLEVEL_KEY, B)}


def test_canonicalize_dense_first_appearance_ids_and_labels():
    g = canonicalize([(B, A), (A, A)], labels={A: "f", B: "g"})
    assert [(n.id, n.label, n.position) for n in g.nodes] == [(0, "g", B), (1, "f", A)]
    assert g.edges == (CallEdge(0, 1), CallEdge(1, 1))


def test_canonicalize_keeps_isolated_nodes():
    g = canonicalize([], nodes=[A])
    assert g.node_keys() == {A} and not g.edges


def test_canonicalize_never_labels_a_real_function_toplevel():
    g = canonicalize([(A, A)], labels={A: "toplevel"})
    assert g.nodes[0].label == "anonymous"


def test_serialize_empty_graph():
    doc = json.loads(serialize(CallGraph()))
    assert doc == {"nodes": [], "edges": []}


def test_serialize_two_node_graph():
    g = canonicalize([(A, B)], labels={A: "f", B: "g"})
    doc = json.loads(serialize(g))
    assert doc["nodes"] == [
        {"id": 0, "label": "f", "file": "a.js", "line": 1, "column": 1},
        {"id": 1, "label": "g", "file": "a.js", "line": 5, "column": 3},
    ]
    assert doc["edges"] == [{"source": 0, "target": 1}]


def test_serialize_is_deterministic_and_sorted():
    nodes = (FunctionNode(1, "g", B), FunctionNode(0, "f", A))
    g = CallGraph(nodes, (CallEdge(1, 0), CallEdge(0, 1), CallEdge(0, 0)))
    doc = json.loads(serialize(g))
    assert [n["id"] for n in doc["nodes"]] == [0, 1]
    assert [(e["source"], e["target"]) for e in doc["edges"]] == [(0, 0), (0, 1), (1, 0)]
    assert serialize(g) == serialize(deserialize(serialize(g)))


def test_roundtrip():
    g = canonicalize([(GLOBAL_SCOPE, A), (A, B), (B, B)], labels={A: "f", B: "g"})
    assert deserialize(serialize(g)).signature() == g.signature()


def _doc(nodes, edges):
    return json.dumps({"nodes": nodes, "edges": edges})


NODE0 = {"id": 0, "label": "f", "file": "a.js", "line": 1, "column": 1}
NODE1 = {"id": 1, "label": "g", "file": "a.js", "line": 2, "column": 1}


@pytest.mark.parametrize("text", ["{", "[]", "not json", '"x"'])
def test_deserialize_malformed(text):
    with pytest.raises(MalformedDocument):
        deserialize(text)


@pytest.mark.parametrize("nodes,edges", [
    ([NODE0], [{"source": 0, "target": 9}]),
    ([NODE0, dict(NODE1, line=1)], []),
    ([NODE0, NODE1], [{"source": 0, "target": 1}, {"source": 0, "target": 1}]),
    ([{k: v for k, v in NODE0.items() if k != "column"}], []),
    ([dict(NODE0, line=0)], []),
    ([dict(NODE0, line="1")], []),
    ([dict(NODE0, line=True)], []),
    ([NODE0, dict(NODE1, id=0)], []),
    ([dict(NODE0, label="toplevel")], []),
    ([dict(NODE0, file="")], []),
    ([NODE0], [{"source": 0}]),
])
def test_deserialize_schema_violations(nodes, edges):
    with pytest.raises(SchemaViolation):
        deserialize(_doc(nodes, edges))


def test_deserialize_missing_lists():
    with pytest.raises(SchemaViolation):
        deserialize('{"nodes": []}')


def test_self_loops_are_valid():
    g = deserialize(_doc([NODE0], [{"source": 0, "target": 0}]))
    assert g.edge_keys() == {(NodeKey("a.js", 1, 1), NodeKey("a.js", 1, 1))}


def test_flatten_maps_toplevel_back_to_global_scope():
    g = canonicalize([(GLOBAL_SCOPE, A), (A, B)])
    assert sorted(g.flatten(), key=str) == sorted([(GLOBAL_SCOPE, A), (A, B)], key=str)
