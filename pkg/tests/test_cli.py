import io
import json
import shutil

import pytest

from cgbench import cli
from cgbench.adapters import to_dot
from cgbench.compare import deserialize_merged, merge, serialize_merged
from cgbench.extractor import ExtractionMode, extract_call_graph
from cgbench.model import deserialize, serialize

from support import JS, five_tool_benchmark, graph_of


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("nbody_iife.js", "callback_param.js"):
        shutil.copy(JS / name, tmp_path / name)
    return tmp_path


def test_extract_two_files_as_one_program(work, capsys):
    (work / "a.js").write_text("function helper(){}\n")
    (work / "b.js").write_text("helper();\n")
    assert run("extract", "--mode", "pessimistic", "-o", "g.json", "a.js", "b.js") == 0
    g = deserialize((work / "g.json").read_text())
    assert {str(b) for _, b in g.edge_keys()} == {"a.js:1:1"}
    assert capsys.readouterr().out == ""


def test_extract_matches_library_output(work, capsys):
    assert run("extract", "--mode", "optimistic", "callback_param.js") == 0
    expected = serialize(extract_call_graph(["callback_param.js"], ExtractionMode.OPTIMISTIC))
    assert capsys.readouterr().out == expected


def test_extract_dot(work, capsys):
    assert run("extract", "--format", "dot", "nbody_iife.js") == 0
    out = capsys.readouterr().out
    assert out == to_dot(extract_call_graph(["nbody_iife.js"]))
    assert out.startswith("digraph")


def test_extract_parse_error_exit_1(work, capsys):
    (work / "bad.js").write_text("var = ;")
    assert run("extract", "bad.js") == 1
    assert "PARSE_ERROR: bad.js:1:5" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert run("frobnicate") == 2
    assert run("extract", "--bogus", "x.js") == 2
    assert run() == 2
    assert run("merge", "--tool", "noequals") == 2
    assert run("merge") == 2


def test_convert_dot_and_patch(work, capsys):
    (work / "w.dot").write_text('digraph { "<main>" -> "Sun@access-nbody.js:74"; }')
    (work / "patch.json").write_text(json.dumps([["access-nbody.js:74:1", "access-nbody.js:74:10"]]))
    assert run("convert", "w.dot", "--preset", "wala", "--patch", "patch.json", "-o", "w.json") == 0
    g = deserialize((work / "w.json").read_text())
    assert {(str(a), str(b)) for a, b in g.edge_keys()} == {("toplevel:1:1", "access-nbody.js:74:10")}


def test_convert_custom_pattern_and_offsets(work, capsys):
    (work / "t.dot").write_text('digraph { a [label="f at x.js line 0 col 0"]; a -> a }')
    assert run("convert", "t.dot", "--node-pattern", r"(?P<label>\w+) at (?P<file>\S+) line (?P<line>\d+) col (?P<column>\d+)",
               "--line-offset", 1, "--column-offset", 1) == 0
    g = deserialize(capsys.readouterr().out)
    assert [(n.label, str(n.position)) for n in g.nodes] == [("f", "x.js:1:1")]


def test_convert_edges_and_label_mismatch(work, capsys):
    (work / "e.txt").write_text("MAIN -> a.js:1:1\n")
    assert run("convert", "e.txt", "--from", "edges", "--global-label", "MAIN") == 0
    assert '"toplevel"' in capsys.readouterr().out
    (work / "bad.dot").write_text('digraph { a [label="nowhere"] }')
    assert run("convert", "bad.dot") == 1
    assert "LABEL_MISMATCH" in capsys.readouterr().err


def _write_tools(work):
    (work / "a.json").write_text(serialize(graph_of([(-1, 0), (0, 1), (1, 2)])))
    (work / "b.json").write_text(serialize(graph_of([(0, 1), (2, 3)])))


def test_merge_and_diff(work, capsys):
    _write_tools(work)
    assert run("merge", "--tool", "ACG=a.json", "--tool", "wala=b.json", "-o", "m.json") == 0
    m = deserialize_merged((work / "m.json").read_text())
    assert m.tools == ("acg", "wala")
    doc = json.loads((work / "m.json").read_text())
    assert all(e["tools"] for e in doc["edges"]) and all("valid" not in e for e in doc["edges"])

    assert run("diff", "a.json", "b.json", "--edges") == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:4] == ["union 4", "common 1 (25.0%)", "only-a 2 (50.0%)", "only-b 1 (25.0%)"]
    assert "= prog.js:1:1->prog.js:2:1" in out


def test_merge_duplicate_tool(work, capsys):
    _write_tools(work)
    assert run("merge", "--tool", "x=a.json", "--tool", "X=b.json") == 1
    assert "DUPLICATE_TOOL_ID" in capsys.readouterr().err


def test_stats_unvalidated(work, capsys):
    _write_tools(work)
    run("merge", "--tool", "acg=a.json", "--tool", "wala=b.json", "-o", "m.json")
    capsys.readouterr()
    assert run("stats", "m.json") == 1
    err = capsys.readouterr().err
    assert "UNVALIDATED_EDGES" in err and "toplevel:1:1->prog.js:1:1" in err


def test_stats_venn_on_validated_merge(work, capsys):
    (work / "m.json").write_text(serialize_merged(five_tool_benchmark()))
    assert run("stats", "m.json", "--csv") == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "combination,TP,All,TPstar,precision_pct,recall_pct,f_pct"
    assert len(rows) == 32
    assert run("venn", "m.json") == 0
    venn = capsys.readouterr().out.splitlines()
    assert "acg+closure+npm-cg+tajs+wala\t93 93/93" in venn
    assert "tajs\t0 0/0" in venn


def test_sample_then_validate_listed_keys(work, capsys, monkeypatch):
    (work / "m.json").write_text(serialize_merged(merge([("acg", graph_of([(i, i + 1) for i in range(12)]))])))
    monkeypatch.setenv("CGBENCH_SEED", "7")
    assert run("sample", "m.json", "--region", "acg", "--n", 4, "-o", "keys.txt") == 0
    assert "seed 7" in capsys.readouterr().err
    again = work / "again.txt"
    assert run("sample", "m.json", "--region", "ACG", "--n", 4, "--seed", 7, "-o", again) == 0
    assert again.read_text() == (work / "keys.txt").read_text()
    assert len((work / "keys.txt").read_text().splitlines()) == 4

    monkeypatch.setattr("sys.stdin", io.StringIO("t\nt\nf\nt\n"))
    assert run("validate", "m.json", "--keys", "keys.txt", "--root", work) == 0
    m = deserialize_merged((work / "m.json").read_text())
    assert sum(e.valid is not None for e in m.edges) == 4
    assert sum(e.valid is True for e in m.edges) == 3


def test_sample_default_size_and_too_large(work, capsys):
    (work / "m.json").write_text(serialize_merged(merge([("acg", graph_of([(i, i + 1) for i in range(20)]))])))
    assert run("sample", "m.json", "--region", "acg") == 0
    assert len(capsys.readouterr().out.splitlines()) == 19
    assert run("sample", "m.json", "--region", "acg", "--n", 21) == 1
    assert "SAMPLE_TOO_LARGE" in capsys.readouterr().err


def test_sample_region_syntax(work, capsys):
    both = [(i, i + 1) for i in range(3)]
    merged = merge([("acg", graph_of(both + [(5, 6)])), ("closure", graph_of(both))])
    (work / "m.json").write_text(serialize_merged(merged))
    assert run("sample", "m.json", "--region", "acg+closure", "--n", 3) == 0
    plus = capsys.readouterr().out
    assert run("sample", "m.json", "--region", "closure,acg", "--n", 3) == 0
    assert capsys.readouterr().out == plus and len(plus.splitlines()) == 3
    assert run("sample", "m.json", "--region", "acg+wala") == 1
    assert "unknown tool(s) wala" in capsys.readouterr().err


def test_generate_and_verify(work, capsys):
    assert run("generate", "--category", "complex", "--functions", 20, "--edges", 80, "--files", 2,
               "--statements", "1,3", "--seed", 3, "--name", "demo", "-o", "out") == 0
    assert "wrote out/demo" in capsys.readouterr().err
    assert sorted(p.name for p in (work / "out" / "demo" / "src").iterdir()) == ["demo_0.js", "demo_1.js"]
    assert run("verify", "out/demo") == 0
    assert capsys.readouterr().out.count("[ok]") == 3
    manifest = work / "out" / "demo" / "ground-truth.json"
    doc = json.loads(manifest.read_text())
    doc["edges"].append({"source": 0, "target": 0, "requires_interprocedural": False})
    manifest.write_text(json.dumps(doc))
    assert run("verify", "out/demo") == 1


def test_generate_infeasible(work, capsys):
    assert run("generate", "--functions", 2, "--edges", 3, "-o", "out") == 1
    assert "INFEASIBLE_PARAMS" in capsys.readouterr().err


def test_bench_command(work, capsys):
    assert run("bench", "nbody_iife.js", "--runs", 2, "--interval-ms", 10, "--csv", "b.csv") == 0
    lines = (work / "b.csv").read_text().splitlines()
    assert lines[0] == "target,input,run,wall_seconds,peak_rss_mb,status" and len(lines) == 3
    assert len(list((work / "b-samples").iterdir())) == 2
    assert run("bench", "x.js", "--runs", 1, "--command", "/nonexistent/tool {input}") == 1
    assert "TARGET_FAILED" in capsys.readouterr().err


# -- validation stepper -----------------------------------------------------------

@pytest.fixture
def three_edges(work):
    m = merge([("acg", graph_of([(0, 1), (1, 2), (2, 3)], file="callback_param.js"))])
    path = work / "m.json"
    path.write_text(serialize_merged(m))
    return path


def test_scripted_session(three_edges, work):
    out = io.StringIO()
    cli.validate_edges(three_edges, work, answers=io.StringIO("t\nf\nq\n"), out=out)
    m = deserialize_merged(three_edges.read_text())
    flags = [m.edges_by_key[k].valid for k in sorted(m.edge_keys())]
    assert flags == [True, False, None]
    text = out.getvalue()
    assert "[1/3] callback_param.js:1:1->callback_param.js:2:1  tools: acg" in text
    assert ">    1 | function fast3bitlookup(b) {" in text
    assert "recorded 2 label(s)" in text


def test_resume_skips_labelled_edges(three_edges, work):
    cli.validate_edges(three_edges, work, answers=io.StringIO("t\nf\nq\n"), out=io.StringIO())
    out = io.StringIO()
    cli.validate_edges(three_edges, work, answers=io.StringIO("maybe\nt\n"), out=out)
    assert "[1/1]" in out.getvalue()
    m = deserialize_merged(three_edges.read_text())
    assert m.is_validated()


class _InterruptAfter(io.StringIO):
    def readline(self, *args):
        line = super().readline(*args)
        if not line:
            raise KeyboardInterrupt
        return line


def test_interrupt_keeps_recorded_answers(three_edges, work):
    cli.validate_edges(three_edges, work, answers=_InterruptAfter("f\n"), out=io.StringIO())
    m = deserialize_merged(three_edges.read_text())
    assert [m.edges_by_key[k].valid for k in sorted(m.edge_keys())] == [False, None, None]


def test_nothing_to_validate_leaves_document_unchanged(three_edges, work):
    cli.validate_edges(three_edges, work, answers=io.StringIO("t\nt\nt\n"), out=io.StringIO())
    before = three_edges.read_bytes()
    out = io.StringIO()
    cli.validate_edges(three_edges, work, answers=io.StringIO(""), out=out)
    assert "nothing to validate" in out.getvalue()
    assert three_edges.read_bytes() == before


def test_revisit_and_skip(three_edges, work):
    cli.validate_edges(three_edges, work, answers=io.StringIO("t\nt\nt\n"), out=io.StringIO())
    out = io.StringIO()
    cli.validate_edges(three_edges, work, answers=io.StringIO("s\nf\n"), out=out, revisit=True)
    assert "(currently true)" in out.getvalue()
    m = deserialize_merged(three_edges.read_text())
    assert [m.edges_by_key[k].valid for k in sorted(m.edge_keys())] == [True, False, True]


def test_end_of_input_quits_and_keeps_answers(three_edges, work):
    cli.validate_edges(three_edges, work, answers=io.StringIO("f\n"), out=io.StringIO())
    m = deserialize_merged(three_edges.read_text())
    assert sorted(str(e.valid) for e in m.edges) == ["False", "None", "None"]


def test_missing_source_shows_positions_only(work):
    path = work / "m.json"
    path.write_text(serialize_merged(merge([("acg", graph_of([(-1, 0)], file="gone.js"))])))
    out = io.StringIO()
    cli.validate_edges(path, work, answers=io.StringIO("t\n"), out=out)
    text = out.getvalue()
    assert "callee gone.js:1:1" in text and "MISSING_SOURCE" in text
    assert "(global scope)" in text
    assert deserialize_merged(path.read_text()).is_validated()


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "doc.json"
    cli.atomic_write(target, "one")
    cli.atomic_write(target, "two")
    assert target.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["doc.json"]
