"""Command-line entry point: ``cgbench <subcommand> ...``.

Exit status is 0 on success, 1 on domain errors and 2 on usage errors.
Documents go to standard output or the ``-o`` file; diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence, TextIO

from . import adapters, bench, compare, generator, metrics
from .errors import CgbenchError, MissingSource
from .extractor import ExtractionMode, extract_call_graph
from .model import TOPLEVEL_KEY, EdgeKey, NodeKey, deserialize, format_edge_key, parse_edge_key, serialize


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Replace ``path`` with ``text`` so readers never see a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, output: str | None) -> None:
    if output:
        atomic_write(output, text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load_merged(path: str) -> compare.MergedGraph:
    return compare.deserialize_merged(_read(path))


def _env_seed(default: int = 0) -> int:
    value = os.environ.get("CGBENCH_SEED")
    return int(value) if value not in (None, "") else default


# -- subcommands ---------------------------------------------------------------

def cmd_extract(args) -> int:
    graph = extract_call_graph(args.files, ExtractionMode.parse(args.mode), base=args.base, ast_input=args.ast)
    _emit(adapters.to_dot(graph) if args.format == "dot" else serialize(graph), args.output)
    return 0


def cmd_convert(args) -> int:
    text = _read(args.input)
    if args.input_format == "edges":
        graph = adapters.parse_edge_list(text, args.global_label or "toplevel")
    else:
        base = adapters.PRESETS[args.preset]
        pattern = adapters.LabelPattern(
            regex=args.node_pattern or base.regex,
            line_offset=args.line_offset,
            column_offset=args.column_offset,
            global_label=args.global_label or base.global_label,
        )
        graph = adapters.parse_dot(text, pattern)
    if args.patch:
        pairs = json.loads(_read(args.patch))
        patch = [(NodeKey.parse(old), NodeKey.parse(new)) for old, new in pairs]
        graph = adapters.repair_positions(graph, patch)
    _emit(serialize(graph), args.output)
    return 0


def _tool_arg(text: str) -> tuple[str, str]:
    tool, sep, path = text.partition("=")
    if not sep or not tool or not path:
        raise argparse.ArgumentTypeError(f"expected ID=PATH, got {text!r}")
    return tool, path


def cmd_merge(args) -> int:
    inputs: list = [(tool, deserialize(_read(path))) for tool, path in args.tool or []]
    inputs += [_load_merged(path) for path in args.merged or []]
    if not inputs:
        raise argparse.ArgumentTypeError("merge needs at least one --tool or --merged input")
    _emit(compare.serialize_merged(compare.merge(inputs)), args.output)
    return 0


def _graph_for_diff(path: str):
    doc_text = _read(path)
    try:
        return compare.deserialize_merged(doc_text) if '"tools"' in doc_text else deserialize(doc_text)
    except CgbenchError:
        return deserialize(doc_text)


def cmd_diff(args) -> int:
    d = compare.diff(_graph_for_diff(args.a), _graph_for_diff(args.b))
    summary = metrics.overlap_summary(d)
    common, only_a, only_b = summary.shares()
    out = [f"union {summary.union}",
           f"common {summary.common} ({common}%)",
           f"only-a {summary.only_a} ({only_a}%)",
           f"only-b {summary.only_b} ({only_b}%)"]
    if args.edges:
        for tag, keys in (("=", d.common), ("<", d.only_a), (">", d.only_b)):
            out += [f"{tag} {format_edge_key(k)}" for k in sorted(keys)]
    _emit("\n".join(out) + "\n", args.output)
    return 0


def cmd_stats(args) -> int:
    stats = metrics.combination_stats(_load_merged(args.merged))
    _emit(metrics.stats_csv(stats) if args.csv else metrics.stats_text(stats), args.output)
    return 0


def cmd_venn(args) -> int:
    regions = compare.venn_regions(_load_merged(args.merged))
    lines = []
    for subset, region in regions.items():
        true = "" if region.true is None else f" {region.true}/{region.total}"
        lines.append(f"{'+'.join(subset)}\t{region.total}{true}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_sample(args) -> int:
    m = _load_merged(args.merged)
    # Accept "a,b" as well as the "a+b" form that venn prints.
    region = [t.strip().lower() for t in args.region.replace("+", ",").split(",") if t.strip()]
    unknown = sorted(set(region) - set(m.tools))
    if not region or unknown:
        raise ValueError(f"region names unknown tool(s) {', '.join(unknown) or '(none given)'}; "
                         f"tools in this merge: {', '.join(m.tools)}")
    population = len(metrics.region_edges(m, region))
    n = args.n if args.n is not None else (metrics.sample_size(population) if population else 0)
    seed = args.seed if args.seed is not None else _env_seed()
    keys = metrics.sample_edges(m, region, n, seed)
    print(f"sampled {len(keys)} of {population} edges from region {'+'.join(sorted(region))} "
          f"(seed {seed})", file=sys.stderr)
    _emit("".join(format_edge_key(k) + "\n" for k in keys), args.output)
    return 0


def _statements(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(",")
    try:
        return int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from None


def cmd_generate(args) -> int:
    overrides = {}
    for name in ("functions", "edges", "files", "statements", "callback_fraction", "helper_fraction"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.category:
        overrides["category"] = generator.Category(args.category)
    if args.name:
        overrides["name"] = args.name
    overrides["seed"] = args.seed if args.seed is not None else _env_seed()
    if args.preset:
        params = generator.preset(args.preset, **overrides)
    else:
        params = generator.GeneratorParams(**overrides)
    program = generator.generate(params)
    root = generator.write_generated(program, args.output)
    g = program.manifest.graph
    print(f"wrote {root}: {program.line_count()} lines, {len(g.nodes)} nodes, {len(g.edges)} edges",
          file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    files, manifest = generator.read_generated(args.dir)
    report = generator.verify_generated(files, manifest)
    print(report)
    return 0 if report.ok else 1


def cmd_bench(args) -> int:
    if args.command:
        target = bench.CommandTarget(args.command.split(), name=args.target_name)
    else:
        target = bench.ExtractorTarget(args.mode, name=args.target_name)
    reports = bench.run_benchmark(target, args.inputs, runs=args.runs, interval_ms=args.interval_ms)
    if args.csv:
        bench.write_reports(reports, args.csv, args.samples_dir)
    print(bench.summary_text(reports), file=sys.stderr)
    bench.raise_for_failures(reports)
    return 0


# -- validation stepper --------------------------------------------------------

def _excerpt(key: NodeKey, root: Path, context: int = 2) -> list[str]:
    if key == TOPLEVEL_KEY:
        return ["    (global scope)"]
    path = root / key.file
    if not path.is_file():
        raise MissingSource(f"{key.file} not found under {root}")
    lines = path.read_text(encoding="utf-8", errors="replace").splitlines()
    lo, hi = max(1, key.line - context), min(len(lines), key.line + context)
    out = []
    for n in range(lo, hi + 1):
        mark = ">" if n == key.line else " "
        out.append(f"  {mark}{n:5d} | {lines[n - 1]}")
        if n == key.line:
            out.append("         | " + " " * (key.column - 1) + "^")
    return out


_ANSWERS = {"t": True, "true": True, "y": True, "f": False, "false": False, "n": False,
            "s": "skip", "skip": "skip", "q": "quit", "quit": "quit"}


def validate_edges(path: str | os.PathLike, root: str | os.PathLike, answers: TextIO | None = None,
                   out: TextIO | None = None, revisit: bool = False,
                   keys: Sequence[EdgeKey] | None = None) -> compare.MergedGraph:
    """Step through unlabeled edges, asking true/false/skip/quit for each.

    The document is rewritten atomically when the session ends; skipped and
    unseen edges stay unlabeled, so the session can be resumed.
    """
    answers = answers or sys.stdin
    out = out or sys.stdout
    root = Path(root)
    m = compare.deserialize_merged(Path(path).read_text(encoding="utf-8"))
    wanted = set(keys) if keys is not None else None
    todo = [(k, e) for k, e in sorted(m.edges_by_key.items())
            if (revisit or e.valid is None) and (wanted is None or k in wanted)]
    if not todo:
        print("nothing to validate", file=out)
        return m
    labels: dict[EdgeKey, bool] = {}
    for i, (key, edge) in enumerate(todo, 1):
        print(f"\n[{i}/{len(todo)}] {format_edge_key(key)}  tools: {','.join(sorted(edge.tools))}"
              + ("" if edge.valid is None else f"  (currently {str(edge.valid).lower()})"), file=out)
        for role, node in (("caller", key[0]), ("callee", key[1])):
            print(f"  {role} {node}", file=out)
            try:
                for line in _excerpt(node, root):
                    print(line, file=out)
            except MissingSource as exc:
                print(f"  {exc}", file=out)
        answer = None
        while answer is None:
            out.write("valid? [t]rue/[f]alse/[s]kip/[q]uit: ")
            out.flush()
            try:
                line = answers.readline()
            except KeyboardInterrupt:
                # Ctrl-C ends the session like quit; answers so far are kept.
                line = ""
            if not line:
                answer = "quit"
                break
            answer = _ANSWERS.get(line.strip().lower())
        if answer == "quit":
            break
        if answer != "skip":
            labels[key] = answer
    if labels:
        m = compare.set_validity(m, labels)
        atomic_write(path, compare.serialize_merged(m))
    print(f"\nrecorded {len(labels)} label(s)", file=out)
    return m


def cmd_validate(args) -> int:
    keys = None
    if args.keys:
        keys = [parse_edge_key(line) for line in _read(args.keys).splitlines() if line.strip()]
    validate_edges(args.merged, args.root, revisit=args.revisit, keys=keys)
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgbench", description="Call-graph extraction and comparison toolkit.")
    sub = parser.add_subparsers(dest="command_name", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("extract", help="extract a call graph from JavaScript files")
    p.add_argument("files", nargs="+")
    p.add_argument("--mode", default="pessimistic", choices=["pessimistic", "optimistic"])
    p.add_argument("--format", default="json", choices=["json", "dot"])
    p.add_argument("--base", help="directory that node file names are made relative to")
    p.add_argument("--ast", action="store_true", help="inputs are ESTree JSON dumps")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("convert", help="convert a DOT dump or edge list into a unified document")
    p.add_argument("input")
    p.add_argument("--from", dest="input_format", default="dot", choices=["dot", "edges"])
    p.add_argument("--preset", default="unified", choices=sorted(adapters.PRESETS))
    p.add_argument("--node-pattern", help="regex with named groups file, line and optionally column, label")
    p.add_argument("--line-offset", type=int, default=0)
    p.add_argument("--column-offset", type=int, default=0)
    p.add_argument("--global-label")
    p.add_argument("--patch", help="JSON list of [old, new] file:line:col pairs to re-key")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("merge", help="merge per-tool graphs into a tool-attributed document")
    p.add_argument("--tool", action="append", type=_tool_arg, metavar="ID=PATH")
    p.add_argument("--merged", action="append", metavar="PATH", help="an existing merged document")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("diff", help="compare the edge sets of two documents")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--edges", action="store_true", help="also list the edges of each part")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("stats", help="precision/recall table for every tool combination")
    p.add_argument("merged")
    p.add_argument("--csv", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("venn", help="edge counts per exact tool subset")
    p.add_argument("merged")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_venn)

    p = sub.add_parser("sample", help="draw a random edge sample from one Venn region")
    p.add_argument("merged")
    p.add_argument("--region", required=True, help="tool ids joined by ',' or '+'")
    p.add_argument("--n", type=int, help="sample size (default: Cochran size for the region)")
    p.add_argument("--seed", type=int, help="default: $CGBENCH_SEED or 0")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("generate", help="generate a random program with a ground-truth manifest")
    p.add_argument("--preset", choices=sorted(generator.PRESETS))
    p.add_argument("--category", choices=["simple", "complex"])
    p.add_argument("--functions", type=int)
    p.add_argument("--edges", type=int)
    p.add_argument("--files", type=int)
    p.add_argument("--statements", type=_statements, metavar="LO,HI")
    p.add_argument("--callback-fraction", type=float)
    p.add_argument("--helper-fraction", type=float)
    p.add_argument("--seed", type=int, help="default: $CGBENCH_SEED or 0")
    p.add_argument("--name")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check a generated program against its manifest")
    p.add_argument("dir")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="measure wall time and memory of an extraction target")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--interval-ms", type=int, default=50)
    p.add_argument("--mode", default="pessimistic", choices=["pessimistic", "optimistic"])
    p.add_argument("--command", help="external command to run instead of the built-in extractor; "
                                     "{input} is replaced by the input path")
    p.add_argument("--target-name")
    p.add_argument("--csv")
    p.add_argument("--samples-dir")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="interactively mark merged edges true or false")
    p.add_argument("merged")
    p.add_argument("--root", default=".", help="directory the node file names are relative to")
    p.add_argument("--revisit", action="store_true", help="also step through labeled edges")
    p.add_argument("--keys", help="file listing the edge keys to visit (e.g. from `sample`)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"cgbench: error: {exc}", file=sys.stderr)
        return 2
    except CgbenchError as exc:
        print(f"cgbench: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"cgbench: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
