"""Wall-time and memory benchmarking of call-graph extraction targets.

Each run executes the target in its own process while a sibling thread
samples the resident set size of the target's process tree at a fixed
interval. The target is never instrumented.
"""

from __future__ import annotations

import csv
import multiprocessing
import os
import re
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Sequence

import psutil

from .errors import TargetFailed

MIN_INTERVAL_MS = 10
_MB = 1024 * 1024


@dataclass
class BenchRun:
    run: int
    wall_seconds: float
    peak_rss_mb: float
    samples: list[tuple[float, float]] = field(default_factory=list)
    status: int = 0

    @property
    def ok(self) -> bool:
        return self.status == 0


@dataclass
class BenchReport:
    target: str
    input: str
    runs: list[BenchRun] = field(default_factory=list)

    @property
    def successful(self) -> list[BenchRun]:
        return [r for r in self.runs if r.ok]

    @property
    def failed(self) -> list[BenchRun]:
        return [r for r in self.runs if not r.ok]

    @property
    def mean_wall(self) -> float | None:
        ok = self.successful
        return fmean(r.wall_seconds for r in ok) if ok else None

    @property
    def mean_peak(self) -> float | None:
        ok = self.successful
        return fmean(r.peak_rss_mb for r in ok) if ok else None


def _tree_rss(proc: psutil.Process) -> int:
    total = proc.memory_info().rss
    for child in proc.children(recursive=True):
        try:
            total += child.memory_info().rss
        except (psutil.NoSuchProcess, psutil.AccessDenied):
            pass
    return total


class _Sampler(threading.Thread):
    """Polls one process tree until stopped or the process disappears. The
    thread owns ``samples``; read it only after ``join``."""

    def __init__(self, pid: int, interval_ms: int, t0: float):
        super().__init__(daemon=True)
        self.pid = pid
        self.interval = interval_ms / 1000
        self.t0 = t0
        self.samples: list[tuple[float, float]] = []
        self.stop_event = threading.Event()

    def run(self) -> None:
        try:
            proc = psutil.Process(self.pid)
        except psutil.NoSuchProcess:
            return
        while True:
            try:
                rss = _tree_rss(proc)
            except (psutil.NoSuchProcess, psutil.AccessDenied, psutil.ZombieProcess):
                return
            if rss == 0:
                # An exited but unreaped child reads as zero; it is gone.
                return
            self.samples.append(((time.perf_counter() - self.t0) * 1000, rss / _MB))
            if self.stop_event.wait(self.interval):
                return


class CommandTarget:
    """An external command; ``{input}`` in the argument list is replaced by
    the input path (appended when absent)."""

    def __init__(self, argv: Sequence[str], name: str | None = None):
        self.argv = list(argv)
        self.name = name or Path(self.argv[0]).name

    def command(self, input_path: str) -> list[str]:
        if any("{input}" in a for a in self.argv):
            return [a.replace("{input}", input_path) for a in self.argv]
        return self.argv + [input_path] if input_path else list(self.argv)

    def execute(self, input_path: str, interval_ms: int) -> BenchRun:
        t0 = time.perf_counter()
        try:
            proc = subprocess.Popen(self.command(input_path), stdout=subprocess.DEVNULL,
                                    stderr=subprocess.DEVNULL)
        except (FileNotFoundError, PermissionError) as exc:
            status = 127 if isinstance(exc, FileNotFoundError) else 126
            return BenchRun(0, time.perf_counter() - t0, 0.0, [], status)
        sampler = _Sampler(proc.pid, interval_ms, t0)
        sampler.start()
        status = proc.wait()
        wall = time.perf_counter() - t0
        sampler.stop_event.set()
        sampler.join()
        return _finish(wall, sampler.samples, status)


def _js_files(input_path: str) -> list[str]:
    p = Path(input_path)
    if p.is_dir():
        root = p / "src" if (p / "src").is_dir() else p
        return [str(f) for f in sorted(root.rglob("*.js"))]
    return [str(p)]


def _extract_child(input_path: str, mode_value: str, out_path: str) -> None:
    from .extractor import ExtractionMode, extract_call_graph
    from .model import serialize

    files = _js_files(input_path)
    base = os.path.dirname(files[0]) if files else None
    graph = extract_call_graph(files, ExtractionMode(mode_value), base=base)
    Path(out_path).write_text(serialize(graph), encoding="utf-8")


class ExtractorTarget:
    """The reference extractor, run in a child process so its memory is
    measured in isolation. Reading inputs and writing the output document
    are part of every run."""

    def __init__(self, mode: str = "pessimistic", name: str | None = None):
        self.mode = mode
        self.name = name or f"cgbench-{mode}"

    def execute(self, input_path: str, interval_ms: int) -> BenchRun:
        ctx = multiprocessing.get_context("fork")
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "graph.json")
            t0 = time.perf_counter()
            proc = ctx.Process(target=_extract_child, args=(input_path, self.mode, out))
            proc.start()
            sampler = _Sampler(proc.pid, interval_ms, t0)
            sampler.start()
            proc.join()
            wall = time.perf_counter() - t0
            sampler.stop_event.set()
            sampler.join()
        return _finish(wall, sampler.samples, proc.exitcode or 0)


def _finish(wall: float, samples: list, status: int) -> BenchRun:
    peak = max((mb for _, mb in samples), default=0.0)
    # Signals surface as negative exit codes from both subprocess and multiprocessing.
    return BenchRun(0, wall, peak, samples, status)


def run_benchmark(target, inputs: Sequence[str], runs: int = 10, interval_ms: int = 50) -> list[BenchReport]:
    """Run ``target`` ``runs`` times on each input, one run at a time."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if interval_ms < MIN_INTERVAL_MS:
        raise ValueError(f"interval must be at least {MIN_INTERVAL_MS} ms")
    reports = []
    for input_path in inputs:
        report = BenchReport(target.name, Path(input_path).name if input_path else "-")
        for i in range(1, runs + 1):
            result = target.execute(str(input_path), interval_ms)
            result.run = i
            report.runs.append(result)
        reports.append(report)
    return reports


def raise_for_failures(reports: Sequence[BenchReport]) -> None:
    for report in reports:
        if report.failed:
            first = report.failed[0]
            raise TargetFailed(f"{report.target} on {report.input}: {len(report.failed)} failed run(s), "
                               f"first exit status {first.status}", first.status)


CSV_COLUMNS = ["target", "input", "run", "wall_seconds", "peak_rss_mb", "status"]


def _safe(text: str) -> str:
    return re.sub(r"[^\w.-]+", "_", text)


def write_reports(reports: Sequence[BenchReport], csv_path: str | os.PathLike,
                  samples_dir: str | os.PathLike | None = None) -> list[Path]:
    """Write the run table and one ``t_ms,rss_mb`` sidecar per run; returns
    the sidecar paths."""
    csv_path = Path(csv_path)
    samples_dir = Path(samples_dir) if samples_dir is not None else csv_path.parent / (csv_path.stem + "-samples")
    samples_dir.mkdir(parents=True, exist_ok=True)
    sidecars = []
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rep in reports:
            for r in rep.runs:
                writer.writerow([rep.target, rep.input, r.run, f"{r.wall_seconds:.6f}",
                                 f"{r.peak_rss_mb:.3f}", r.status])
                side = samples_dir / f"{_safe(rep.target)}_{_safe(rep.input)}_{r.run}.csv"
                with open(side, "w", newline="", encoding="utf-8") as sf:
                    sw = csv.writer(sf)
                    sw.writerow(["t_ms", "rss_mb"])
                    sw.writerows([f"{t:.1f}", f"{mb:.3f}"] for t, mb in r.samples)
                sidecars.append(side)
    return sidecars


def summary_text(reports: Sequence[BenchReport]) -> str:
    lines = []
    for rep in reports:
        wall = f"{rep.mean_wall:.3f}s" if rep.mean_wall is not None else "n/a"
        peak = f"{rep.mean_peak:.1f}MB" if rep.mean_peak is not None else "n/a"
        fail = f", {len(rep.failed)} failed" if rep.failed else ""
        lines.append(f"{rep.target} {rep.input}: {len(rep.runs)} runs, mean wall {wall}, mean peak {peak}{fail}")
    return "\n".join(lines)
