"""Precision/recall over tool combinations and sampling for partial validation.

Ratios are kept as exact fractions so percentage rendering is never at the
mercy of binary floating point.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .compare import Diff, MergedGraph, tool_subsets
from .errors import SampleTooLarge, UnvalidatedEdges


def round_half_up(value: Fraction, places: int = 0) -> Fraction:
    scale = 10 ** places
    return Fraction(math.floor(value * scale + Fraction(1, 2)), scale)


def percent(ratio: Fraction) -> int:
    """Integer percentage, rounded half up, but never claiming 100 for a
    ratio below one or 0 for a ratio above zero."""
    value = int(round_half_up(ratio * 100))
    if value == 100 and ratio < 1:
        return 99
    if value == 0 and ratio > 0:
        return 1
    return value


def share_pct(part: int, whole: int, places: int = 1) -> str:
    """``part/whole`` as a percentage string, rounded half up."""
    if whole == 0:
        return f"{0:.{places}f}"
    value = round_half_up(Fraction(100 * part, whole), places)
    return f"{float(value):.{places}f}"


@dataclass(frozen=True)
class CombinationStats:
    combination: tuple[str, ...]
    tp: int
    all: int
    tp_star: int

    def __post_init__(self):
        if not (0 <= self.tp <= self.all and self.tp <= self.tp_star):
            raise ValueError(f"inconsistent counts TP={self.tp} All={self.all} TP*={self.tp_star}")

    @property
    def name(self) -> str:
        return "+".join(self.combination)

    @property
    def precision(self) -> Fraction:
        return Fraction(self.tp, self.all) if self.all else Fraction(0)

    @property
    def recall(self) -> Fraction:
        return Fraction(self.tp, self.tp_star) if self.tp_star else Fraction(0)

    @property
    def f(self) -> Fraction:
        # Harmonic mean of TP/All and TP/TP*, simplified.
        if self.tp == 0:
            return Fraction(0)
        return Fraction(2 * self.tp, self.all + self.tp_star)

    def percentages(self) -> tuple[int, int, int]:
        return percent(self.precision), percent(self.recall), percent(self.f)


def combination_stats(m: MergedGraph) -> list[CombinationStats]:
    """Stats for every non-empty tool subset, by size then lexicographically.

    Raises ``UnvalidatedEdges`` if any edge lacks a validity flag.
    """
    missing = sorted(m.edge_key(e) for e in m.edges if e.valid is None)
    if missing:
        raise UnvalidatedEdges(missing)
    regions: dict[frozenset, list[int]] = {}
    for e in m.edges:
        counts = regions.setdefault(e.tools, [0, 0])
        counts[0] += 1
        counts[1] += bool(e.valid)
    tp_star = sum(tp for _, tp in regions.values())
    out = []
    for combo in tool_subsets(m.tools):
        members = set(combo)
        total = tp = 0
        for tools, (n, t) in regions.items():
            if tools & members:
                total += n
                tp += t
        out.append(CombinationStats(combo, tp, total, tp_star))
    return out


_COLUMNS = ["combination", "TP", "All", "TPstar", "precision_pct", "recall_pct", "f_pct"]


def _rows(stats: Iterable[CombinationStats]) -> list[list]:
    return [[s.name, s.tp, s.all, s.tp_star, *s.percentages()] for s in stats]


def stats_csv(stats: Iterable[CombinationStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_COLUMNS)
    writer.writerows(_rows(stats))
    return buf.getvalue()


def stats_text(stats: Iterable[CombinationStats]) -> str:
    rows = [[str(c) for c in r] for r in _rows(stats)]
    header = ["combination", "TP", "All", "TP*", "precision", "recall", "F"]
    for r in rows:
        r[4:] = [v + "%" for v in r[4:]]
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    lines = []
    for r in [header] + rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SampleSizeQuery:
    population: int
    z: float = 1.96
    margin: float = 0.05
    proportion: float = 0.5

    def __post_init__(self):
        if self.population < 1:
            raise ValueError("population must be at least 1")
        if not 0 < self.margin < 1:
            raise ValueError("margin must lie in (0, 1)")
        if not 0 < self.proportion < 1:
            raise ValueError("proportion must lie in (0, 1)")
        if self.z <= 0:
            raise ValueError("z must be positive")


def sample_size(query: SampleSizeQuery | int, **params) -> int:
    """Cochran's sample size with finite-population correction, rounded to
    the nearest integer and capped at the population."""
    if not isinstance(query, SampleSizeQuery):
        query = SampleSizeQuery(query, **params)
    z, e, p, big_n = query.z, query.margin, query.proportion, query.population
    n0 = z * z * p * (1 - p) / (e * e)
    n = n0 / (1 + (n0 - 1) / big_n)
    return min(big_n, math.floor(n + 0.5))


def region_edges(m: MergedGraph, region: Iterable[str]) -> list:
    """Edge keys found by exactly the tools in ``region``, in canonical order."""
    wanted = frozenset(t.lower() for t in region)
    return sorted(m.edge_key(e) for e in m.edges if e.tools == wanted)


def sample_edges(m: MergedGraph, region: Iterable[str], n: int, seed) -> list:
    """Uniform sample without replacement from one Venn region, returned in
    canonical order."""
    population = region_edges(m, region)
    if n < 0:
        raise ValueError("sample size must be non-negative")
    if n > len(population):
        raise SampleTooLarge(f"requested {n} edges from a region of {len(population)}")
    if n == len(population):
        return population
    picked = random.Random(seed).sample(range(len(population)), n)
    return [population[i] for i in sorted(picked)]


@dataclass(frozen=True)
class ProportionEstimate:
    true_count: int
    sample_size: int
    population: int

    @property
    def estimate(self) -> Fraction:
        return Fraction(self.true_count, self.sample_size) if self.sample_size else Fraction(0)

    @property
    def percent(self) -> str:
        """Two decimals, truncated toward zero."""
        if not self.sample_size:
            return "0.00"
        q = self.true_count * 10000 // self.sample_size
        return f"{q // 100}.{q % 100:02d}"

    def __str__(self) -> str:
        return f"{self.true_count} out of {self.sample_size} ({self.percent}%)"


def proportion_summary(labeled: tuple[int, int], population: int) -> ProportionEstimate:
    true_count, size = labeled
    if not 0 <= true_count <= size <= population:
        raise ValueError("expected true-count <= sample-size <= population")
    return ProportionEstimate(true_count, size, population)


@dataclass(frozen=True)
class OverlapSummary:
    union: int
    common: int
    only_a: int
    only_b: int

    def shares(self, places: int = 1) -> tuple[str, str, str]:
        return tuple(share_pct(x, self.union, places) for x in (self.common, self.only_a, self.only_b))


def overlap_summary(d: Diff) -> OverlapSummary:
    return OverlapSummary(d.union, len(d.common), len(d.only_a), len(d.only_b))
