"""Punctured-disc exchange matrices and a class-group benchmark harness.

B(m, p) is the exchange matrix of a triangulated disc with m marked
boundary points and p >= 2 punctures.  Starting from the base 5x5 matrix
B(2, 2), one block step adds a marked boundary point (size n -> n+1) and
another adds a puncture (size n -> n+3), always keeping the last two arcs
in a common triangle so that b[n-1][n-2] == 1.

The harness runs the full chart-atlas/class-group pipeline on a list of
disc specs, records rank, torsion, chart and generator counts plus wall
time, and compares ranks against an optional expected table.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .cluster import (
    BudgetExhausted,
    ExchangeMatrix,
    SearchLimits,
    banff_charts,
    banff_generators,
    exchange_matrix,
    initial_seed,
    one_var_flir,
)
from .divisors import class_group, class_group_text, is_factorial
from .elements import factorizations
from .laurent import RatFunc

__all__ = [
    "DiscSpec",
    "CaseResult",
    "BenchReport",
    "FixtureResult",
    "disc_matrix",
    "run_benchmark",
    "report_text",
    "report_json",
    "fixture_checks",
]


# ---------------------------------------------------------------------------
# disc specs and the block recursion


@dataclass(frozen=True)
class DiscSpec:
    """A disc with m marked boundary points and p punctures."""

    m: int
    p: int

    def __post_init__(self):
        if self.m < 2 or self.p < 2:
            raise ValueError("need m >= 2 and p >= 2")

    @property
    def size(self) -> int:
        return 3 * self.p + self.m - 3

    @property
    def label(self) -> str:
        return f"B({self.m},{self.p})"


_BASE_2_2 = (
    (0, 1, -1, 1, 0),
    (-1, 0, 1, 0, -1),
    (1, -1, 0, -1, 1),
    (-1, 0, 1, 0, -1),
    (0, 1, -1, 1, 0),
)


def _add_boundary_point(b: tuple) -> tuple:
    """One more marked point beside the last two arcs: size n -> n+1.

    The old arc n-1 (0-indexed) is relabeled to n; a new arc takes index
    n-1 and pairs with arc n-2, cutting the old coupling between them.
    """
    n = len(b)
    out = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n - 1):
        for j in range(n - 1):
            out[i][j] = b[i][j]
    for i in range(n - 2):
        out[i][n] = b[i][n - 1]
        out[n][i] = b[n - 1][i]
    out[n - 2][n - 1] = -1
    out[n - 1][n - 2] = 1
    out[n - 1][n] = -1
    out[n][n - 1] = 1
    return tuple(tuple(row) for row in out)


def _add_puncture(b: tuple) -> tuple:
    """One more puncture in the triangle of the last two arcs: n -> n+3."""
    n = len(b)
    out = [[0] * (n + 3) for _ in range(n + 3)]
    for i in range(n - 1):
        for j in range(n - 1):
            out[i][j] = b[i][j]
    for i in range(n - 2):
        out[i][n - 1] = b[i][n - 1]
        out[n - 1][i] = b[n - 1][i]
    # arc n-2 now pairs with the first two new arcs
    out[n - 2][n] = -1
    out[n][n - 2] = 1
    out[n - 2][n + 1] = 1
    out[n + 1][n - 2] = -1
    # relabeled old last arc, decoupled from arc n-2
    out[n - 1][n] = 1
    out[n][n - 1] = -1
    out[n - 1][n + 2] = -1
    out[n + 2][n - 1] = 1
    # triangle spanned by the three arcs at the new puncture
    out[n][n + 1] = -1
    out[n + 1][n] = 1
    out[n][n + 2] = 1
    out[n + 2][n] = -1
    out[n + 1][n + 2] = -1
    out[n + 2][n + 1] = 1
    return tuple(tuple(row) for row in out)


def disc_matrix(spec: DiscSpec) -> ExchangeMatrix:
    """Exchange matrix of the triangulated disc, size 3p + m - 3."""
    rows = _BASE_2_2
    for _ in range(spec.m - 2):
        rows = _add_boundary_point(rows)
    for _ in range(spec.p - 2):
        rows = _add_puncture(rows)
    out = exchange_matrix(rows)
    assert out.n == spec.size
    return out


# ---------------------------------------------------------------------------
# benchmark harness


@dataclass(frozen=True)
class CaseResult:
    spec: DiscSpec
    size: int
    rank: Optional[int]
    torsion: tuple[int, ...]
    charts: Optional[int]
    generators: Optional[int]
    seconds: float
    expected_rank: Optional[int]
    error: Optional[str]

    @property
    def ok(self) -> bool:
        if self.error is not None or self.torsion:
            return False
        return self.expected_rank is None or self.rank == self.expected_rank

    @property
    def status(self) -> str:
        if self.error is not None:
            return "budget"
        if self.torsion:
            return "torsion " + "x".join(f"Z/{t}" for t in self.torsion)
        if self.expected_rank is not None and self.rank != self.expected_rank:
            return f"expected {self.expected_rank}"
        return "ok"


@dataclass(frozen=True)
class BenchReport:
    cases: tuple[CaseResult, ...]

    @property
    def ok(self) -> bool:
        return all(case.ok for case in self.cases)


def _bench_case(args: tuple) -> tuple:
    m, p, max_depth, max_seeds = args
    limits = SearchLimits(max_depth, max_seeds)
    start = time.perf_counter()
    try:
        seed = initial_seed(disc_matrix(DiscSpec(m, p)).entries)
        atlas = banff_charts(seed, limits)
        pres = class_group(atlas)
        gens = banff_generators(seed, limits)
        row = (pres.free_rank, pres.torsion, len(atlas), len(gens), None)
    except BudgetExhausted as exc:
        row = (None, (), None, None, str(exc))
    return row[:4] + (time.perf_counter() - start,) + row[4:]


def run_benchmark(
    cases: Sequence[DiscSpec],
    expected: Optional[Sequence[int]] = None,
    *,
    limits: SearchLimits = SearchLimits(),
    workers: Optional[int] = None,
) -> BenchReport:
    """Run the pipeline on each disc case; rows come back in input order.

    Budget exhaustion is recorded on the affected row instead of aborting
    the remaining cases.  Each case runs in its own process when more than
    one worker is available.
    """
    specs = list(cases)
    for spec in specs:
        if not isinstance(spec, DiscSpec):
            raise TypeError("cases must be DiscSpec instances")
    if expected is not None and len(expected) != len(specs):
        raise ValueError("expected ranks must match cases one for one")
    jobs = [(s.m, s.p, limits.max_depth, limits.max_seeds) for s in specs]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_case, jobs))
    else:
        rows = [_bench_case(job) for job in jobs]
    out = []
    for i, (spec, row) in enumerate(zip(specs, rows)):
        rank, torsion, charts, gens, seconds, error = row
        out.append(
            CaseResult(
                spec=spec,
                size=spec.size,
                rank=rank,
                torsion=tuple(torsion),
                charts=charts,
                generators=gens,
                seconds=seconds,
                expected_rank=None if expected is None else expected[i],
                error=error,
            )
        )
    return BenchReport(tuple(out))


def _fmt(value) -> str:
    return "-" if value is None else str(value)


def report_text(report: BenchReport) -> str:
    """Column-aligned table, one metric per row and one case per column."""
    header = [""] + [case.spec.label for case in report.cases]
    body = [
        ["rank"] + [_fmt(c.rank) for c in report.cases],
        ["size"] + [str(c.size) for c in report.cases],
        ["charts"] + [_fmt(c.charts) for c in report.cases],
        ["generators"] + [_fmt(c.generators) for c in report.cases],
        ["time"] + [f"{c.seconds:.1f}s" for c in report.cases],
        ["status"] + [c.status for c in report.cases],
    ]
    table = [header] + body
    widths = [max(len(row[j]) for row in table) for j in range(len(header))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in table
    ]
    return "\n".join(lines)


def report_json(report: BenchReport) -> dict:
    return {
        "ok": report.ok,
        "cases": [
            {
                "label": c.spec.label,
                "m": c.spec.m,
                "p": c.spec.p,
                "size": c.size,
                "rank": c.rank,
                "torsion": list(c.torsion),
                "charts": c.charts,
                "generators": c.generators,
                "seconds": c.seconds,
                "expected_rank": c.expected_rank,
                "error": c.error,
                "ok": c.ok,
            }
            for c in report.cases
        ],
    }


# ---------------------------------------------------------------------------
# fixture catalog


@dataclass(frozen=True)
class FixtureResult:
    name: str
    ok: bool
    detail: str


def fixture_checks() -> tuple[FixtureResult, ...]:
    """Known-answer cases that guard the whole pipeline end to end."""
    rows = []

    seed = initial_seed([[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
    pres = class_group(banff_charts(seed))
    shape = class_group_text(pres.free_rank, pres.torsion)
    rows.append(
        FixtureResult(
            "rank-3 path quiver over Q has class group Z",
            pres.free_rank == 1 and not pres.torsion,
            f"got {shape}",
        )
    )

    rows.append(
        FixtureResult(
            "Z[x, 2/x] is factorial",
            is_factorial(one_var_flir(2, "Z")),
            "class group must be trivial",
        )
    )

    atlas = one_var_flir(6, "Z")
    pres = class_group(atlas)
    shape = class_group_text(pres.free_rank, pres.torsion)
    rows.append(
        FixtureResult(
            "Z[x, 6/x] has class group Z",
            pres.free_rank == 1 and not pres.torsion,
            f"got {shape}",
        )
    )
    six = RatFunc.const(atlas.table, 6)
    count = len(factorizations(atlas, pres, six))
    rows.append(
        FixtureResult(
            "6 has exactly two factorizations in Z[x, 6/x]",
            count == 2,
            f"got {count}",
        )
    )
    return tuple(rows)
