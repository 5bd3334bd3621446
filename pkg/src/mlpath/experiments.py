"""Phase-transition and timing experiments on random function allocations.

One graph is drawn per experiment and kept fixed; only the adaptation
functions vary between runs. Run r uses the seed ``[seed, r]`` for every p,
so raising p only adds functions (monotone coupling) and feasibility curves
are nondecreasing by construction.

Runs fan out over a process pool whose size comes from ``MLPATH_WORKERS``
(default 1, i.e. in-process).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from statsmodels.stats.proportion import proportion_confint

from .bfs import SearchTimeout, bfs_shortest
from .dag import dag_bfs, dag_pda
from .generate import allocate_functions, diameter_endpoints, read_adjacency, synthetic_graph
from .model import Edge
from .pipeline import Metric, apply_metric, shortest_feasible_path
from .samcra import ConstraintSet, ml_samcra

WORKERS_ENV = "MLPATH_WORKERS"
ALGORITHMS = ("pda", "bfs", "dag-pda", "dag-bfs", "samcra")


@dataclass(frozen=True)
class GraphSpec:
    """Which fixed graph to run on: ``er``, ``regular``, ``grid`` or ``file``."""

    kind: str = "er"
    n: int = 40
    degree: float = 7.0
    seed: int = 0
    path: str | None = None

    def build(self) -> tuple[list[int], list[Edge]]:
        if self.kind == "file":
            if not self.path:
                raise ValueError("a file graph spec needs a path")
            return read_adjacency(self.path)
        return synthetic_graph(self.kind, self.n, self.seed, self.degree)

    def describe(self) -> str:
        if self.kind == "file":
            return f"file:{self.path}"
        return f"{self.kind}:n={self.n}:degree={self.degree:g}:seed={self.seed}"

    @classmethod
    def parse(cls, text: str) -> GraphSpec:
        """Inverse of :meth:`describe`, e.g. ``er:n=40:degree=7:seed=1``."""
        kind, _, rest = text.partition(":")
        if kind == "file":
            return cls(kind="file", path=rest)
        fields = {}
        for part in filter(None, rest.split(":")):
            key, _, value = part.partition("=")
            if key not in ("n", "degree", "seed"):
                raise ValueError(f"unknown graph spec field {key!r}")
            fields[key] = float(value) if key == "degree" else int(value)
        return cls(kind=kind, **fields)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _fan_out(fn: Callable, jobs: Sequence[tuple], workers: int | None) -> list:
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs), chunksize=max(1, len(jobs) // (4 * workers))))


def wilson(successes: int, n: int) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    lo, hi = proportion_confint(successes, n, alpha=0.05, method="wilson")
    return float(lo), float(hi)


# phase transition

@dataclass
class PhaseRow:
    p: float
    runs: int
    feasible: int
    p_feasible: float
    feasible_lo: float
    feasible_hi: float
    loops: int
    p_loop: float
    loop_lo: float
    loop_hi: float


@dataclass
class PhaseTable:
    spec: str
    n_protocols: int
    seed: int
    source: int
    dest: int
    rows: list[PhaseRow]
    # run outcomes keyed by (p, run index): (feasible, has_loop)
    outcomes: dict[tuple[float, int], tuple[bool, bool]] = field(default_factory=dict, repr=False)

    def monotonicity_violations(self) -> int:
        """Runs that were feasible at some p but not at a larger p."""
        ps = sorted({p for p, _ in self.outcomes})
        runs = sorted({r for _, r in self.outcomes})
        bad = 0
        for r in runs:
            seen = False
            for p in ps:
                ok = self.outcomes[(p, r)][0]
                if seen and not ok:
                    bad += 1
                seen = seen or ok
        return bad

    def crossing(self, level: float = 0.5) -> float | None:
        """Smallest p where P(feasible) reaches ``level``, linearly interpolated."""
        prev = None
        for row in self.rows:
            if row.p_feasible >= level:
                if prev is None or row.p_feasible == prev.p_feasible:
                    return row.p
                t = (level - prev.p_feasible) / (row.p_feasible - prev.p_feasible)
                return prev.p + t * (row.p - prev.p)
            prev = row
        return None


def _phase_run(nodes, edges, n_protocols, p, seed, run, source, dest):
    net = allocate_functions(nodes, edges, n_protocols, p, seed=[seed, run])
    res = shortest_feasible_path(net, source, dest, Metric.HOPS)
    if res is None:
        return (p, run, False, False)
    return (p, run, True, res.path.has_loop())


def phase_transition(
    spec: GraphSpec,
    n_protocols: int,
    p_grid: Iterable[float],
    runs_per_p: int,
    seed: int = 0,
    workers: int | None = None,
) -> PhaseTable:
    """P(feasible path) and P(loop in the shortest path | feasible) per p.

    Shortest means fewest hops. A loop is a directed link crossed twice.
    """
    if runs_per_p < 1:
        raise ValueError("runs_per_p must be at least 1")
    p_grid = [float(p) for p in p_grid]
    nodes, edges = spec.build()
    source, dest = diameter_endpoints(nodes, edges)
    jobs = [
        (nodes, edges, n_protocols, p, seed, r, source, dest)
        for p in p_grid
        for r in range(runs_per_p)
    ]
    outcomes = {(p, r): (ok, loop) for p, r, ok, loop in _fan_out(_phase_run, jobs, workers)}
    rows = []
    for p in p_grid:
        feas = sum(outcomes[(p, r)][0] for r in range(runs_per_p))
        loops = sum(outcomes[(p, r)][1] for r in range(runs_per_p))
        flo, fhi = wilson(feas, runs_per_p)
        llo, lhi = wilson(loops, feas)
        rows.append(
            PhaseRow(
                p=p,
                runs=runs_per_p,
                feasible=feas,
                p_feasible=feas / runs_per_p,
                feasible_lo=flo,
                feasible_hi=fhi,
                loops=loops,
                p_loop=loops / feas if feas else math.nan,
                loop_lo=llo,
                loop_hi=lhi,
            )
        )
    return PhaseTable(spec.describe(), n_protocols, seed, source, dest, rows, outcomes)


# timing

@dataclass
class TimingRow:
    algo: str
    p: float
    runs: int
    completed: int
    censored: int
    feasible: int
    mean_seconds: float
    max_seconds: float


@dataclass
class TimingTable:
    spec: str
    n_protocols: int
    seed: int
    budget: float
    rows: list[TimingRow]


def run_algorithm(
    algo: str,
    net,
    source: int,
    dest: int,
    *,
    metric: Metric | str = Metric.HOPS,
    max_hops: int | None = 10,
    min_bandwidth: float | None = None,
    qos_max: Sequence[float] | None = None,
    seed: int = 0,
    restarts: int = 1,
    k: int | None = None,
    timeout: float | None = None,
):
    """Dispatch one query to the named solver. Raises SearchTimeout when censored.

    ``bfs`` runs in bandwidth mode only when ``min_bandwidth`` is given; the
    DAG heuristics and ``samcra`` need it (``samcra`` defaults to no QoS
    ceiling).
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; expected one of {', '.join(ALGORITHMS)}")
    if algo == "pda":
        return shortest_feasible_path(net, source, dest, metric)
    if algo == "bfs":
        return bfs_shortest(apply_metric(net, metric), source, dest, max_hops, min_bandwidth, timeout=timeout)
    if min_bandwidth is None:
        raise ValueError(f"{algo} needs a bandwidth floor")
    if algo == "dag-pda":
        return dag_pda(net, source, dest, min_bandwidth, metric, seed, restarts)
    if algo == "dag-bfs":
        return dag_bfs(apply_metric(net, metric), source, dest, min_bandwidth, max_hops, seed, restarts,
                       timeout=timeout)
    qmax = tuple(qos_max) if qos_max is not None else (math.inf,) * net.qos_dim
    return ml_samcra(net, source, dest, ConstraintSet(min_bandwidth, qmax), metric, k=k, timeout=timeout)


def _timing_run(nodes, edges, n_protocols, p, seed, run, source, dest, algo, budget, max_hops, min_bw):
    net = allocate_functions(nodes, edges, n_protocols, p, seed=[seed, run])
    if algo == "bfs":
        min_bw = None  # the plain baseline; bandwidth mode is dag-bfs / samcra territory
    t0 = time.perf_counter()
    try:
        res = run_algorithm(algo, net, source, dest, max_hops=max_hops, min_bandwidth=min_bw,
                            seed=run, timeout=budget)
    except SearchTimeout:
        return (algo, p, run, None, False)
    return (algo, p, run, time.perf_counter() - t0, res is not None)


def timing_sweep(
    spec: GraphSpec,
    algos: Sequence[str],
    p_grid: Iterable[float],
    runs_per_p: int,
    budget_per_run: float,
    seed: int = 0,
    n_protocols: int = 2,
    max_hops: int | None = 10,
    min_bandwidth: float = 1.0,
    workers: int | None = None,
) -> TimingTable:
    """Wall-clock time per algorithm and p; runs over budget are censored.

    Only the exhaustive searches honour the budget; the others always finish.
    """
    for a in algos:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    p_grid = [float(p) for p in p_grid]
    nodes, edges = spec.build()
    source, dest = diameter_endpoints(nodes, edges)
    jobs = [
        (nodes, edges, n_protocols, p, seed, r, source, dest, a, budget_per_run, max_hops, min_bandwidth)
        for a in algos
        for p in p_grid
        for r in range(runs_per_p)
    ]
    results = _fan_out(_timing_run, jobs, workers)
    rows = []
    for a in algos:
        for p in p_grid:
            mine = [x for x in results if x[0] == a and x[1] == p]
            times = [x[3] for x in mine if x[3] is not None]
            rows.append(
                TimingRow(
                    algo=a,
                    p=p,
                    runs=len(mine),
                    completed=len(times),
                    censored=len(mine) - len(times),
                    feasible=sum(x[4] for x in mine),
                    mean_seconds=sum(times) / len(times) if times else math.nan,
                    max_seconds=max(times) if times else math.nan,
                )
            )
    return TimingTable(spec.describe(), n_protocols, seed, budget_per_run, rows)


# CSV

def _manifest(kind: str, **info) -> str:
    return "# manifest " + json.dumps({"experiment": kind, **info}, sort_keys=True)


def table_to_csv(table: PhaseTable | TimingTable) -> str:
    """CSV text whose first line is a ``# manifest {json}`` row for replay."""
    buf = io.StringIO()
    if isinstance(table, PhaseTable):
        head = _manifest(
            "phase-transition",
            spec=table.spec,
            n_protocols=table.n_protocols,
            seed=table.seed,
            source=table.source,
            dest=table.dest,
            grid=[r.p for r in table.rows],
            runs_per_p=table.rows[0].runs if table.rows else 0,
        )
    else:
        head = _manifest(
            "timing",
            spec=table.spec,
            n_protocols=table.n_protocols,
            seed=table.seed,
            budget=table.budget,
            grid=sorted({r.p for r in table.rows}),
            algos=list(dict.fromkeys(r.algo for r in table.rows)),
        )
    buf.write(head + "\n")
    rows = [asdict(r) for r in table.rows]
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def read_csv(path: str | Path) -> tuple[dict, list[dict[str, str]]]:
    """Return (manifest, rows) from a file written by :func:`table_to_csv`."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# manifest "):
        raise ValueError("missing manifest row")
    manifest = json.loads(lines[0][len("# manifest "):])
    return manifest, list(csv.DictReader(lines[1:]))
