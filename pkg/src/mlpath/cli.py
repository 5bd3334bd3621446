"""Command-line entry point.

Exit codes: 0 success, 1 no feasible path (or an infeasible path given to
``validate``), 2 usage or input errors, 3 search budget exceeded. Every error
goes to stderr as ``error[CODE]: message``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from .bfs import SearchTimeout
from .experiments import ALGORITHMS, GraphSpec, phase_transition, run_algorithm, table_to_csv, timing_sweep
from .generate import allocate_functions, diameter_endpoints, read_adjacency
from .model import check_feasibility, path_bandwidth, path_qos, trace_of
from .pipeline import Metric
from .reduction import sym_ham_reduce
from .topology import TopologyError, parse, path_from_json, path_to_json, serialize

EXIT_OK, EXIT_NO_PATH, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("E_USAGE", message)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected LO,HI")
    lo, hi = (int(x) for x in parts)
    return lo, hi


def _grid(text: str) -> list[float]:
    """``0.1,0.2`` or ``start:stop:step`` (inclusive stop)."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        k = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(k)]
    return _floats(text)


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError("E_IO", f"{path}: {exc.strerror}") from None
    try:
        return parse(text)
    except TopologyError as exc:
        raise CliError("E_PARSE", f"{path}: {exc}") from None
    except ValueError as exc:
        raise CliError("E_SEMANTIC", f"{path}: {exc}") from None


def _endpoints(args, s, d):
    s = args.source if args.source is not None else s
    d = args.dest if args.dest is not None else d
    if s is None or d is None:
        raise CliError("E_USAGE", "source and destination are needed (--source/--dest or an [endpoints] section)")
    return s, d


def _path_text(net, path) -> str:
    parts = [f"{net.node_label(path.source)} [{net.protocols[path.emitted]}]"]
    for step in path.steps:
        parts.append(f"{net.node_label(step.node)} {step.function.label(net.protocols)}")
    parts.append(net.node_label(path.dest))
    return " -> ".join(parts)


def cmd_compute(args) -> int:
    net, s, d = _load(args.topology)
    s, d = _endpoints(args, s, d)
    if args.algo in ("dag-pda", "dag-bfs", "samcra") and args.min_bw is None:
        raise CliError("E_USAGE", f"--min-bw is required for --algo {args.algo}")
    if args.min_bw is not None and args.min_bw <= 0:
        raise CliError("E_USAGE", "--min-bw must be positive")
    if args.qos_max is not None and len(args.qos_max) != net.qos_dim:
        raise CliError("E_USAGE", f"--qos-max needs {net.qos_dim} values")
    try:
        res = run_algorithm(
            args.algo, net, s, d,
            metric=args.metric,
            max_hops=args.max_hops,
            min_bandwidth=args.min_bw,
            qos_max=args.qos_max,
            seed=args.seed,
            restarts=args.restarts,
            k=args.k,
            timeout=args.timeout,
        )
    except SearchTimeout as exc:
        raise CliError("E_TIMEOUT", str(exc), EXIT_TIMEOUT) from None
    except (KeyError, ValueError) as exc:
        raise CliError("E_SEMANTIC", str(exc)) from None
    if res is None:
        raise CliError("E_NO_PATH", "no feasible path", EXIT_NO_PATH)

    exact = getattr(res, "exact", True)
    bw = path_bandwidth(net, res.path)
    qos = path_qos(net, res.path)
    if args.json:
        print(json.dumps({
            "algorithm": args.algo,
            "weight": res.weight,
            "path": path_to_json(net, res.path),
            "trace": [x.label(net.protocols) for x in res.trace],
            "bandwidth": bw,
            "qos": list(qos),
            "exact": exact,
        }, indent=2))
    else:
        print(f"path: {_path_text(net, res.path)}")
        print(f"trace: {' '.join(x.label(net.protocols) for x in res.trace)}")
        print(f"weight: {res.weight:g}")
        print(f"bandwidth: {bw:g}")
        if net.qos_dim:
            print("qos: " + ", ".join(f"{q:g}" for q in qos))
        if not exact:
            print("note: queue cap reached, result may not be optimal")
    return EXIT_OK


def cmd_validate(args) -> int:
    net, _, _ = _load(args.topology)
    try:
        data = json.loads(Path(args.path).read_text())
    except OSError as exc:
        raise CliError("E_IO", f"{args.path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError("E_PARSE", f"{args.path}: {exc}") from None
    if isinstance(data, dict) and "path" in data:
        data = data["path"]
    try:
        path = path_from_json(net, data)
    except (KeyError, ValueError) as exc:
        raise CliError("E_PARSE", f"{args.path}: {exc}") from None
    report = check_feasibility(net, path)
    if not report.feasible:
        f = report.failure
        where = f"step {f.step}" if f is not None else "destination"
        reason = f.reason.value if f is not None else "StackNonEmptyAtDest"
        raise CliError("E_INFEASIBLE", f"infeasible at {where}: {reason}", EXIT_NO_PATH)
    if args.min_bw is not None and path_bandwidth(net, path) < args.min_bw:
        raise CliError("E_INFEASIBLE", "bandwidth floor not met", EXIT_NO_PATH)
    print("feasible")
    print(f"trace: {' '.join(x.label(net.protocols) for x in trace_of(path))}")
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.adjacency:
        try:
            nodes, edges = read_adjacency(args.adjacency)
        except OSError as exc:
            raise CliError("E_IO", f"{args.adjacency}: {exc.strerror}") from None
    else:
        try:
            nodes, edges = GraphSpec.parse(args.graph).build()
        except (ValueError, RuntimeError) as exc:
            raise CliError("E_USAGE", str(exc)) from None
    if not 0 <= args.p <= 1:
        raise CliError("E_USAGE", "--p must lie in [0, 1]")
    net = allocate_functions(nodes, edges, args.protocols, args.p, seed=args.seed,
                             bandwidth_range=args.bw_range, qos_dim=args.qos_dim, qos_range=args.qos_range)
    try:
        s, d = diameter_endpoints(nodes, edges)
    except ValueError:
        s = d = None
    _emit(args.out, serialize(net, s, d))
    return EXIT_OK


def cmd_reduce(args) -> int:
    try:
        nodes, edges = read_adjacency(args.graph)
    except OSError as exc:
        raise CliError("E_IO", f"{args.graph}: {exc.strerror}") from None
    try:
        red = sym_ham_reduce(nodes, edges, args.source, args.dest)
    except ValueError as exc:
        raise CliError("E_SEMANTIC", str(exc)) from None
    _emit(args.out, serialize(red.net, red.source, red.dest))
    return EXIT_OK


def cmd_experiment(args) -> int:
    try:
        spec = GraphSpec.parse(args.graph)
    except ValueError as exc:
        raise CliError("E_USAGE", str(exc)) from None
    if args.kind == "phase-transition":
        table = phase_transition(spec, args.protocols, args.p_grid, args.runs, args.seed, args.workers)
    else:
        algos = [a.strip() for a in args.algos.split(",") if a.strip()]
        bad = [a for a in algos if a not in ALGORITHMS]
        if bad:
            raise CliError("E_USAGE", f"unknown algorithm(s): {', '.join(bad)}")
        table = timing_sweep(spec, algos, args.p_grid, args.runs, args.budget, args.seed,
                             args.protocols, args.max_hops, args.min_bw, args.workers)
    _emit(args.out, table_to_csv(table))
    return EXIT_OK


def _emit(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise CliError("E_IO", f"{out}: {exc.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mlpath", description="Feasible path computation in multi-layer networks.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="shortest feasible path on a topology file")
    c.add_argument("topology")
    c.add_argument("--source", type=int)
    c.add_argument("--dest", type=int)
    c.add_argument("--algo", choices=ALGORITHMS, default="pda")
    c.add_argument("--metric", choices=[m.value for m in Metric], default=Metric.CUSTOM.value)
    c.add_argument("--max-hops", type=int, default=10)
    c.add_argument("--min-bw", type=float)
    c.add_argument("--qos-max", type=_floats)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--restarts", type=int, default=1)
    c.add_argument("--k", type=int, help="queue cap per node for samcra (heuristic)")
    c.add_argument("--timeout", type=float)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("validate", help="check a path (JSON) against a topology")
    v.add_argument("topology")
    v.add_argument("path")
    v.add_argument("--min-bw", type=float)
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("generate", help="random function allocation on a graph")
    g.add_argument("--graph", default="er:n=40:degree=7:seed=0")
    g.add_argument("--adjacency", help="adjacency-list file instead of --graph")
    g.add_argument("--protocols", type=int, default=2)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--bw-range", type=_int_pair, default=(1, 10))
    g.add_argument("--qos-dim", type=int, default=0)
    g.add_argument("--qos-range", type=_int_pair, default=(1, 5))
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("reduce-sym-ham", help="Hamiltonian-path gadget from a symmetric graph")
    r.add_argument("graph", help="adjacency-list file")
    r.add_argument("--source", type=int, required=True)
    r.add_argument("--dest", type=int, required=True)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    e = sub.add_parser("experiment", help="phase-transition or timing sweep, CSV output")
    e.add_argument("kind", choices=("phase-transition", "timing"))
    e.add_argument("--graph", default="er:n=40:degree=7:seed=0")
    e.add_argument("--protocols", type=int, default=2)
    e.add_argument("--p-grid", type=_grid, default=_grid("0.02:0.5:0.02"))
    e.add_argument("--runs", type=int, default=200)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--algos", default="pda,bfs")
    e.add_argument("--budget", type=float, default=60.0)
    e.add_argument("--max-hops", type=int, default=10)
    e.add_argument("--min-bw", type=float, default=1.0)
    e.add_argument("--workers", type=int, help="defaults to $MLPATH_WORKERS or 1")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.status


if __name__ == "__main__":
    sys.exit(main())
