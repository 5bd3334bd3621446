"""Bandwidth heuristic: turn the network into a DAG, drop thin links, then solve.

On a DAG no link can be crossed twice, so any path found there meets a
bandwidth floor as soon as every remaining link does. The price is
completeness: paths that need a loop are lost.
"""

from __future__ import annotations

import networkx as nx
import numpy as np

from .bfs import bfs_shortest
from .model import MultiLayerNetwork
from .pipeline import Metric, Result, shortest_feasible_path


def bfs_numbering(net: MultiLayerNetwork, source: int, dest: int, seed: int = 0) -> dict[int, int]:
    """Visit-order numbers from a BFS rooted at ``source``.

    Nodes at the same distance are visited in a seed-dependent random order.
    ``source`` gets 0 and ``dest`` gets |V|-1; if the BFS would number ``dest``
    earlier, it swaps numbers with the node holding |V|-1. Nodes the BFS never
    reaches are numbered after the reached ones, in id order.
    """
    if source not in net.successors or dest not in net.successors:
        raise KeyError("source and destination must be nodes of the network")
    rng = np.random.default_rng(seed)
    order = [source]
    seen = {source}
    level = [source]
    while level:
        nxt = []
        for u in level:
            for v in net.successors[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        nxt = [nxt[i] for i in rng.permutation(len(nxt))]
        order.extend(nxt)
        level = nxt
    if dest not in seen:
        raise ValueError(f"destination {dest} is unreachable from {source}")
    order.extend(u for u in net.nodes if u not in seen)
    number = {u: i for i, u in enumerate(order)}
    last = len(order) - 1
    if number[dest] != last:
        other = order[last]
        number[other], number[dest] = number[dest], last
    return number


def dagify(net: MultiLayerNetwork, source: int, dest: int, seed: int = 0) -> MultiLayerNetwork:
    """Keep only links going from a smaller to a larger BFS number."""
    number = bfs_numbering(net, source, dest, seed)
    return net.with_edges((u, v) for u, v in net.edges if number[u] < number[v])


def is_acyclic(net: MultiLayerNetwork) -> bool:
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    g.add_edges_from(net.edges)
    return nx.is_directed_acyclic_graph(g)


def prune_thin_links(net: MultiLayerNetwork, min_bandwidth: float) -> MultiLayerNetwork:
    if min_bandwidth <= 0:
        raise ValueError("the bandwidth floor must be positive")
    return net.with_edges(e for e in net.edges if net.bandwidth[e] >= min_bandwidth)


def _best(results: list[Result | None]) -> Result | None:
    found = [r for r in results if r is not None]
    return min(found, key=lambda r: r.weight) if found else None


def dag_pda(
    net: MultiLayerNetwork,
    source: int,
    dest: int,
    min_bandwidth: float,
    metric: Metric | str = Metric.CUSTOM,
    seed: int = 0,
    restarts: int = 1,
) -> Result | None:
    """Best result over ``restarts`` DAGs drawn with seeds ``seed, seed+1, ...``."""
    if min_bandwidth <= 0:
        raise ValueError("the bandwidth floor must be positive")
    runs = []
    for k in range(max(1, restarts)):
        dag = prune_thin_links(dagify(net, source, dest, seed + k), min_bandwidth)
        runs.append(shortest_feasible_path(dag, source, dest, metric))
    return _best(runs)


def dag_bfs(
    net: MultiLayerNetwork,
    source: int,
    dest: int,
    min_bandwidth: float,
    max_hops: int | None = None,
    seed: int = 0,
    restarts: int = 1,
    timeout: float | None = None,
) -> Result | None:
    """Like :func:`dag_pda` with the exhaustive search as the solver.

    On a DAG every path has fewer than |V| links, so ``max_hops=None`` is
    replaced by |V| - 1.
    """
    if min_bandwidth <= 0:
        raise ValueError("the bandwidth floor must be positive")
    cap = max_hops if max_hops is not None else max(1, len(net.nodes) - 1)
    runs = []
    for k in range(max(1, restarts)):
        dag = prune_thin_links(dagify(net, source, dest, seed + k), min_bandwidth)
        runs.append(bfs_shortest(dag, source, dest, cap, min_bandwidth, timeout=timeout))
    return _best(runs)

