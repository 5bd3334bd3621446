"""Random multi-layer instances: synthetic graphs, function allocation, endpoints.

Randomness comes from numpy ``SeedSequence`` streams. A seed is split into
independent child streams for functions, bandwidth and QoS, so the function
draws for a (graph, seed) pair do not depend on p or on the other ranges.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

import networkx as nx
import numpy as np

from .model import AdaptationFunction, Edge, Kind, MultiLayerNetwork


def protocol_names(k: int) -> tuple[str, ...]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    if k <= len(letters):
        return tuple(letters[:k])
    return tuple(f"p{i}" for i in range(k))


def candidate_functions(n_protocols: int) -> list[AdaptationFunction]:
    """The 3|A|^2 candidates in draw order: kind, then (a, b) lexicographic."""
    return [
        AdaptationFunction(kind, a, b)
        for kind in Kind
        for a, b in product(range(n_protocols), repeat=2)
    ]


@dataclass(frozen=True)
class GenParams:
    p: float
    n_protocols: int = 2
    seed: int = 0
    bandwidth_range: tuple[int, int] = (1, 10)
    qos_dim: int = 0
    qos_range: tuple[int, int] = (1, 5)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.n_protocols < 1:
            raise ValueError("at least one protocol is needed")


def _streams(seed: int | Iterable[int]) -> tuple[np.random.Generator, ...]:
    ss = np.random.SeedSequence(seed)
    return tuple(np.random.default_rng(child) for child in ss.spawn(3))


def function_draws(nodes: Iterable[int], n_protocols: int, seed) -> np.ndarray:
    """One uniform per (node, candidate function), nodes ascending."""
    nodes = sorted(nodes)
    rng, _, _ = _streams(seed)
    return rng.random((len(nodes), 3 * n_protocols * n_protocols))


def allocate_functions(
    nodes: Iterable[int],
    edges: Iterable[Edge],
    n_protocols: int,
    p: float,
    seed=0,
    bandwidth_range: tuple[int, int] = (1, 10),
    qos_dim: int = 0,
    qos_range: tuple[int, int] = (1, 5),
) -> MultiLayerNetwork:
    """Each candidate function is present on each node independently with probability p.

    A candidate is kept when its uniform draw is below p, so raising p with the
    same seed only ever adds functions.
    """
    GenParams(p, n_protocols)  # validation
    nodes = sorted(nodes)
    edges = sorted(set(edges))
    f_rng, bw_rng, q_rng = _streams(seed)
    draws = f_rng.random((len(nodes), 3 * n_protocols * n_protocols))
    cands = candidate_functions(n_protocols)
    functions = {
        u: [f for f, x in zip(cands, draws[i]) if x < p] for i, u in enumerate(nodes)
    }
    lo, hi = bandwidth_range
    bw = bw_rng.integers(lo, hi + 1, size=len(edges))
    qlo, qhi = qos_range
    qv = q_rng.integers(qlo, qhi + 1, size=(len(edges), qos_dim))
    return MultiLayerNetwork.build(
        nodes,
        edges,
        protocol_names(n_protocols),
        functions,
        bandwidth={e: float(b) for e, b in zip(edges, bw)},
        qos={e: tuple(float(x) for x in row) for e, row in zip(edges, qv)},
        qos_dim=qos_dim,
    )


def generate(nodes, edges, params: GenParams) -> MultiLayerNetwork:
    return allocate_functions(
        nodes,
        edges,
        params.n_protocols,
        params.p,
        params.seed,
        params.bandwidth_range,
        params.qos_dim,
        params.qos_range,
    )


def diameter_endpoints(nodes: Iterable[int], edges: Iterable[Edge]) -> tuple[int, int]:
    """Pair (S, D) at maximum hop distance, smallest pair on ties.

    Distances are taken along directed links; pairs with no directed route are
    ignored. The graph must be weakly connected.
    """
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    if g.number_of_nodes() == 0 or not nx.is_weakly_connected(g):
        raise ValueError("graph is not connected")
    best = None
    for s, dist in sorted(nx.all_pairs_shortest_path_length(g)):
        for d, k in dist.items():
            if d == s:
                continue
            key = (-k, s, d)
            if best is None or key < best:
                best = key
    if best is None:
        raise ValueError("graph has no pair of distinct connected nodes")
    return best[1], best[2]


def symmetric_edges(g: nx.Graph) -> list[Edge]:
    return sorted({(int(u), int(v)) for a, b in g.edges() for u, v in ((a, b), (b, a)) if u != v})


def synthetic_graph(kind: str, n: int, seed: int = 0, degree: float = 7.0) -> tuple[list[int], list[Edge]]:
    """Connected symmetric digraph: ``er`` (Erdos-Renyi), ``regular`` or ``grid``.

    ``degree`` is the mean (er) or exact (regular) undirected degree.
    """
    rng = np.random.default_rng(seed)
    if kind == "er":
        prob = min(1.0, degree / max(n - 1, 1))
        for _ in range(1000):
            g = nx.gnp_random_graph(n, prob, seed=int(rng.integers(2**31)))
            if nx.is_connected(g):
                break
        else:
            raise RuntimeError("could not draw a connected graph; raise the degree")
    elif kind == "regular":
        d = int(round(degree))
        if (d * n) % 2:
            d += 1
        for _ in range(1000):
            g = nx.random_regular_graph(d, n, seed=int(rng.integers(2**31)))
            if nx.is_connected(g):
                break
        else:
            raise RuntimeError("could not draw a connected regular graph")
    elif kind == "grid":
        side = int(round(n**0.5))
        rows = max(1, side)
        cols = max(1, -(-n // rows))
        g = nx.convert_node_labels_to_integers(nx.grid_2d_graph(rows, cols), ordering="sorted")
    else:
        raise ValueError(f"unknown graph kind {kind!r}")
    return sorted(int(u) for u in g.nodes()), symmetric_edges(g)


def read_adjacency(path) -> tuple[list[int], list[Edge]]:
    """Adjacency-list import: each line ``u v1 v2 ...`` lists directed links u->vi."""
    g = nx.read_adjlist(path, create_using=nx.DiGraph, nodetype=int)
    return sorted(g.nodes()), sorted((int(u), int(v)) for u, v in g.edges() if u != v)


def random_digraph(n: int, edge_prob: float, rng: np.random.Generator, symmetric: bool = False) -> list[Edge]:
    edges = []
    for u in range(n):
        for v in range(n):
            if u == v or (symmetric and v < u):
                continue
            if rng.random() < edge_prob:
                edges.append((u, v))
                if symmetric:
                    edges.append((v, u))
    return sorted(edges)


def levelled_dag(n_levels: int, width: int, edge_prob: float, rng: np.random.Generator) -> tuple[list[int], list[Edge]]:
    """Random DAG whose links only join consecutive levels.

    Level 0 is node 0 alone and the last level is the highest id alone, so a
    breadth-first numbering from node 0 keeps every link. Every node has at
    least one link to the next level and one from the previous level.
    """
    levels = [[0]]
    nxt = 1
    for _ in range(n_levels - 2):
        k = int(rng.integers(1, width + 1))
        levels.append(list(range(nxt, nxt + k)))
        nxt += k
    levels.append([nxt])
    edges = []
    for here, there in zip(levels, levels[1:]):
        for u in here:
            picked = [v for v in there if rng.random() < edge_prob]
            if not picked:
                picked = [there[int(rng.integers(len(there)))]]
            edges.extend((u, v) for v in picked)
        for v in there:
            if not any(e[1] == v and e[0] in here for e in edges):
                edges.append((here[int(rng.integers(len(here)))], v))
    return list(range(nxt + 1)), sorted(edges)
