"""Hamiltonian-path gadget: a SYM-HAM instance turned into a bandwidth-constrained one.

Each node U' of the symmetric digraph H becomes a chain U_1 <-> U_2 <-> U_3 <-> U_4,
and every link (U', V') becomes (U_1, V_1). A tail S = C_0 <-> C_1 <-> ... <-> C_{n+1}
stacks n extra copies of protocol ``a``, and the only way to unstack them is to
run the chain of every node exactly once. All links have bandwidth 1 and the
floor is 1, so no link may be crossed twice. A feasible path therefore exists
exactly when H has a Hamiltonian path from S' to D'.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import AdaptationFunction as F
from .model import Edge, MultiLayerNetwork

A, B = 0, 1


@dataclass(frozen=True)
class Reduction:
    net: MultiLayerNetwork
    source: int
    dest: int
    min_bandwidth: float
    # node of H -> ids of its four copies U_1..U_4
    copies: dict[int, tuple[int, int, int, int]]
    tail: tuple[int, ...]
    x: int

    def gadget_sequence(self, u: int) -> list[tuple[int, F]]:
        """The (node, function) run that consumes one stacked ``a`` at H-node ``u``."""
        u1, u2, u3, u4 = self.copies[u]
        return [
            (u1, F.encapsulation(B, B)),
            (u2, F.decapsulation(B, B)),
            (u3, F.decapsulation(A, B)),
            (u4, F.decapsulation(A, A)),
            (u3, F.passive(A)),
            (u2, F.passive(A)),
            (u1, F.encapsulation(A, B)),
        ]


def is_symmetric(edges: Iterable[Edge]) -> bool:
    es = set(edges)
    return all((v, u) in es for u, v in es)


def sym_ham_reduce(
    nodes: Sequence[int], edges: Iterable[Edge], source: int, dest: int
) -> Reduction:
    """Build the gadget network for H = (nodes, edges) with endpoints S', D'."""
    nodes = sorted(set(nodes))
    edges = sorted(set(edges))
    if source == dest:
        raise ValueError("the endpoints must differ")
    if source not in nodes or dest not in nodes:
        raise ValueError("the endpoints must be nodes of the graph")
    if not is_symmetric(edges):
        raise ValueError("the graph must be symmetric")
    n = len(nodes)
    tail = tuple(range(n + 2))  # C_0 = S, ..., C_{n+1}
    copies: dict[int, tuple[int, int, int, int]] = {}
    nxt = n + 2
    for u in nodes:
        copies[u] = (nxt, nxt + 1, nxt + 2, nxt + 3)
        nxt += 4
    x, d = nxt, nxt + 1

    links: list[Edge] = []

    def both(u: int, v: int) -> None:
        links.extend([(u, v), (v, u)])

    for u in nodes:
        c = copies[u]
        for i in range(3):
            both(c[i], c[i + 1])
    for u, v in edges:
        links.append((copies[u][0], copies[v][0]))
    for i in range(n + 1):
        both(tail[i], tail[i + 1])
    both(tail[-1], copies[source][0])
    both(copies[dest][0], x)
    both(x, d)

    functions: dict[int, list[F]] = {
        tail[0]: [F.passive(A)],  # lets S emit a
        d: [F.passive(A)],  # lets D accept a
        x: [F.decapsulation(A, B)],
        tail[-1]: [F.encapsulation(A, B)],
    }
    for c in tail[1:-1]:
        functions[c] = [F.encapsulation(A, A)]
    for u in nodes:
        u1, u2, u3, u4 = copies[u]
        functions[u1] = [F.encapsulation(B, B), F.encapsulation(A, B)]
        functions[u2] = [F.decapsulation(B, B), F.passive(A)]
        functions[u3] = [F.decapsulation(A, B), F.passive(A)]
        functions[u4] = [F.decapsulation(A, A)]

    labels = {tail[0]: "S", x: "X", d: "D"}
    labels.update({c: f"C{i}" for i, c in enumerate(tail) if i})
    for u in nodes:
        for j, c in enumerate(copies[u], start=1):
            labels[c] = f"U{u}_{j}"
    all_nodes = list(range(d + 1))
    net = MultiLayerNetwork.build(
        all_nodes,
        links,
        ("a", "b"),
        functions,
        bandwidth={e: 1.0 for e in links},
        labels=labels,
    )
    return Reduction(net, tail[0], d, 1.0, copies, tail, x)


def count_gadget_runs(reduction: Reduction, path) -> dict[int, int]:
    """How many times each H-node's full gadget run appears in ``path``."""
    run = [(s.node, s.function) for s in path.steps]
    counts = {}
    for u in reduction.copies:
        seq = reduction.gadget_sequence(u)
        k = len(seq)
        counts[u] = sum(run[i:i + k] == seq for i in range(len(run) - k + 1))
    return counts
