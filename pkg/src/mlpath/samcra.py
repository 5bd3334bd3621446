"""Exact multi-constrained feasible path search (a SAMCRA variant).

Partial paths are explored best-first on the additive weight h. Each queue
entry carries what decides its future: final node, current protocol, protocol
stack, and how many times each link has been crossed. The per-link crossing
count is capped by floor(q_b / q_b_min), which bounds path length and makes the
search finite even though paths may loop.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .bfs import SearchTimeout
from .model import Edge, MLPath, MultiLayerNetwork, Step, apply_function, trace_of
from .pipeline import Metric, Result, apply_metric


@dataclass(frozen=True)
class ConstraintSet:
    min_bandwidth: float
    qos_max: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.min_bandwidth > 0:
            raise ValueError("the bandwidth floor must be positive")
        if any(q < 0 for q in self.qos_max):
            raise ValueError("QoS ceilings must be non-negative")
        object.__setattr__(self, "qos_max", tuple(float(q) for q in self.qos_max))


@dataclass(frozen=True, eq=False)
class QueueEntry:
    node: int
    protocol: int
    stack: tuple[int, ...]
    nb: dict[Edge, int]
    qos: tuple[float, ...]
    slack: float
    weight: float
    parent: Optional["QueueEntry"] = None
    step: Optional[Step] = None

    @property
    def hops(self) -> int:
        return sum(self.nb.values())

    def path(self, source: int, dest: int) -> MLPath:
        steps = []
        e = self
        while e.step is not None:
            steps.append(e.step)
            e = e.parent
        return MLPath(source, e.protocol, tuple(reversed(steps)), dest)


@dataclass(frozen=True)
class SamcraResult(Result):
    bandwidth: float = math.inf
    qos: tuple[float, ...] = ()
    exact: bool = True


def dominates(a: QueueEntry, b: QueueEntry) -> bool:
    """True when ``b`` can be dropped because ``a`` does at least as well.

    Beyond same node, same stack, more bandwidth slack and no worse QoS, the
    test also requires the same current protocol, no larger weight and no
    larger crossing count on any link. Without the last two an entry could be
    dropped in favour of one that is more expensive or has less room left to
    reuse a particular link.
    """
    if a.node != b.node or a.stack != b.stack or a.protocol != b.protocol:
        return False
    if a.slack < b.slack or a.weight > b.weight:
        return False
    if any(x > y for x, y in zip(a.qos, b.qos)):
        return False
    return all(b.nb.get(e, 0) >= k for e, k in a.nb.items())


def _extend(entry, net, caps, qmax, u, v, f, proto, stack, weight_step):
    k = entry.nb.get((u, v), 0) + 1
    if k > caps[(u, v)]:
        return None
    qos = tuple(x + q for x, q in zip(entry.qos, net.qos[(u, v)]))
    if any(x > m + 1e-9 for x, m in zip(qos, qmax)):
        return None
    nb = dict(entry.nb)
    nb[(u, v)] = k
    return QueueEntry(
        node=v,
        protocol=proto,
        stack=stack,
        nb=nb,
        qos=qos,
        slack=min(entry.slack, net.bandwidth[(u, v)] / k),
        weight=entry.weight + weight_step,
        parent=entry,
        step=None if f is None else Step(u, f),
    )


def ml_samcra(
    net: MultiLayerNetwork,
    source: int,
    dest: int,
    constraints: ConstraintSet,
    metric: Metric | str = Metric.CUSTOM,
    *,
    k: int | None = None,
    prune: bool = True,
    timeout: float | None = None,
) -> SamcraResult | None:
    """Minimum-weight path meeting the bandwidth floor and every QoS ceiling.

    ``k`` caps how many entries may be kept per node; with a cap the search
    is a heuristic and the result says so (``exact=False``) whenever the cap
    actually discarded something. ``timeout`` (seconds) raises
    :class:`~mlpath.bfs.SearchTimeout` when exceeded.
    """
    net = apply_metric(net, metric)
    qmax: Sequence[float] = constraints.qos_max
    if len(qmax) != net.qos_dim:
        raise ValueError(f"expected {net.qos_dim} QoS ceilings, got {len(qmax)}")
    caps = {e: math.floor(bw / constraints.min_bandwidth + 1e-9) for e, bw in net.bandwidth.items()}

    store: dict[tuple, list[tuple[int, QueueEntry]]] = {}
    per_node: dict[int, int] = {}
    dead: set[int] = set()
    truncated = False
    tick = itertools.count()
    queue: list[tuple[float, int, int, QueueEntry]] = []

    def admit(entry: QueueEntry) -> None:
        nonlocal truncated
        t = next(tick)
        if prune:
            key = (entry.node, entry.protocol, entry.stack)
            kept = store.setdefault(key, [])
            if any(dominates(old, entry) for _, old in kept):
                return
            survivors = []
            for told, old in kept:
                if dominates(entry, old):
                    dead.add(told)
                    per_node[old.node] -= 1
                else:
                    survivors.append((told, old))
            store[key] = survivors
        if k is not None and per_node.get(entry.node, 0) >= k:
            truncated = True
            return
        if prune:
            store[key].append((t, entry))
        per_node[entry.node] = per_node.get(entry.node, 0) + 1
        heapq.heappush(queue, (entry.weight, entry.hops, t, entry))

    root_slack = math.inf
    for e in sorted(net.out_set(source)):
        root = QueueEntry(source, e, (), {}, (0.0,) * net.qos_dim, root_slack, 0.0)
        for v in net.successors[source]:
            if v == source:
                continue
            child = _extend(root, net, caps, qmax, source, v, None, e, (), 0.0)
            if child is not None:
                admit(child)

    in_dest = net.in_set(dest)
    deadline = None if timeout is None else time.perf_counter() + timeout
    popped = 0
    while queue:
        _, _, t, entry = heapq.heappop(queue)
        popped += 1
        if deadline is not None and popped % 512 == 0 and time.perf_counter() > deadline:
            raise SearchTimeout("search exceeded its time budget")
        if t in dead:
            continue
        u = entry.node
        if u == dest and not entry.stack and entry.protocol in in_dest:
            path = entry.path(source, dest)
            return SamcraResult(
                path, entry.weight, trace_of(path), entry.slack, entry.qos,
                exact=not truncated,
            )
        for f in net.sorted_functions[u]:
            moved = apply_function(f, entry.protocol, entry.stack)
            if not isinstance(moved, tuple):
                continue
            proto, stack = moved
            for v in net.successors[u]:
                if v == source:
                    continue
                child = _extend(entry, net, caps, qmax, u, v, f, proto, stack, net.weight(u, f, v))
                if child is not None:
                    admit(child)
    return None
