"""Breadth-first exhaustive search with domination pruning.

This is the classical baseline: grow every partial path hop by hop, drop the
ones that are dominated or too long, and keep the best arrival at the
destination. With a bandwidth floor, link reuse is capped per link and
domination also compares per-link crossing counts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

from ._counts import CountCodec
from .model import Edge, MLPath, MultiLayerNetwork, Step, apply_function, trace_of
from .pipeline import Result
from .wcfg import can_accept, completion_table
from .wpda import build_wpda


class SearchTimeout(TimeoutError):
    pass


@dataclass(eq=False)
class _Label:
    node: int
    protocol: int
    stack: tuple[int, ...]
    weight: float
    hops: int
    nb: int  # packed crossing counts, see CountCodec
    parent: Optional["_Label"]
    step: Optional[Step]
    alive: bool = True


def _rebuild(label: _Label, source: int, dest: int, emitted: int) -> MLPath:
    steps = []
    while label is not None and label.step is not None:
        steps.append(label.step)
        label = label.parent
    return MLPath(source, emitted, tuple(reversed(steps)), dest)


def _link_caps(net: MultiLayerNetwork, min_bandwidth: float) -> dict[Edge, int]:
    if min_bandwidth <= 0:
        raise ValueError("the bandwidth floor must be positive")
    return {e: math.floor(bw / min_bandwidth + 1e-9) for e, bw in net.bandwidth.items()}


def _completion_test(net: MultiLayerNetwork, source: int, dest: int):
    wpda = build_wpda(net, source, dest)
    table = completion_table(wpda)
    index = wpda.state_index
    memo: dict[tuple, bool] = {}

    def alive(node: int, protocol: int, stack: tuple[int, ...]) -> bool:
        key = (node, protocol, stack)
        if key not in memo:
            state = index.get((node, protocol))
            memo[key] = state is not None and can_accept(wpda, table, state, stack[::-1])
        return memo[key]

    return alive


def bfs_shortest(
    net: MultiLayerNetwork,
    source: int,
    dest: int,
    max_hops: int | None = 10,
    min_bandwidth: float | None = None,
    *,
    prune: bool = True,
    lookahead: bool = False,
    timeout: float | None = None,
) -> Result | None:
    """Cheapest feasible path found by layered exhaustive search.

    ``max_hops`` bounds the number of links on a path (``None``: unbounded,
    which only terminates when the reachable state space is finite or a
    bandwidth floor caps link reuse). A label is dominated by an earlier one at
    the same (node, protocol, stack) with no larger weight and, with a
    bandwidth floor, no larger crossing count on any link.

    With ``lookahead`` a label is also dropped when, even with unlimited
    bandwidth and hops, its stack could no longer be emptied on the way to
    ``dest``. This is decided exactly from the grammar of the network and
    never removes a label that could complete.
    """
    if max_hops is not None and max_hops < 1:
        raise ValueError("max_hops must be at least 1")
    caps = _link_caps(net, min_bandwidth) if min_bandwidth is not None else None
    codec = CountCodec(caps) if caps is not None else None
    deadline = None if timeout is None else time.perf_counter() + timeout
    store: dict[tuple, list[_Label]] = {}
    alive = _completion_test(net, source, dest) if lookahead else None

    g = codec.guard if codec is not None else 0

    def admit(label: _Label) -> bool:
        if alive is not None and not alive(label.node, label.protocol, label.stack):
            return False
        if not prune:
            return True
        key = (label.node, label.protocol, label.stack)
        kept = store.get(key)
        if kept is None:
            store[key] = [label]
            return True
        w, nb = label.weight, label.nb
        # componentwise nb comparison, inlined from CountCodec.leq
        nbg = nb | g
        for old in kept:
            if old.weight <= w and ((nbg - old.nb) & g) == g:
                return False
        beaten = [old for old in kept if w <= old.weight and (((old.nb | g) - nb) & g) == g]
        if beaten:
            for old in beaten:
                old.alive = False
            kept = [old for old in kept if old.alive]
            store[key] = kept
        kept.append(label)
        return True

    frontier: list[_Label] = []
    for e in sorted(net.out_set(source)):
        for v in net.successors[source]:
            if v == source:
                continue
            nb = 0
            if codec is not None:
                if caps[(source, v)] < 1:
                    continue
                nb = codec.bump(0, (source, v))
            lab = _Label(v, e, (), 0.0, 1, nb, None, None)
            if admit(lab):
                frontier.append(lab)

    best: _Label | None = None
    expanded = 0
    while frontier:
        nxt: list[_Label] = []
        for lab in frontier:
            if not lab.alive:
                continue
            expanded += 1
            if deadline is not None and expanded % 512 == 0 and time.perf_counter() > deadline:
                raise SearchTimeout("search exceeded its time budget")
            u = lab.node
            if u == dest and not lab.stack and lab.protocol in net.in_set(dest):
                if best is None or lab.weight < best.weight:
                    best = lab
            if max_hops is not None and lab.hops >= max_hops:
                continue
            for f in net.sorted_functions[u]:
                moved = apply_function(f, lab.protocol, lab.stack)
                if not isinstance(moved, tuple):
                    continue
                proto, stack = moved
                for v in net.successors[u]:
                    if v == source:
                        continue
                    nb = 0
                    if codec is not None:
                        if codec.get(lab.nb, (u, v)) >= caps[(u, v)]:
                            continue
                        nb = codec.bump(lab.nb, (u, v))
                    child = _Label(v, proto, stack, lab.weight + net.weight(u, f, v), lab.hops + 1,
                                   nb, lab, Step(u, f))
                    if admit(child):
                        nxt.append(child)
        frontier = nxt

    if best is None:
        return None
    root = best
    while root.parent is not None:
        root = root.parent
    path = _rebuild(best, source, dest, root.protocol)
    return Result(path, best.weight, trace_of(path))


def dfs_feasible(
    net: MultiLayerNetwork,
    source: int,
    dest: int,
    min_bandwidth: float,
    *,
    lookahead: bool = True,
    timeout: float | None = None,
) -> Result | None:
    """Some path meeting the bandwidth floor, or None when none exists.

    The decision version of the bandwidth-mode search: a depth-first walk
    over (node, protocol, stack, crossing counts) that visits each state
    once. The caps keep that state space finite, so the answer is exact, but
    the path returned is not necessarily the cheapest.
    """
    caps = _link_caps(net, min_bandwidth)
    codec = CountCodec(caps)
    deadline = None if timeout is None else time.perf_counter() + timeout
    alive = _completion_test(net, source, dest) if lookahead else None
    in_d = net.in_set(dest)
    seen: set[tuple] = set()
    todo: list[_Label] = []

    def push(label: _Label) -> None:
        key = (label.node, label.protocol, label.stack, label.nb)
        if key in seen:
            return
        if alive is not None and not alive(label.node, label.protocol, label.stack):
            return
        seen.add(key)
        todo.append(label)

    for e in sorted(net.out_set(source), reverse=True):
        for v in sorted(net.successors[source], reverse=True):
            if v != source and caps[(source, v)] >= 1:
                push(_Label(v, e, (), 0.0, 1, codec.bump(0, (source, v)), None, None))

    expanded = 0
    while todo:
        lab = todo.pop()
        expanded += 1
        if deadline is not None and expanded % 512 == 0 and time.perf_counter() > deadline:
            raise SearchTimeout("search exceeded its time budget")
        u = lab.node
        if u == dest and not lab.stack and lab.protocol in in_d:
            root = lab
            while root.parent is not None:
                root = root.parent
            path = _rebuild(lab, source, dest, root.protocol)
            return Result(path, lab.weight, trace_of(path))
        for f in reversed(net.sorted_functions[u]):
            moved = apply_function(f, lab.protocol, lab.stack)
            if not isinstance(moved, tuple):
                continue
            proto, stack = moved
            for v in net.successors[u]:
                if v == source or codec.get(lab.nb, (u, v)) >= caps[(u, v)]:
                    continue
                push(_Label(v, proto, stack, lab.weight + net.weight(u, f, v), lab.hops + 1,
                            codec.bump(lab.nb, (u, v)), lab, Step(u, f)))
    return None
