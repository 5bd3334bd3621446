"""Recover a cheapest concrete path whose trace is a given word."""

from __future__ import annotations

import math

from .model import AdaptationFunction, MLPath, MultiLayerNetwork, Step, Symbol, Tag


class TraceMismatch(RuntimeError):
    """No path of the network carries the trace; the upstream stages disagree."""


def functions_for_trace(trace: tuple[Symbol, ...]) -> list[AdaptationFunction]:
    """The function applied at each step is fixed by consecutive trace letters."""
    out = []
    for x, nxt in zip(trace, trace[1:]):
        if x.tag is Tag.PLAIN:
            out.append(AdaptationFunction.conversion(x.protocol, nxt.protocol))
        elif x.tag is Tag.PUSH:
            out.append(AdaptationFunction.encapsulation(x.protocol, nxt.protocol))
        else:
            out.append(AdaptationFunction.decapsulation(nxt.protocol, x.protocol))
    return out


def match_trace(net: MultiLayerNetwork, trace: tuple[Symbol, ...], source: int, dest: int) -> MLPath:
    """Cheapest path from ``source`` to ``dest`` whose trace is ``trace``.

    Builds one layer of candidate nodes per trace position and solves the
    layered DAG backwards; equal-cost choices go to the smallest node id.
    """
    trace = tuple(trace)
    if not trace or trace[-1].tag is not Tag.PLAIN:
        raise TraceMismatch("a trace must end with a plain protocol")
    funcs = functions_for_trace(trace)
    n = len(funcs)
    emitted = trace[0].protocol
    if emitted not in net.out_set(source) or trace[-1].protocol not in net.in_set(dest):
        raise TraceMismatch("trace endpoints do not fit the source/destination")

    layers: list[list[int]] = []
    for f in funcs:
        layer = [u for u in net.nodes if u != source and f in net.functions[u]]
        if not layer:
            raise TraceMismatch(f"no node offers {f}")
        layers.append(layer)

    # cost_to_go[i][u]: cheapest completion from node u standing at step i+1
    cost_to_go: list[dict[int, float]] = [dict() for _ in range(n)]
    if n:
        for u in layers[-1]:
            if (u, dest) in net.edges:
                cost_to_go[-1][u] = net.weight(u, funcs[-1], dest)
        for i in range(n - 2, -1, -1):
            nxt = cost_to_go[i + 1]
            for u in layers[i]:
                best = math.inf
                for v in net.successors[u]:
                    if v in nxt:
                        best = min(best, net.weight(u, funcs[i], v) + nxt[v])
                if best < math.inf:
                    cost_to_go[i][u] = best

    if n == 0:
        if (source, dest) not in net.edges:
            raise TraceMismatch("no direct link for a single-letter trace")
        return MLPath(source, emitted, (), dest)

    starts = [(cost_to_go[0][v], v) for v in net.successors[source] if v in cost_to_go[0]]
    if not starts:
        raise TraceMismatch("trace cannot be matched from the source")
    _, u = min(starts)
    nodes = [u]
    for i in range(n - 1):
        nxt = cost_to_go[i + 1]
        _, u = min((net.weight(u, funcs[i], v) + nxt[v], v) for v in net.successors[u] if v in nxt)
        nodes.append(u)
    return MLPath(source, emitted, tuple(Step(u, f) for u, f in zip(nodes, funcs)), dest)
