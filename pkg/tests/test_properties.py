"""Property-based checks of invariants that hold for every input."""

from __future__ import annotations

import math

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from mlpath._counts import CountCodec
from mlpath.bfs import bfs_shortest
from mlpath.generate import candidate_functions
from mlpath.model import MultiLayerNetwork, check_feasibility, edge_counts, path_weight, trace_of
from mlpath.pipeline import shortest_feasible_path
from mlpath.topology import parse, serialize
from mlpath.wpda import accepts_min, build_wpda
from oracles import enumerate_paths, naive_counts, naive_weight

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def networks(draw, max_nodes=5, max_protocols=2):
    n = draw(st.integers(3, max_nodes))
    k = draw(st.integers(1, max_protocols))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    edges = draw(st.sets(st.sampled_from(pairs), min_size=1))
    cands = candidate_functions(k)
    functions = {u: draw(st.sets(st.sampled_from(cands), max_size=4)) for u in range(n)}
    weights = {}
    for u, v in sorted(edges):
        for f in sorted(functions[u]):
            weights[(u, f, v)] = float(draw(st.integers(1, 3)))
    bandwidth = {e: float(draw(st.integers(1, 5))) for e in sorted(edges)}
    names = [chr(ord("a") + i) for i in range(k)]
    net = MultiLayerNetwork.build(range(n), edges, names, functions, weights=weights, bandwidth=bandwidth)
    return net, 0, n - 1


@SETTINGS
@given(networks())
def test_pipeline_answer_is_feasible_and_consistent(inst):
    net, s, d = inst
    r = shortest_feasible_path(net, s, d)
    if r is None:
        return
    assert check_feasibility(net, r.path).feasible
    assert trace_of(r.path) == r.trace
    assert naive_weight(net, r.path) == r.weight
    accepted = accepts_min(build_wpda(net, s, d), r.trace, 3 * len(r.trace) + 4)
    assert accepted is not None and accepted[0] <= r.weight


@SETTINGS
@given(networks())
def test_every_feasible_path_is_accepted_and_no_cheaper_than_optimum(inst):
    net, s, d = inst
    best = shortest_feasible_path(net, s, d)
    wpda = build_wpda(net, s, d)
    for i, path in enumerate(enumerate_paths(net, s, d, 4)):
        if i >= 30:
            break
        assert check_feasibility(net, path).feasible
        word = trace_of(path)
        acc = accepts_min(wpda, word, 3 * len(word) + 4)
        assert acc is not None and acc[0] <= path_weight(net, path)
        assert best is not None and best.weight <= path_weight(net, path)


@SETTINGS
@given(networks(), st.data())
def test_more_functions_never_hurt(inst, data):
    net, s, d = inst
    u = data.draw(st.sampled_from(sorted(net.nodes)))
    f = data.draw(st.sampled_from(candidate_functions(len(net.protocols))))
    functions = {v: set(fs) for v, fs in net.functions.items()}
    functions[u].add(f)
    richer = net.replace(functions={v: frozenset(fs) for v, fs in functions.items()})
    a = shortest_feasible_path(net, s, d)
    b = shortest_feasible_path(richer, s, d)
    if a is not None:
        assert b is not None and b.weight <= a.weight


@SETTINGS
@given(networks(), st.integers(2, 5))
def test_scaling_weights_scales_the_optimum(inst, factor):
    net, s, d = inst
    scaled = net.replace(weights={k: w * factor for k, w in net.weights.items()})
    a = shortest_feasible_path(net, s, d)
    b = shortest_feasible_path(scaled, s, d)
    assert (a is None) == (b is None)
    if a is not None:
        assert b.weight == a.weight * factor


@SETTINGS
@given(networks())
def test_bfs_agrees_with_pipeline(inst):
    net, s, d = inst
    ref = shortest_feasible_path(net, s, d)
    r = bfs_shortest(net, s, d, max_hops=int(ref.weight) + 1 if ref else 5)
    assert (r and r.weight) == (ref and ref.weight)


@SETTINGS
@given(networks())
def test_topology_round_trip(inst):
    net, s, d = inst
    again, s2, d2 = parse(serialize(net, s, d))
    assert (s2, d2) == (s, d)
    assert again.functions == net.functions and again.weights == net.weights
    assert again.edges == net.edges and again.bandwidth == net.bandwidth


@SETTINGS
@given(networks())
def test_edge_counts_match_naive(inst):
    net, s, d = inst
    r = shortest_feasible_path(net, s, d)
    if r is not None:
        assert edge_counts(r.path) == naive_counts(r.path)


@given(st.dictionaries(st.integers(0, 5), st.integers(0, 9), min_size=1), st.data())
def test_packed_counts_compare_componentwise(caps, data):
    caps = {(e, e + 1): c for e, c in caps.items()}
    codec = CountCodec(caps)
    edges = sorted(caps)

    def draw_counts():
        return {e: data.draw(st.integers(0, caps[e])) for e in edges}

    a, b = draw_counts(), draw_counts()
    pa = pb = 0
    for e in edges:
        for _ in range(a[e]):
            pa = codec.bump(pa, e)
        for _ in range(b[e]):
            pb = codec.bump(pb, e)
    assert codec.decode(pa) == {e: k for e, k in a.items() if k}
    assert codec.leq(pa, pb) == all(a[e] <= b[e] for e in edges)
