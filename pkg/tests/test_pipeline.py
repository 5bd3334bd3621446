from __future__ import annotations

import math

import pytest

from mlpath.model import AdaptationFunction as F
from mlpath.model import MultiLayerNetwork, check_feasibility, path_weight, trace_of
from mlpath.pipeline import Metric, pipeline_stats, shortest_feasible_path
from nets import A, nested_net, nested_path, passive_net, random_instance, tunnel_net
from oracles import brute_min_weight


def test_passive_hop():
    r = shortest_feasible_path(passive_net(), 0, 2, Metric.HOPS)
    assert r.weight == 1.0 and len(r.path.hops) == 2 and len(r.trace) == 2


def test_encapsulation_metric_counts_pushes():
    r = shortest_feasible_path(nested_net(), 0, 5, Metric.ENCAPSULATIONS)
    assert r.weight == 2.0
    assert r.path == nested_path()


def test_custom_weights_are_used():
    r = shortest_feasible_path(tunnel_net({(2, F.decapsulation(A, 1), 3): 1.5}), 0, 3)
    assert r.weight == 2.5


def test_no_functions_no_path():
    net = MultiLayerNetwork.build(range(3), [(0, 1), (1, 2)], ["a"])
    assert shortest_feasible_path(net, 0, 2) is None


def test_unknown_metric():
    with pytest.raises(ValueError):
        shortest_feasible_path(passive_net(), 0, 2, "latency")


@pytest.mark.parametrize("seed", range(60))
def test_matches_enumeration(seed):
    net, s, d = random_instance(seed, max_nodes=5, max_protocols=2)
    r = shortest_feasible_path(net, s, d)
    if r is None:
        # weights >= 1, so a short brute force suffices to confirm nothing cheap was missed
        assert brute_min_weight(net, s, d, 6) == math.inf
        return
    assert check_feasibility(net, r.path).feasible
    assert trace_of(r.path) == r.trace
    assert path_weight(net, r.path) == r.weight
    assert brute_min_weight(net, s, d, int(r.weight) + 1) == r.weight


@pytest.mark.parametrize("explicit", [False, True])
def test_stats(explicit):
    net, s, d = random_instance(11, max_nodes=5, max_protocols=2)
    st = pipeline_stats(net, s, d, explicit_grammar=explicit)
    n_gamma = len(net.protocols) + 1
    assert st.states <= 2 + len(net.protocols) * (len(net.nodes) - 1)
    assert st.nonterminals <= n_gamma * st.states**2 + 1
    assert set(st.timings) == {"wpda", "wcfg", "knuth", "match"}
    r = shortest_feasible_path(net, s, d)
    assert st.weight == (r.weight if r else math.inf)
