from __future__ import annotations

import pytest

from mlpath.matcher import TraceMismatch, functions_for_trace, match_trace
from mlpath.model import AdaptationFunction as F
from mlpath.model import MultiLayerNetwork, Symbol, Tag, check_feasibility, path_weight, trace_of
from nets import A, B, nested_net, nested_path, passive_net, tunnel_net, tunnel_path

a = Symbol(A, Tag.PLAIN)


def diamond(w_top: float, w_bottom: float) -> MultiLayerNetwork:
    """0 -> {1, 2} -> 3, both middles passive, with per-branch weights."""
    passive = [F.passive(A)]
    return MultiLayerNetwork.build(
        range(4),
        [(0, 1), (0, 2), (1, 3), (2, 3)],
        ["a"],
        {u: passive for u in range(4)},
        weights={(1, F.passive(A), 3): w_top, (2, F.passive(A), 3): w_bottom},
    )


def test_functions_follow_from_letters():
    word = trace_of(nested_path())
    assert functions_for_trace(word) == [s.function for s in nested_path().steps]


@pytest.mark.parametrize("w_top,w_bottom,middle", [(1.0, 5.0, 1), (5.0, 1.0, 2), (2.0, 2.0, 1)])
def test_cheaper_branch_wins(w_top, w_bottom, middle):
    p = match_trace(diamond(w_top, w_bottom), (a, a), 0, 3)
    assert p.steps[0].node == middle


@pytest.mark.parametrize("net,path", [
    (passive_net(), None), (tunnel_net(), tunnel_path()), (nested_net(), nested_path()),
])
def test_matched_path_carries_the_trace(net, path):
    dest = max(net.nodes)
    word = trace_of(path) if path is not None else (a, a)
    got = match_trace(net, word, 0, dest)
    assert trace_of(got) == word
    assert check_feasibility(net, got).feasible
    if path is not None:
        assert got == path


def test_single_letter_needs_a_direct_link():
    net = MultiLayerNetwork.build(range(2), [(0, 1)], ["a"], {0: [F.passive(A)], 1: [F.passive(A)]})
    p = match_trace(net, (a,), 0, 1)
    assert p.steps == () and path_weight(net, p) == 0.0
    with pytest.raises(TraceMismatch):
        match_trace(passive_net(), (a,), 0, 2)


@pytest.mark.parametrize("word", [
    (),
    (Symbol(A, Tag.PUSH),),
    (a, Symbol(B, Tag.PLAIN)),
    (a, a, a),
])
def test_unmatchable_words(word):
    with pytest.raises(TraceMismatch):
        match_trace(passive_net(), word, 0, 2)
