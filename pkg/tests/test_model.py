from __future__ import annotations

import pytest

from mlpath.model import AdaptationFunction as F
from mlpath.model import (
    Kind,
    MLPath,
    MultiLayerNetwork,
    Reason,
    Step,
    Symbol,
    Tag,
    check_feasibility,
    edge_counts,
    encapsulation_weights,
    hop_weights,
    in_set,
    out_set,
    path_bandwidth,
    path_qos,
    path_weight,
    trace_of,
)
from nets import A, B, C, nested_net, nested_path, passive_net, passive_path, tunnel_net, tunnel_path


def test_passive_is_conversion_onto_itself():
    f = F.passive(A)
    assert f.kind is Kind.CONVERSION and f.a == f.b == A
    assert f.label(["a"]) == "(a->a)"


def test_labels():
    names = ["a", "b"]
    assert F.encapsulation(A, B).label(names) == "(a->ab)"
    assert F.decapsulation(A, B).label(names) == "~(a->ab)"
    assert Symbol(A, Tag.PUSH).label(names) == "^a"
    assert Symbol(B, Tag.POP).label(names) == "_b"


class TestFeasibility:
    def test_passive_path(self):
        rep = check_feasibility(passive_net(), passive_path())
        assert rep.feasible and rep.failure is None and rep.final_stack == ()

    def test_tunnel_path(self):
        assert check_feasibility(tunnel_net(), tunnel_path()).feasible

    def test_wrong_decap_order(self):
        # a in b, b in c, then try to take a out of c while b is on top
        net = MultiLayerNetwork.build(
            range(5),
            [(0, 1), (1, 2), (2, 3), (3, 4)],
            ["a", "b", "c"],
            {0: [F.passive(A)], 1: [F.encapsulation(A, B)], 2: [F.encapsulation(B, C)],
             3: [F.decapsulation(A, C)], 4: [F.passive(A)]},
        )
        path = MLPath(0, A, (Step(1, F.encapsulation(A, B)), Step(2, F.encapsulation(B, C)),
                             Step(3, F.decapsulation(A, C))), 4)
        rep = check_feasibility(net, path)
        assert not rep.feasible
        assert rep.failure.reason is Reason.WRONG_DECAP_ORDER and rep.failure.step == 3

    def test_not_an_edge(self):
        path = MLPath(0, A, (Step(2, F.passive(A)),), 2)
        rep = check_feasibility(passive_net(), path)
        assert rep.failure.reason is Reason.NOT_AN_EDGE and rep.failure.step == 1

    def test_function_unavailable(self):
        path = MLPath(0, A, (Step(1, F.encapsulation(A, A)),), 2)
        assert check_feasibility(passive_net(), path).failure.reason is Reason.FUNCTION_UNAVAILABLE

    def test_stack_left_over_at_destination(self):
        net = tunnel_net()
        net = net.replace(edges=net.edges | {(1, 3)})
        rep = check_feasibility(net, MLPath(0, A, (Step(1, F.encapsulation(A, B)),), 3))
        assert rep.failure.reason is Reason.STACK_NON_EMPTY_AT_DEST
        assert rep.final_stack == (A,)

    def test_conversion_needs_matching_input(self):
        net = MultiLayerNetwork.build(
            range(3), [(0, 1), (1, 2)], ["a", "b"],
            {0: [F.passive(A)], 1: [F.conversion(B, A)], 2: [F.passive(A)]},
        )
        rep = check_feasibility(net, MLPath(0, A, (Step(1, F.conversion(B, A)),), 2))
        assert rep.failure.reason is Reason.PROTOCOL_MISMATCH and rep.failure.step == 1

    def test_stack_underflow(self):
        net = MultiLayerNetwork.build(
            range(3), [(0, 1), (1, 2)], ["a", "b"],
            {0: [F.passive(B)], 1: [F.decapsulation(A, B)], 2: [F.passive(A)]},
        )
        rep = check_feasibility(net, MLPath(0, B, (Step(1, F.decapsulation(A, B)),), 2))
        assert rep.failure.reason is Reason.STACK_UNDERFLOW

    def test_emitted_protocol_must_leave_source(self):
        rep = check_feasibility(tunnel_net(), MLPath(0, B, (Step(1, F.encapsulation(A, B)),), 2))
        assert rep.failure == type(rep.failure)(0, Reason.PROTOCOL_MISMATCH)

    def test_arrival_protocol_must_enter_destination(self):
        net = MultiLayerNetwork.build(
            range(3), [(0, 1), (1, 2)], ["a", "b"],
            {0: [F.passive(A)], 1: [F.conversion(A, B)], 2: [F.passive(A)]},
        )
        rep = check_feasibility(net, MLPath(0, A, (Step(1, F.conversion(A, B)),), 2))
        assert rep.failure.reason is Reason.PROTOCOL_MISMATCH and rep.failure.step == 2

    def test_source_never_applies_a_function(self):
        net = MultiLayerNetwork.build(
            range(3), [(0, 1), (1, 0), (0, 2)], ["a"], {u: [F.passive(A)] for u in range(3)}
        )
        path = MLPath(0, A, (Step(1, F.passive(A)), Step(0, F.passive(A))), 2)
        assert check_feasibility(net, path).failure.reason is Reason.FUNCTION_UNAVAILABLE


class TestTrace:
    def test_passive(self):
        assert trace_of(passive_path()) == (Symbol(A, Tag.PLAIN), Symbol(A, Tag.PLAIN))

    def test_tunnel(self):
        assert trace_of(tunnel_path()) == (Symbol(A, Tag.PUSH), Symbol(B, Tag.POP), Symbol(A, Tag.PLAIN))

    def test_nested(self):
        assert check_feasibility(nested_net(), nested_path()).feasible
        assert trace_of(nested_path()) == (
            Symbol(A, Tag.PUSH), Symbol(B, Tag.PUSH), Symbol(C, Tag.POP), Symbol(B, Tag.POP), Symbol(A, Tag.PLAIN)
        )


class TestInOut:
    def _net(self, fs):
        return MultiLayerNetwork.build([0], [], ["a", "b"], {0: fs})

    def test_empty(self):
        net = self._net([])
        assert in_set(net, 0) == out_set(net, 0) == frozenset()

    def test_encapsulation(self):
        net = self._net([F.encapsulation(A, B)])
        assert in_set(net, 0) == {A} and out_set(net, 0) == {B}

    def test_decap_plus_passive(self):
        net = self._net([F.decapsulation(A, B), F.passive(A)])
        assert in_set(net, 0) == {A, B} and out_set(net, 0) == {A}


class TestMetrics:
    def test_default_weight_counts_steps(self):
        net = MultiLayerNetwork.build(range(5), [(i, i + 1) for i in range(4)], ["a"],
                                      {u: [F.passive(A)] for u in range(5)})
        path = MLPath(0, A, tuple(Step(i, F.passive(A)) for i in (1, 2, 3)), 4)
        assert path_weight(net, path) == 3.0

    def test_explicit_weights(self):
        net = MultiLayerNetwork.build(range(5), [(i, i + 1) for i in range(4)], ["a"],
                                      {u: [F.passive(A)] for u in range(5)},
                                      weights={(1, F.passive(A), 2): 0.5, (2, F.passive(A), 3): 0.25,
                                               (3, F.passive(A), 4): 0.25})
        path = MLPath(0, A, tuple(Step(i, F.passive(A)) for i in (1, 2, 3)), 4)
        assert path_weight(net, path) == 1.0

    def test_encapsulation_count_preset(self):
        net = encapsulation_weights(tunnel_net())
        assert path_weight(net, tunnel_path()) == 1.0
        assert path_weight(hop_weights(net), tunnel_path()) == 2.0

    def test_presets_leave_the_original_alone(self):
        net = tunnel_net(weights={(1, F.encapsulation(A, B), 2): 5.0})
        encapsulation_weights(net)
        assert net.weight(1, F.encapsulation(A, B), 2) == 5.0

    def test_bandwidth_loopless(self):
        net = tunnel_net().replace(bandwidth={e: 10.0 for e in tunnel_net().edges})
        assert path_bandwidth(net, tunnel_path()) == 10.0

    def test_bandwidth_halved_by_reuse(self):
        net = MultiLayerNetwork.build(range(3), [(0, 1), (1, 2), (2, 1), (1, 0)], ["a"],
                                      {u: [F.passive(A)] for u in range(3)},
                                      bandwidth={(0, 1): 10, (1, 2): 10, (2, 1): 10, (1, 0): 10})
        # 0 -> 1 -> 2 -> 1 -> 2 crosses (1, 2) twice
        path = MLPath(0, A, (Step(1, F.passive(A)), Step(2, F.passive(A)), Step(1, F.passive(A))), 2)
        assert edge_counts(path)[(1, 2)] == 2
        assert path_bandwidth(net, path) == 5.0
        assert path.has_loop()

    def test_qos_sums_per_hop(self):
        edges = [(i, i + 1) for i in range(4)]
        net = MultiLayerNetwork.build(range(5), edges, ["a"], {u: [F.passive(A)] for u in range(5)},
                                      qos={e: (1.0,) for e in edges})
        path = MLPath(0, A, tuple(Step(i, F.passive(A)) for i in (1, 2, 3)), 4)
        assert path_qos(net, path) == (4.0,)


class TestValidation:
    def test_rejects_weight_on_missing_edge(self):
        with pytest.raises(ValueError):
            MultiLayerNetwork.build([0, 1], [(0, 1)], ["a"], {0: [F.passive(A)]},
                                    weights={(1, F.passive(A), 0): 1.0})

    def test_rejects_unknown_protocol(self):
        with pytest.raises(ValueError):
            MultiLayerNetwork.build([0], [], ["a"], {0: [F.passive(B)]})

    def test_rejects_ragged_qos(self):
        with pytest.raises(ValueError):
            MultiLayerNetwork.build([0, 1, 2], [(0, 1), (1, 2)], ["a"],
                                    qos={(0, 1): (1.0,), (1, 2): (1.0, 2.0)})

    def test_rejects_non_positive_bandwidth(self):
        with pytest.raises(ValueError):
            MultiLayerNetwork.build([0, 1], [(0, 1)], ["a"], bandwidth={(0, 1): 0.0})
