from __future__ import annotations

import json
from pathlib import Path

import pytest

from mlpath.model import check_feasibility
from mlpath.pipeline import shortest_feasible_path
from mlpath.topology import (
    TopologyError,
    dumps_path,
    parse,
    path_from_json,
    path_to_json,
    read_topology,
    serialize,
    write_topology,
)
from nets import nested_net, nested_path, random_instance

DATA = Path(__file__).resolve().parent.parent / "data"


def same_net(x, y):
    return (x.nodes, x.edges, x.protocols, x.functions, x.weights, x.bandwidth, x.qos, x.qos_dim) == (
        y.nodes, y.edges, y.protocols, y.functions, y.weights, y.bandwidth, y.qos, y.qos_dim)


def test_minimal_document():
    net, s, d = parse("[protocols]\na\n[nodes]\n0\n1\n[edges]\n0 1\n[functions]\n0 conv a a\n1 conv a a\n")
    assert (s, d) == (None, None)
    assert net.edges == {(0, 1)} and net.bandwidth[(0, 1)] == 1.0 and net.qos_dim == 0


def test_shipped_examples_parse():
    net, s, d = read_topology(DATA / "tunnel-net.topo")
    assert (s, d) == (0, 3) and net.qos_dim == 1
    assert shortest_feasible_path(net, s, d).weight == 2.5
    net, s, d = read_topology(DATA / "passive-net.topo")
    assert shortest_feasible_path(net, s, d).weight == 1.0


@pytest.mark.parametrize("seed", range(20))
def test_round_trip(seed, tmp_path):
    net, s, d = random_instance(seed, qos_dim=seed % 3)
    again, s2, d2 = parse(serialize(net, s, d))
    assert same_net(net, again) and (s2, d2) == (s, d)
    write_topology(tmp_path / "x.topo", net, s, d)
    assert same_net(read_topology(tmp_path / "x.topo")[0], net)


def test_labels_survive():
    net, _, _ = read_topology(DATA / "tunnel-net.topo")
    assert parse(serialize(net))[0].labels == net.labels


@pytest.mark.parametrize("doc,line,col", [
    ("[protocols]\na\n[nodes]\n0\n[functions]\n0 wrap a a\n", 6, 3),
    ("[protocols]\na\n[nodes]\n0\n1\n[edges]\n0 1 bw=x\n", 7, 8),
    ("[protocols]\na\n[nodes]\n0\n[edges]\n0 5\n", 6, 3),
    ("[protocols]\na\n[nodes]\n0\n0\n", 5, 1),
    ("[protocols]\na\n[nodes]\n0\n[functions]\n0 conv a z\n", 6, 10),
    ("a\n", 1, 1),
    ("[protocols]\na\n[colours]\n", 3, 1),
    ("[protocols]\na\n[protocols]\n", 3, 1),
    ("[nodes]\n0\n", 1, 1),
    ("[protocols]\na\n[nodes]\n0\n1\n[edges]\n0 1 bw=0\n", 7, 5),
    ("[protocols]\na\n[nodes]\n0\n1\n[edges]\n0 1\n[weights]\n0 conv a a 1 2\n", 9, 3),
    ("[meta]\nqos_dim = 2\n[protocols]\na\n[nodes]\n0\n1\n[edges]\n0 1 qos=1\n", 9, 1),
    ("[protocols]\na\n[nodes]\n0\n[endpoints]\nsource = 3\n", 6, 10),
])
def test_errors_point_at_the_problem(doc, line, col):
    with pytest.raises(TopologyError) as info:
        parse(doc)
    assert (info.value.line, info.value.column) == (line, col)
    assert str(info.value).startswith(f"line {line}, column {col}:")


def test_path_json_round_trip():
    net, path = nested_net(), nested_path()
    doc = json.loads(dumps_path(net, path))
    assert doc["steps"][0]["function"] == {"kind": "encap", "from": "a", "to": "b", "label": "(a->ab)"}
    back = path_from_json(net, doc)
    assert back == path and check_feasibility(net, back).feasible
    assert path_to_json(net, back) == doc


def test_bad_path_json():
    with pytest.raises(ValueError):
        path_from_json(nested_net(), {"source": 0})
    with pytest.raises(ValueError):
        path_from_json(nested_net(), {"source": 0, "emitted": "zz", "steps": [], "dest": 5})
