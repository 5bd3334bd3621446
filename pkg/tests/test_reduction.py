from __future__ import annotations

import itertools

import pytest

from mlpath.bfs import bfs_shortest, dfs_feasible
from mlpath.model import check_feasibility, edge_counts
from mlpath.reduction import count_gadget_runs, is_symmetric, sym_ham_reduce
from oracles import hamiltonian_path_exists


def sym(pairs):
    return sorted({(u, v) for a, b in pairs for u, v in ((a, b), (b, a))})


def solve(red):
    return bfs_shortest(red.net, red.source, red.dest, max_hops=None,
                        min_bandwidth=red.min_bandwidth, lookahead=True)


def test_size_for_two_nodes():
    red = sym_ham_reduce([0, 1], sym([(0, 1)]), 0, 1)
    assert len(red.net.nodes) == 14
    assert all(bw == 1.0 for bw in red.net.bandwidth.values())
    assert is_symmetric(red.net.edges)


def test_input_validation():
    with pytest.raises(ValueError):
        sym_ham_reduce([0, 1], [(0, 1)], 0, 1)
    with pytest.raises(ValueError):
        sym_ham_reduce([0, 1], sym([(0, 1)]), 0, 0)
    with pytest.raises(ValueError):
        sym_ham_reduce([0, 1], sym([(0, 1)]), 0, 7)


def test_path_graph_runs_every_gadget_once():
    nodes, edges = [0, 1, 2], sym([(0, 1), (1, 2)])
    red = sym_ham_reduce(nodes, edges, 0, 2)
    r = solve(red)
    assert r is not None
    assert check_feasibility(red.net, r.path).feasible
    assert max(edge_counts(r.path).values()) == 1
    assert count_gadget_runs(red, r.path) == {0: 1, 1: 1, 2: 1}


def test_wrong_endpoints_have_no_path():
    red = sym_ham_reduce([0, 1, 2], sym([(0, 1), (1, 2)]), 0, 1)
    assert solve(red) is None


def test_isolated_node_blocks_the_path():
    red = sym_ham_reduce([0, 1, 2], sym([(0, 1)]), 0, 1)
    assert solve(red) is None


@pytest.mark.parametrize("n", [3, 4])
def test_all_small_graphs(n):
    nodes = list(range(n))
    pairs = list(itertools.combinations(nodes, 2))
    for mask in range(1 << len(pairs)):
        edges = sym([pr for i, pr in enumerate(pairs) if mask >> i & 1])
        red = sym_ham_reduce(nodes, edges, 0, n - 1)
        r = solve(red)
        assert (r is not None) == hamiltonian_path_exists(nodes, edges, 0, n - 1)
        if r is not None:
            assert set(count_gadget_runs(red, r.path).values()) == {1}


def test_depth_first_agrees_on_small_graphs():
    nodes = list(range(4))
    pairs = list(itertools.combinations(nodes, 2))
    for mask in range(0, 1 << len(pairs), 3):
        edges = sym([pr for i, pr in enumerate(pairs) if mask >> i & 1])
        red = sym_ham_reduce(nodes, edges, 0, 3)
        r = dfs_feasible(red.net, red.source, red.dest, red.min_bandwidth)
        assert (r is not None) == hamiltonian_path_exists(nodes, edges, 0, 3)
