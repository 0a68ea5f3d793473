import itertools

import pytest
from hypothesis import given, strategies as st

from ustconlab.parity import (ParityInstance, bfs_solver, explicit_edges, materialize,
                              oracle_adjacency, parity_degree_query, parity_neighbour_query,
                              parity_via_connectivity, sortedness_violations)
from ustconlab.walks import components


def bits(n):
    return itertools.product((0, 1), repeat=n)


def test_degree_examples():
    inst = ParityInstance((1, 0, 1))
    assert parity_degree_query(inst, (0, 0)) == 1
    assert parity_degree_query(inst, (1, 0)) == 2
    assert parity_degree_query(inst, (3, 1)) == 1
    assert inst.queries == 0
    with pytest.raises(ValueError):
        parity_degree_query(inst, (4, 0))
    with pytest.raises(ValueError):
        parity_degree_query(inst, (0, 2))


def test_neighbour_examples():
    zero = ParityInstance((0, 0, 0, 0))
    for i in range(1, 4):
        for b in (0, 1):
            assert parity_neighbour_query(zero, (i, b), 2) == (i + 1, b)
    inst = ParityInstance((1, 0))
    assert parity_neighbour_query(inst, (0, 0), 1) == (1, 1)
    assert inst.queries == 1
    with pytest.raises(IndexError):
        parity_neighbour_query(inst, (0, 0), 2)
    with pytest.raises(IndexError):
        parity_neighbour_query(inst, (1, 0), 3)


def test_every_neighbour_call_costs_one_query():
    inst = ParityInstance((1, 1, 0, 1, 0))
    for v in inst.vertices():
        for j in range(1, parity_degree_query(inst, v) + 1):
            before = inst.queries
            parity_neighbour_query(inst, v, j)
            assert inst.queries == before + 1


def test_connectivity_examples():
    assert parity_via_connectivity((0,)) == 0
    assert parity_via_connectivity((1,)) == 1
    assert parity_via_connectivity((1, 0)) == 1
    assert parity_via_connectivity((1, 1), solver=lambda g, s, t: False) == 0
    with pytest.raises(ValueError):
        ParityInstance(())
    with pytest.raises(ValueError):
        ParityInstance((0, 2))


@pytest.mark.parametrize("n", range(1, 11))
def test_exhaustive_parity(n):
    for x in bits(n):
        assert parity_via_connectivity(x, bfs_solver) == sum(x) % 2


@pytest.mark.parametrize("n", range(1, 9))
def test_oracle_matches_explicit_graph(n):
    for x in bits(n):
        inst = ParityInstance(x)
        adj = oracle_adjacency(inst)
        g = materialize(x)
        for v, nb in adj.items():
            ids = sorted(ParityInstance.vertex_id(u) for u in nb)
            assert tuple(ids) == g.neighbours(ParityInstance.vertex_id(v))
        assert sortedness_violations(ParityInstance(x)) == []


@given(st.lists(st.integers(0, 1), min_size=1, max_size=14))
def test_structure_is_two_paths(x):
    g = materialize(x)
    n = len(x)
    degs = g.degrees.tolist()
    ends = [ParityInstance.vertex_id(v) for v in [(0, 0), (0, 1), (n, 0), (n, 1)]]
    assert all(degs[v] == 1 for v in ends)
    assert all(d == 2 for v, d in enumerate(degs) if v not in ends)
    comps = components(g)
    assert len(comps) == 2 and all(len(c) == n + 1 for c in comps)
    assert len(explicit_edges(x)) == g.m == 2 * n
