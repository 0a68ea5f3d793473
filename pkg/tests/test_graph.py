import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ustconlab.graph import (QueryLedger, build_graph, complete, cycle, degree_query, er_connected,
                             format_edge_list, generate_family, index_query, index_query_budget,
                             lollipop, neighbour_query, parse_edge_list, path, read_edge_list, star,
                             two_component, unweighted, weighted_graph, write_edge_list,
                             NEIGHBOUR, INDEX, DEGREE)
from ustconlab.walks import connected_oracle


def triangle():
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@st.composite
def graphs(draw, max_n=12):
    """Random graphs without isolated vertices."""
    n = draw(st.integers(2, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.sets(st.sampled_from(pairs), min_size=1))
    edges = set(chosen)
    covered = {u for e in edges for u in e}
    for u in range(n):
        if u not in covered:
            edges.add((u, (u + 1) % n) if u + 1 < n else (u - 1, u))
    return build_graph(n, sorted(edges))


def test_build_examples():
    g = build_graph(2, [(0, 1)])
    assert g.adjacency == ((1,), (0,))
    t = triangle()
    assert all(t.degree(u) == 2 for u in range(3))
    d = build_graph(3, [(0, 1), (1, 0), (1, 2)])
    assert d.m == 2


def test_build_errors():
    with pytest.raises(ValueError):
        build_graph(2, [(0, 0), (0, 1)])
    with pytest.raises(ValueError):
        build_graph(3, [(0, 1)])
    with pytest.raises(ValueError):
        build_graph(2, [(0, 2)])


@given(graphs())
def test_adjacency_invariants(g):
    for u in range(g.n):
        nb = g.neighbours(u)
        assert list(nb) == sorted(set(nb))
        assert u not in nb
        assert len(nb) >= 1
        for v in nb:
            assert u in g.neighbours(v)
    assert g.m == sum(len(a) for a in g.adjacency) // 2


def test_degree_examples():
    assert degree_query(triangle(), 0) == 2
    assert degree_query(star(5), 0) == 4
    assert degree_query(path(4), 0) == 1
    with pytest.raises(ValueError):
        degree_query(path(4), 4)


def test_neighbour_examples():
    t = triangle()
    assert neighbour_query(t, 0, 1) == 1
    assert neighbour_query(t, 0, 2) == 2
    assert neighbour_query(path(3), 1, 2) == 2
    assert neighbour_query(star(4), 0, 3) == 3
    with pytest.raises(IndexError):
        neighbour_query(t, 0, 3)
    with pytest.raises(IndexError):
        neighbour_query(t, 0, 0)


def test_ledger_counts_queries():
    led = QueryLedger()
    degree_query(triangle(), 0, led)
    neighbour_query(triangle(), 0, 1, led)
    assert led[DEGREE] == 1 and led[NEIGHBOUR] == 1
    with pytest.raises(KeyError):
        led.add("bogus")
    with pytest.raises(ValueError):
        led.add(DEGREE, -1)


@pytest.mark.parametrize("g,u,v,want,budget", [
    (triangle(), 0, 2, 2, 2),
    (star(9), 0, 5, 5, 4),
    (path(2), 0, 1, 1, 1),
])
def test_index_examples(g, u, v, want, budget):
    led = QueryLedger()
    assert index_query(g, u, v, led) == want
    assert led[NEIGHBOUR] <= budget
    assert led[INDEX] == 1


def test_index_not_neighbour():
    with pytest.raises(ValueError):
        index_query(path(4), 0, 3)


@given(graphs(max_n=20))
@settings(max_examples=50)
def test_index_budget_property(g):
    for u in range(g.n):
        for i, v in enumerate(g.neighbours(u), start=1):
            led = QueryLedger()
            assert index_query(g, u, v, led) == i
            assert led[NEIGHBOUR] <= index_query_budget(g.degree(u))
            assert led[NEIGHBOUR] <= math.ceil(math.log2(max(g.degree(u), 1))) + 1


def test_family_examples():
    k = complete(4)
    assert k.m == 6 and set(k.degrees.tolist()) == {3}
    lp = lollipop(4, 3)
    assert (lp.n, lp.m) == (7, 9)
    tc = two_component(path(3), path(3))
    for a in range(3):
        for b in range(3, 6):
            assert not connected_oracle(tc, a, b)
    for bad in (lambda: path(1), lambda: complete(1), lambda: cycle(2), lambda: star(1)):
        with pytest.raises(ValueError):
            bad()


def test_generate_family_dispatch():
    assert generate_family("path", n=5).m == 4
    g = generate_family("two_component", first=("cycle", {"n": 3}), second=path(2))
    assert g.n == 5 and g.m == 4
    with pytest.raises(ValueError):
        generate_family("hypercube", n=4)


def test_er_connected_seeded():
    a = er_connected(20, 0.2, 7)
    b = er_connected(20, 0.2, 7)
    assert a == b
    assert connected_oracle(a, 0, 19)


def test_weighted_graph():
    g = path(3)
    wg = weighted_graph(g, {(0, 1): 1, (1, 2): 3})
    assert wg.weight(2, 1) == 3
    assert wg.vertex_weight(1) == 4
    assert wg.total_weight() == 8
    with pytest.raises(ValueError):
        weighted_graph(g, {(0, 1): 1, (1, 2): 0})
    with pytest.raises(ValueError):
        weighted_graph(g, {(0, 1): 1})
    assert unweighted(g).total_weight() == 2 * g.m


def test_weight_bound_enforced():
    with pytest.raises(ValueError):
        weighted_graph(path(2), {(0, 1): 10 ** 9}, bound=100)


def test_edge_list_roundtrip(tmp_path):
    g = lollipop(4, 3)
    assert parse_edge_list(format_edge_list(g)) == g
    wg = weighted_graph(path(3), {(0, 1): Fraction(1, 2), (1, 2): 3})
    back = parse_edge_list(format_edge_list(wg))
    assert back.weight(0, 1) == Fraction(1, 2) and back.weight(1, 2) == 3
    f = tmp_path / "g.txt"
    write_edge_list(g, f)
    assert read_edge_list(f) == g
    with pytest.raises(ValueError):
        parse_edge_list("3 2\n0 1\n")


@given(graphs())
def test_edge_list_roundtrip_property(g):
    assert parse_edge_list(format_edge_list(g)) == g


def test_csr_matches_weights():
    wg = weighted_graph(path(3), {(0, 1): 1, (1, 2): 3})
    indptr, indices, w = wg.csr
    assert indptr.tolist() == [0, 1, 3, 4]
    assert indices.tolist() == [1, 0, 2, 1]
    assert np.allclose(w, [1, 1, 3, 3])
