"""The Metropolis-Hastings subdivision G -> G'.

Every edge {u, v} of G is split by a new vertex x_{u,v}.  The half-edge
{x_u, x_{u,v}} gets weight 1/d_u, so each original vertex has weight exactly
1 and a two-step walk from an original vertex proposes a uniform neighbour
and accepts it with probability 1/(1 + d_v/d_u).

Vertex ids of G': originals keep their ids 0..n-1, subdivision vertices follow
in lexicographic (u, v) order.  The label of an original vertex is
``(u, None)`` and of a subdivision vertex ``(u, v)`` with u < v.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .graph import Graph, WeightedGraph, build_graph, weighted_graph
from .walks import (TransitionMatrix, components, hitting_time_matrix,
                    transition_matrix)

#: above this many G' vertices, hitting times come from the collapsed chain
DIRECT_SOLVE_LIMIT = 1500


@dataclass(frozen=True)
class MHGraph:
    source: Graph
    weighted: WeightedGraph

    @property
    def n_original(self) -> int:
        return self.source.n

    @property
    def n(self) -> int:
        return self.weighted.n

    def original(self, u: int) -> int:
        self.source.check_vertex(u)
        return u

    def subdivision(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self.source.n + self._edge_index[key]
        except KeyError:
            raise ValueError(f"({u}, {v}) is not an edge") from None

    @cached_property
    def _edge_index(self) -> dict:
        return {e: k for k, e in enumerate(self.source.edge_list)}

    def label(self, x: int) -> tuple:
        """``(u, None)`` for originals, ``(u, v)`` with u < v for subdivisions."""
        if x < self.source.n:
            return (x, None)
        return self.source.edge_list[x - self.source.n]

    def vertex(self, label) -> int:
        u, v = label
        return self.original(u) if v is None else self.subdivision(u, v)

    @property
    def labels(self) -> list:
        return [self.label(x) for x in range(self.n)]


def mh_transform(g: Graph) -> MHGraph:
    n = g.n
    edges, weights = [], {}
    for k, (u, v) in enumerate(g.edge_list):
        x = n + k
        edges += [(u, x), (v, x)]
        weights[(u, x)] = Fraction(1, g.degree(u))
        weights[(v, x)] = Fraction(1, g.degree(v))
    gp = build_graph(n + g.m, edges)
    return MHGraph(g, weighted_graph(gp, weights))


def contract(mh: MHGraph) -> Graph:
    """Forget weights and contract the degree-2 subdivision vertices."""
    gp = mh.weighted.graph
    n = mh.n_original
    edges = []
    for x in range(n, gp.n):
        a, b = gp.adjacency[x]
        edges.append((a, b))
    return build_graph(n, edges)


def collapsed_walk(g: Graph, exact: bool = False) -> TransitionMatrix:
    """Two G' steps from an original vertex, as a lazy chain on X.

    Q[u, v] = 1/(d_u + d_v) on edges, self-loop mass on the diagonal.
    """
    n = g.n
    d = g.degrees
    if exact:
        Q = np.full((n, n), Fraction(0), dtype=object)
        for u, v in g.edge_list:
            Q[u, v] = Q[v, u] = Fraction(1, int(d[u] + d[v]))
        for u in range(n):
            Q[u, u] = 1 - sum(Q[u, v] for v in g.adjacency[u])
        return TransitionMatrix(Q, g)
    Q = np.zeros((n, n))
    for u, v in g.edge_list:
        Q[u, v] = Q[v, u] = 1.0 / (d[u] + d[v])
    Q[np.arange(n), np.arange(n)] = 1.0 - Q.sum(axis=1)
    return TransitionMatrix(Q, g)


def acceptance_probability(du: int, dv: int) -> Fraction:
    return 1 / (1 + Fraction(dv, du))


@dataclass(frozen=True)
class MHHittingReport:
    max_hitting: float
    bound: int
    passed: bool
    pair: tuple
    method: str


def original_hitting_times(g: Graph, method: str = "auto") -> np.ndarray:
    """H[u, v] = H_{x_u, x_v}(G') for original vertices, inf across components.

    ``method="direct"`` solves on G' itself.  ``"collapsed"`` uses that a
    walk on G' started at x_u sits on original vertices exactly at even
    times, so H_{x_u,x_v}(G') = 2 H_{u,v}(Q) for the collapsed chain Q.
    ``"auto"`` picks direct for small G'.
    """
    if method == "auto":
        method = "direct" if g.n + g.m <= DIRECT_SOLVE_LIMIT else "collapsed"
    if method == "direct":
        mh = mh_transform(g)
        return hitting_time_matrix(mh.weighted, range(g.n))
    if method != "collapsed":
        raise ValueError(f"unknown method {method!r}")
    Q = collapsed_walk(g).matrix
    H = np.full((g.n, g.n), np.inf)
    for comp in components(g):
        idx = np.asarray(comp)
        k = idx.size
        Qc = Q[np.ix_(idx, idx)]
        pi = np.full(k, 1.0 / k)  # uniform: Q is symmetric
        Z = np.linalg.inv(np.eye(k) - Qc + pi[None, :])
        Hc = (np.diag(Z)[None, :] - Z) / pi[None, :]
        np.fill_diagonal(Hc, 0.0)
        H[np.ix_(idx, idx)] = 2.0 * Hc
    return H


def verify_mh_hitting(g: Graph, method: str = "auto") -> MHHittingReport:
    """Largest connected-pair hitting time on G' against the 18 n^2 bound."""
    if method == "auto":
        method = "direct" if g.n + g.m <= DIRECT_SOLVE_LIMIT else "collapsed"
    H = original_hitting_times(g, method)
    finite = np.where(np.isfinite(H), H, -np.inf)
    u, v = np.unravel_index(int(np.argmax(finite)), H.shape)
    worst = float(finite[u, v])
    bound = 18 * g.n * g.n
    return MHHittingReport(worst, bound, worst <= bound, (int(u), int(v)), method)


def unweighted_max_hitting(g: Graph) -> float:
    H = hitting_time_matrix(g)
    return float(np.where(np.isfinite(H), H, -np.inf).max())
