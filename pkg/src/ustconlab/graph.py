"""Graphs in the sorted adjacency array model.

Vertices are 0-indexed.  Neighbour indices handed to :func:`neighbour_query`
are 1-indexed, so ``neighbour_query(g, u, 1)`` is the smallest neighbour of u.
Every query goes through a :class:`QueryLedger` when one is supplied, which is
how the rest of the package measures "time".
"""
from __future__ import annotations

import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEGREE = "degree"
NEIGHBOUR = "neighbour"
INDEX = "index"
WALK_ORACLE = "walk-oracle"
WEIGHTED_WALK_ORACLE = "weighted-walk-oracle"
SZEGEDY_STEP = "szegedy-step"
CLASSICAL_STEP = "classical-step"
WSET_OP = "wset-op"
MARKED_CHECK = "marked-check"

LEDGER_KINDS = (DEGREE, NEIGHBOUR, INDEX, WALK_ORACLE, WEIGHTED_WALK_ORACLE,
                SZEGEDY_STEP, CLASSICAL_STEP, WSET_OP, MARKED_CHECK)


class QueryLedger:
    """Monotone per-kind query counters.

    Counts only ever go up during a run.  :meth:`reset` exists for experiment
    boundaries.
    """

    def __init__(self):
        self._counts = Counter()

    def add(self, kind: str, k: int = 1) -> None:
        if kind not in LEDGER_KINDS:
            raise KeyError(f"unknown ledger kind {kind!r}")
        if k < 0:
            raise ValueError("ledger counts cannot decrease")
        self._counts[kind] += int(k)

    def merge(self, costs, times: int = 1) -> None:
        """Add ``times`` copies of a ``{kind: count}`` mapping."""
        for kind, k in costs.items():
            self.add(kind, k * times)

    def __getitem__(self, kind: str) -> int:
        return self._counts[kind]

    def snapshot(self) -> dict:
        return {kind: self._counts[kind] for kind in LEDGER_KINDS}

    def reset(self) -> None:
        self._counts.clear()

    def __repr__(self):
        inner = ", ".join(f"{k}={v}" for k, v in self.snapshot().items() if v)
        return f"QueryLedger({inner})"


def _charge(ledger, kind, k=1):
    if ledger is not None:
        ledger.add(kind, k)


@dataclass(frozen=True, eq=True)
class Graph:
    """Simple undirected graph with ascending neighbour arrays.

    Use :func:`build_graph` rather than the constructor; it checks the
    invariants and canonicalises the input.
    """

    n: int
    adjacency: tuple

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def neighbours(self, u: int) -> tuple:
        return self.adjacency[u]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def edge_list(self) -> tuple:
        """Edges (u, v) with u < v in lexicographic order."""
        return tuple((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    def edges(self):
        return self.edge_list

    def has_edge(self, u: int, v: int) -> bool:
        adj = self.adjacency[u]
        i = np.searchsorted(adj, v)
        return i < len(adj) and adj[i] == v

    def check_vertex(self, u) -> None:
        if not isinstance(u, (int, np.integer)) or not 0 <= u < self.n:
            raise ValueError(f"invalid vertex {u!r} for graph with n={self.n}")


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a :class:`Graph` from an edge list.

    Duplicate edges and orientation flips collapse.  Self-loops, out of
    range endpoints and isolated vertices raise ``ValueError``.
    """
    if n < 1:
        raise ValueError("graph needs at least one vertex")
    nbrs = [set() for _ in range(n)]
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    isolated = [u for u in range(n) if not nbrs[u]]
    if isolated:
        raise ValueError(f"isolated vertices {isolated[:5]} (every vertex needs degree >= 1)")
    return Graph(n, tuple(tuple(sorted(s)) for s in nbrs))


# ---------------------------------------------------------------- queries

def degree_query(g: Graph, u: int, ledger: QueryLedger | None = None) -> int:
    g.check_vertex(u)
    _charge(ledger, DEGREE)
    return len(g.adjacency[u])


def neighbour_query(g: Graph, u: int, i: int, ledger: QueryLedger | None = None) -> int:
    """Return the i-th smallest neighbour of u (``1 <= i <= d_u``)."""
    g.check_vertex(u)
    d = len(g.adjacency[u])
    if not 1 <= i <= d:
        raise IndexError(f"neighbour index {i} out of range 1..{d} at vertex {u}")
    _charge(ledger, NEIGHBOUR)
    return g.adjacency[u][i - 1]


def index_query(g: Graph, u: int, v: int, ledger: QueryLedger | None = None) -> int:
    """Return i with ``neighbour_query(g, u, i) == v`` by binary search.

    Uses at most ``ceil(log2 d_u) + 1`` neighbour queries: the search loop
    halves ``[lo, hi]`` until one candidate remains and a final query
    confirms it.  The degree d_u is read from the structure directly since
    an index query is handed the degree register.
    """
    g.check_vertex(u)
    g.check_vertex(v)
    d = len(g.adjacency[u])
    _charge(ledger, INDEX)
    lo, hi = 1, d
    while lo < hi:
        mid = (lo + hi) // 2
        if neighbour_query(g, u, mid, ledger) < v:
            lo = mid + 1
        else:
            hi = mid
    if neighbour_query(g, u, lo, ledger) != v:
        raise ValueError(f"{v} is not a neighbour of {u}")
    return lo


def index_query_budget(d: int) -> int:
    return math.ceil(math.log2(d)) + 1 if d > 1 else 1


# ---------------------------------------------------------------- weighted graphs

@dataclass(frozen=True)
class WeightedGraph:
    """A graph with positive rational edge weights.

    ``weights`` is aligned with ``graph.edge_list``.  ``denominator`` is a
    declared common denominator: every ``weight * denominator`` must be an
    integer.  If ``bound`` is given, those integers must not exceed it.
    """

    graph: Graph
    weights: tuple
    denominator: int = 1
    bound: int | None = None
    _wmap: dict = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        edges = self.graph.edge_list
        if len(self.weights) != len(edges):
            raise ValueError("one weight per edge required")
        wmap = {}
        for (u, v), w in zip(edges, self.weights):
            if not isinstance(w, Fraction):
                raise TypeError("weights must be Fractions")
            if w <= 0:
                raise ValueError(f"weight of ({u}, {v}) must be positive")
            scaled = w * self.denominator
            if scaled.denominator != 1:
                raise ValueError(f"weight {w} is not an integer multiple of 1/{self.denominator}")
            if self.bound is not None and scaled > self.bound:
                raise ValueError(f"scaled weight {scaled} exceeds declared bound {self.bound}")
            wmap[(u, v)] = w
        object.__setattr__(self, "_wmap", wmap)

    @property
    def n(self) -> int:
        return self.graph.n

    def weight(self, u: int, v: int) -> Fraction:
        key = (u, v) if u < v else (v, u)
        try:
            return self._wmap[key]
        except KeyError:
            raise ValueError(f"({u}, {v}) is not an edge") from None

    @cached_property
    def vertex_weights(self) -> tuple:
        """Exact w_u for every vertex."""
        w = [Fraction(0)] * self.n
        for (u, v), x in self._wmap.items():
            w[u] += x
            w[v] += x
        return tuple(w)

    def vertex_weight(self, u: int) -> Fraction:
        return self.vertex_weights[u]

    def total_weight(self, vertices=None) -> Fraction:
        """W(G), or the summed vertex weight of ``vertices``."""
        if vertices is None:
            return sum(self.vertex_weights, Fraction(0))
        return sum((self.vertex_weights[u] for u in vertices), Fraction(0))

    @cached_property
    def vertex_denominator(self) -> int:
        """Least common denominator of the vertex weights."""
        return math.lcm(*(w.denominator for w in self.vertex_weights))

    @cached_property
    def csr(self):
        """``(indptr, indices, weights)`` as numpy arrays, rows in adjacency order."""
        adj = self.graph.adjacency
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in adj])
        indices = np.fromiter((v for a in adj for v in a), dtype=np.int64, count=indptr[-1])
        w = np.fromiter((float(self.weight(u, v)) for u, a in enumerate(adj) for v in a),
                        dtype=float, count=indptr[-1])
        return indptr, indices, w

    @cached_property
    def vertex_weights_float(self) -> np.ndarray:
        return np.array([float(w) for w in self.vertex_weights])


def unweighted(g: Graph) -> WeightedGraph:
    return WeightedGraph(g, tuple(Fraction(1) for _ in g.edge_list))


def weighted_graph(g: Graph, weights, bound: int | None = None) -> WeightedGraph:
    """Attach weights given as a mapping ``{(u, v): w}`` or a sequence aligned with edges."""
    if isinstance(weights, dict):
        ws = []
        for u, v in g.edge_list:
            w = weights.get((u, v), weights.get((v, u)))
            if w is None:
                raise ValueError(f"missing weight for edge ({u}, {v})")
            ws.append(Fraction(w))
    else:
        ws = [Fraction(w) for w in weights]
    den = math.lcm(*(w.denominator for w in ws)) if ws else 1
    return WeightedGraph(g, tuple(ws), den, bound)


def as_weighted(g) -> WeightedGraph:
    if isinstance(g, WeightedGraph):
        return g
    return unweighted(g)


# ---------------------------------------------------------------- families

def path(n: int) -> Graph:
    _need(n, 2)
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    _need(n, 3)
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(n: int) -> Graph:
    """Star on n vertices with centre 0."""
    _need(n, 2)
    return build_graph(n, [(0, i) for i in range(1, n)])


def complete(n: int) -> Graph:
    _need(n, 2)
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def lollipop(clique: int, path: int) -> Graph:
    """Clique on 0..clique-1 with a tail of ``path`` vertices hanging off vertex clique-1."""
    if clique < 1 or path < 0:
        raise ValueError("lollipop needs clique >= 1 and path >= 0")
    n = clique + path
    _need(n, 2)
    edges = [(i, j) for i in range(clique) for j in range(i + 1, clique)]
    edges += [(clique - 1 + k, clique + k) for k in range(path)]
    return build_graph(n, edges)


def two_component(first: Graph, second: Graph) -> Graph:
    """Disjoint union; the second graph's vertices are shifted by ``first.n``."""
    off = first.n
    edges = list(first.edge_list) + [(u + off, v + off) for u, v in second.edge_list]
    return build_graph(first.n + second.n, edges)


def er_connected(n: int, p: float, seed: int, max_tries: int = 1000) -> Graph:
    """Erdos-Renyi G(n, p) conditioned on connectivity by resampling."""
    _need(n, 2)
    if not 0 < p <= 1:
        raise ValueError("edge probability must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < p
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
        if _is_connected(n, edges):
            return build_graph(n, edges)
    raise RuntimeError(f"no connected G({n}, {p}) sample in {max_tries} tries")


def _is_connected(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def _need(n, lo):
    if n < lo:
        raise ValueError(f"family needs n >= {lo}, got {n}")


FAMILIES = ("path", "cycle", "star", "complete", "lollipop", "two_component", "er_connected")


def generate_family(name: str, **params) -> Graph:
    """Dispatch to a family generator by name.

    ``two_component`` takes ``first`` and ``second``, each either a Graph or
    a ``(name, params)`` pair.
    """
    if name == "path":
        return path(params["n"])
    if name == "cycle":
        return cycle(params["n"])
    if name == "star":
        return star(params["n"])
    if name == "complete":
        return complete(params["n"])
    if name == "lollipop":
        return lollipop(params["clique"], params["path"])
    if name == "er_connected":
        return er_connected(params["n"], params["p"], params["seed"],
                            params.get("max_tries", 1000))
    if name == "two_component":
        parts = []
        for key in ("first", "second"):
            part = params[key]
            if not isinstance(part, Graph):
                sub_name, sub_params = part
                part = generate_family(sub_name, **sub_params)
            parts.append(part)
        return two_component(*parts)
    raise ValueError(f"unknown family {name!r}; expected one of {FAMILIES}")


# ---------------------------------------------------------------- edge-list files

def _weight_token(w: Fraction) -> str:
    return f"{w.numerator}/{w.denominator}"


def format_edge_list(g) -> str:
    """Serialise a Graph or WeightedGraph; edges are written in sorted order."""
    wg = g if isinstance(g, WeightedGraph) else None
    graph = wg.graph if wg else g
    out = io.StringIO()
    out.write(f"{graph.n} {graph.m}\n")
    for k, (u, v) in enumerate(graph.edge_list):
        if wg is None:
            out.write(f"{u} {v}\n")
        else:
            out.write(f"{u} {v} {_weight_token(wg.weights[k])}\n")
    return out.getvalue()


def parse_edge_list(text: str):
    """Parse the edge-list format.  Returns a WeightedGraph if any line has a weight."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 2:
        raise ValueError("first line must be 'n m'")
    n, m = int(lines[0][0]), int(lines[0][1])
    body = lines[1:]
    if len(body) != m:
        raise ValueError(f"header declares {m} edges but {len(body)} follow")
    edges, weights = [], {}
    for row in body:
        if len(row) not in (2, 3):
            raise ValueError(f"bad edge line {' '.join(row)!r}")
        u, v = int(row[0]), int(row[1])
        edges.append((u, v))
        if len(row) == 3:
            weights[(min(u, v), max(u, v))] = Fraction(row[2])
    g = build_graph(n, edges)
    if not weights:
        return g
    if len(weights) != g.m:
        raise ValueError("either all edges or none carry weights")
    return weighted_graph(g, weights)


def write_edge_list(g, path_or_file) -> None:
    text = format_edge_list(g)
    if isinstance(path_or_file, (str, os.PathLike)):
        with open(path_or_file, "w", newline="\n") as fh:
            fh.write(text)
    else:
        path_or_file.write(text)


def read_edge_list(path_or_file):
    if isinstance(path_or_file, (str, os.PathLike)):
        with open(path_or_file) as fh:
            return parse_edge_list(fh.read())
    return parse_edge_list(path_or_file.read())
