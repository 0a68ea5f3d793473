"""Parity of a bit string as an st-connectivity question.

For x of length n the graph has vertices (i, b), 0 <= i <= n, b in {0, 1}.
Column i is joined to column i+1 by the edges (i, b) - (i+1, b xor x_i), so
the graph is two disjoint paths and s = (0, 0) reaches t = (n, 1) exactly when
the parity of x is 1.  Neighbour queries cost one query to x, degree queries
none.  Vertices are ordered lexicographically, so (i, b) has id 2i + b.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, build_graph
from .walks import connected_oracle


@dataclass
class ParityInstance:
    x: tuple
    queries: int = field(default=0, compare=False)

    def __post_init__(self):
        self.x = tuple(int(b) for b in self.x)
        if not self.x or any(b not in (0, 1) for b in self.x):
            raise ValueError("x must be a nonempty bit string")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def s(self) -> tuple:
        return (0, 0)

    @property
    def t(self) -> tuple:
        return (self.n, 1)

    def query(self, i: int) -> int:
        """O_x: one bit of the input, counted."""
        self.queries += 1
        return self.x[i]

    def vertices(self) -> list:
        return [(i, b) for i in range(self.n + 1) for b in (0, 1)]

    def check_vertex(self, v) -> None:
        i, b = v
        if not (0 <= i <= self.n and b in (0, 1)):
            raise ValueError(f"invalid vertex {v!r}")

    @staticmethod
    def vertex_id(v) -> int:
        return 2 * v[0] + v[1]


def parity_degree_query(inst: ParityInstance, v) -> int:
    inst.check_vertex(v)
    return 1 if v[0] in (0, inst.n) else 2


def parity_neighbour_query(inst: ParityInstance, v, j: int):
    """j = 1 is the edge to column i-1 (or the only edge of an endpoint), j = 2 to column i+1."""
    inst.check_vertex(v)
    i, b = v
    d = parity_degree_query(inst, v)
    if not 1 <= j <= d:
        raise IndexError(f"neighbour index {j} out of range at {v}")
    if i == 0:
        return (1, b ^ inst.query(0))
    if i == inst.n or j == 1:
        return (i - 1, b ^ inst.query(i - 1))
    return (i + 1, b ^ inst.query(i))


def explicit_edges(x) -> list:
    """Edges written straight from the construction rule."""
    return [((i, b), (i + 1, b ^ int(x[i]))) for i in range(len(x)) for b in (0, 1)]


def materialize(x) -> Graph:
    inst = ParityInstance(tuple(x))
    return build_graph(2 * (inst.n + 1), [(ParityInstance.vertex_id(u), ParityInstance.vertex_id(v))
                                         for u, v in explicit_edges(inst.x)])


def oracle_adjacency(inst: ParityInstance) -> dict:
    """Adjacency lists read through the degree and neighbour queries."""
    adj = {}
    for v in inst.vertices():
        d = parity_degree_query(inst, v)
        adj[v] = [parity_neighbour_query(inst, v, j) for j in range(1, d + 1)]
    return adj


def sortedness_violations(inst: ParityInstance) -> list:
    """Vertices whose oracle neighbour numbering is not lexicographically ascending."""
    return [v for v, nb in oracle_adjacency(inst).items() if nb != sorted(nb)]


def bfs_solver(g: Graph, s: int, t: int) -> str:
    return "connected" if connected_oracle(g, s, t) else "disconnected"


def parity_via_connectivity(x, solver=bfs_solver) -> int:
    """1 iff the solver reports s and t connected on the materialised graph."""
    inst = ParityInstance(tuple(x))
    g = materialize(inst.x)
    answer = solver(g, ParityInstance.vertex_id(inst.s), ParityInstance.vertex_id(inst.t))
    if isinstance(answer, bool):
        return int(answer)
    return 1 if answer == "connected" else 0
