"""Quantum walk oracles and their compositions from simpler queries.

All oracles act on the basis ``{(u, None)} + {(u, v) : v in N(u)}``, listed
vertex by vertex.  ``None`` plays the role of the |0> register (vertex 0 is a
real vertex).  An oracle is specified by its images of the ``(u, None)``
labels; the remaining columns of each vertex block are filled in by
:func:`~ustconlab.qsim.state.complete_block`.

The composed constructions (:func:`ow_via_array_queries`,
:func:`mh_u_from_components`) simulate their circuits register by register on
every zero-slice input.  Applying one of them to a state reruns the circuit
and charges the ledger with the coherent cost, i.e. the worst branch.
"""
from __future__ import annotations

from collections import Counter

import numpy as np

from ..graph import (DEGREE, INDEX, NEIGHBOUR, WALK_ORACLE, WEIGHTED_WALK_ORACLE,
                     Graph, QueryLedger, as_weighted, degree_query, index_query,
                     neighbour_query, unweighted)
from ..mh import MHGraph, mh_transform
from .state import Basis, StateVector, UnitaryAction, complete_block

ZERO = None


def oracle_basis(g: Graph) -> Basis:
    labels = []
    for u in range(g.n):
        labels.append((u, ZERO))
        labels.extend((u, v) for v in g.adjacency[u])
    return Basis(labels)


def _block(g, u):
    return [(u, ZERO)] + [(u, v) for v in g.adjacency[u]]


def _complete(g, basis, zero_columns):
    """Full column map from the zero-slice images of every vertex block."""
    columns = {}
    for u in range(g.n):
        block = _block(g, u)
        col = np.array([zero_columns[u].get(lab, 0.0) for lab in block], dtype=complex)
        images = complete_block(block, col)
        for lab, img in images.items():
            columns[lab] = {out: a for out, a in zip(block, img) if a != 0}
    return columns


def walk_amplitudes(wg, u) -> dict:
    """Zero-slice image of (u, None): amplitude sqrt(P_uv) on (u, v)."""
    g = wg.graph
    wu = wg.vertex_weight(u)
    return {(u, v): np.sqrt(float(wg.weight(u, v) / wu)) for v in g.adjacency[u]}


def weighted_ow_oracle(wg, kind: str = WEIGHTED_WALK_ORACLE) -> UnitaryAction:
    """|u>|0> -> sum_v sqrt(P_uv) |u>|v>, completed to a unitary."""
    wg = as_weighted(wg)
    g = wg.graph
    basis = oracle_basis(g)
    zero = {u: walk_amplitudes(wg, u) for u in range(g.n)}
    return UnitaryAction.from_columns(basis, _complete(g, basis, zero), "O_W", {kind: 1})


def ow_oracle(g: Graph) -> UnitaryAction:
    """Unweighted walk oracle: uniform superposition over the neighbours."""
    return weighted_ow_oracle(unweighted(g), kind=WALK_ORACLE)


class CircuitOracle(UnitaryAction):
    """Unitary whose zero slice is produced by simulating a circuit.

    ``circuit(u)`` returns ``(image, cost)`` for input ``(u, None)``, where
    ``image`` maps output labels to amplitudes and ``cost`` is the ledger
    use of that single branch.  Columns outside the zero slice come from
    the deterministic completion.  Every application is charged the
    coherent cost, the per-kind maximum over all branches.
    """

    def __init__(self, g: Graph, circuit, name: str):
        self.graph = g
        self.circuit = circuit
        basis = oracle_basis(g)
        zero, costs = {}, {}
        for u in range(g.n):
            zero[u], costs[u] = circuit(u)
        self.branch_costs = costs
        super().__init__(basis, UnitaryAction.from_columns(basis, _complete(g, basis, zero)).matrix,
                         name, self._coherent_cost(range(g.n)))

    def _coherent_cost(self, vertices) -> dict:
        worst = Counter()
        for u in vertices:
            for k, v in self.branch_costs[u].items():
                worst[k] = max(worst[k], v)
        return dict(worst)

    def apply(self, state: StateVector, ledger: QueryLedger | None = None) -> StateVector:
        if state.basis != self.basis:
            state = state.embed(self.basis)
        amps = state.amps
        zero_idx = self.basis.indices([(u, ZERO) for u in range(self.graph.n)])
        rest = amps.copy()
        rest[zero_idx] = 0
        out = self.matrix @ rest
        for u in np.flatnonzero(np.abs(amps[zero_idx]) > 0):
            image, _ = self.circuit(u)
            c = amps[zero_idx[u]]
            for lab, a in image.items():
                out[self.basis.index(lab)] += c * a
        self.charge(ledger)
        return StateVector(self.basis, out)


def _array_query_circuit(g: Graph):
    """The degree / Fourier / neighbour / inverse-index / inverse-degree chain.

    Registers are ``(u, d, j, v)``; ``j`` carries a 0-based Fourier index
    that addresses neighbour j+1.  ``None`` is an empty register.
    """

    def circuit(u):
        led = QueryLedger()
        # O_D: write d_u
        d = degree_query(g, u, led)
        state = {(u, d, 0, ZERO): 1.0 + 0j}
        # F_d on the index register
        state = {(u, d, j, ZERO): amp / np.sqrt(d)
                 for (u_, d_, _, _), amp in state.items() for j in range(d_)}
        # O_N: one coherent neighbour query, v <- v_{j+1}(u)
        branch = QueryLedger()
        new = {}
        for (u_, d_, j, _), amp in state.items():
            new[(u_, d_, j, neighbour_query(g, u_, j + 1, branch))] = amp
        state = new
        led.add(NEIGHBOUR, 1)
        # O_I^dag: clear j by recomputing it with binary search in each branch
        worst = 0
        new = {}
        for (u_, d_, j, v), amp in state.items():
            b = QueryLedger()
            i = index_query(g, u_, v, b)
            if i != j + 1:
                raise AssertionError("index register did not uncompute")
            worst = max(worst, b[NEIGHBOUR])
            new[(u_, d_, 0, v)] = amp
        state = new
        led.add(INDEX, 1)
        led.add(NEIGHBOUR, worst)
        # O_D^dag: clear d
        new = {}
        for (u_, d_, j, v), amp in state.items():
            if degree_query(g, u_) != d_:
                raise AssertionError("degree register did not uncompute")
            new[(u_, v)] = new.get((u_, v), 0) + amp
        led.add(DEGREE, 1)
        return new, {k: v for k, v in led.snapshot().items() if v}

    return circuit


def ow_via_array_queries(g: Graph) -> CircuitOracle:
    """Walk oracle built from degree, neighbour and index queries.

    Per application: 2 degree queries, 1 neighbour query, 1 index query
    whose binary search costs at most ceil(log2 d_max) + 1 neighbour queries.
    """
    return CircuitOracle(g, _array_query_circuit(g), "O_W[array]")


def _mh_circuit(mh: MHGraph):
    g = mh.source
    ow = ow_oracle(g)

    def circuit(x):
        lab = mh.label(x)
        led = QueryLedger()
        # registers: (A, A', xreg, yreg); A marks subdivision inputs
        a = 0 if lab[1] is None else 1
        state = {(a, 0, lab, (ZERO, ZERO)): 1.0 + 0j}
        if a == 0:
            u = lab[0]
            # O_W of G on |u>|0>
            image = ow.matrix[:, ow.basis.index((u, ZERO))].toarray().ravel()
            led.add(WALK_ORACLE, 1)
            state = {(0, 0, ow.basis.labels[k], (ZERO, ZERO)): amp
                     for k, amp in enumerate(image) if abs(amp) > 1e-15}
            # J: copy the edge into the second register, canonically ordered
            state = {(A, A2, (p, q), (min(p, q), max(p, q))): amp
                     for (A, A2, (p, q), _), amp in state.items()}
            # J': the edge register determines q given p, so erase q
            state = {(A, A2, (p, ZERO), y): amp for (A, A2, (p, q), y), amp in state.items()}
        else:
            u, v = lab
            du = degree_query(g, u, led)
            dv = degree_query(g, v, led)
            # step 1: rotate A' to sqrt(dv/(du+dv))|0> + sqrt(du/(du+dv))|1>
            c0 = np.sqrt(dv / (du + dv))
            c1 = np.sqrt(du / (du + dv))
            state = {(1, 0, lab, (ZERO, ZERO)): c0, (1, 1, lab, (ZERO, ZERO)): c1}
            degree_query(g, u, led)
            degree_query(g, v, led)
            # step 2: write x_u or x_v into the second register controlled on A'
            state = {(A, A2, xr, ((xr[0] if A2 == 0 else xr[1]), ZERO)): amp
                     for (A, A2, xr, _), amp in state.items()}
            # step 3: A' is 1 exactly when the second register holds x_v
            state = {(A, A2 ^ int(y[0] == xr[1]), xr, y): amp
                     for (A, A2, xr, y), amp in state.items()}
        # uncompute A from the first register
        out = {}
        for (A, A2, xr, y), amp in state.items():
            A ^= 0 if xr[1] is None else 1
            if A != 0 or A2 != 0:
                raise AssertionError("ancilla left in a non-zero state")
            xid, yid = mh.vertex(xr), mh.vertex(y)
            out[(xid, yid)] = out.get((xid, yid), 0) + amp
        return out, {k: v for k, v in led.snapshot().items() if v}

    return circuit


def mh_u_from_components(g: Graph, mh: MHGraph | None = None) -> CircuitOracle:
    """Weighted walk oracle of G' built from degree queries and O_W of G.

    Coherent cost per application: 4 degree queries and 1 call to O_W.
    """
    mh = mh or mh_transform(g)
    oracle = CircuitOracle(mh.weighted.graph, _mh_circuit(mh), "U[mh]")
    oracle.mh = mh
    return oracle
