"""Quantum walk search and the Metropolis-Hastings st-connectivity decider.

The search is the electric-network formulation of walk search.  The graph's
pair space gets one dangling "source" label at s and an out and an in "sink"
label at every marked vertex.  The walk operator

    U = (I - 2 Pi_in)(I - 2 Pi_out)

reflects about the normalised out-stars sum_v sqrt(W_uv)|u,v> and in-stars
sum_u sqrt(W_uv)|u,v> (plus the dangling labels).  When s is connected to a
marked vertex, |source> has a large overlap with the 1-eigenspace of U, and
that eigenvector carries a constant fraction of its weight on the marked
sinks.  When it is not, the 1-eigenspace component of |source> still lives
on the component of s and never touches a marked vertex.

One round runs phase estimation of U on |source> with
``ceil(log2 sqrt(C log C)) + 2`` bits, and on outcome 0 measures the pair
label and checks the vertex it names.  The walk is simulated only on the
connected component of s, so every outcome lies in that component.
"""
from __future__ import annotations

import math

import numpy as np

from .graph import (MARKED_CHECK, SZEGEDY_STEP, WEIGHTED_WALK_ORACLE, Graph, QueryLedger,
                    as_weighted)
from .mh import mh_transform
from .qsim.phase import MAX_BITS, zero_branch
from .qsim.state import StateVector
from .qsim.szegedy import reflection_walk
from .walks import component

#: source and sink weights are SINK_SCALE * W(G) / C_bound
SINK_SCALE = 0.25
DEFAULT_ROUNDS = 9
#: coherent cost of one application of U
STEP_COST = {SZEGEDY_STEP: 1, WEIGHTED_WALK_ORACLE: 4, MARKED_CHECK: 2}
SOURCE, SINK_OUT, SINK_IN = "source", "sink-out", "sink-in"


def precision_bits(C_bound: float) -> int:
    x = max(C_bound * math.log(max(C_bound, 1.0)), 1.0)
    return math.ceil(math.log2(math.sqrt(x))) + 2


def label_vertex(label) -> int:
    """Vertex named by a pair label: the first register, or the tagged vertex."""
    return label[1] if isinstance(label[0], str) else label[0]


class WalkSearch:
    """Precomputed search instance; :meth:`run` draws one execution.

    The outcome-0 branch of phase estimation does not depend on the trial,
    so it is computed once and every run only samples measurements.
    """

    def __init__(self, wg, s: int, is_marked, C_bound: float,
                 rounds: int = DEFAULT_ROUNDS, scale: float = SINK_SCALE):
        wg = as_weighted(wg)
        wg.graph.check_vertex(s)
        if not C_bound >= 1:
            raise ValueError("C_bound must be at least 1")
        self.wg = wg
        self.s = s
        self.is_marked = is_marked
        self.C_bound = float(C_bound)
        self.rounds = rounds
        self.bits = min(precision_bits(self.C_bound), MAX_BITS)
        self.comp = component(wg.graph, s)
        self._prepared = False
        self.scale = scale

    def _prepare(self):
        # the simulator's table of the marking oracle, restricted to valid labels in X_s
        marked = [v for v in sorted(self.comp) if v != self.s and self.is_marked(v)]
        weight = self.scale * float(self.wg.total_weight()) / self.C_bound
        extra_out = {self.s: [((SOURCE, self.s), weight)]}
        extra_in = {}
        for m in marked:
            extra_out.setdefault(m, []).append(((SINK_OUT, m), weight))
            extra_in[m] = [((SINK_IN, m), weight)]
        U = reflection_walk(self.wg, self.comp, extra_out, extra_in, name="U[search]")
        U.cost = dict(STEP_COST)
        self.U = U
        start = StateVector.basis_state(U.basis, (SOURCE, self.s))
        phi = zero_branch(U, start, self.bits)
        probs = np.abs(phi) ** 2
        self.p_zero = float(probs.sum())
        self._cdf = np.cumsum(probs / self.p_zero)
        self._cdf[-1] = 1.0
        self._vertices = np.array([label_vertex(l) for l in U.basis.labels], dtype=np.int64)
        marked_set = set(marked)
        self.p_marked = float(sum(p for p, v in zip(probs, self._vertices) if v in marked_set))
        self._prepared = True

    @property
    def success_per_round(self) -> float:
        if not self._prepared:
            self._prepare()
        return self.p_marked

    def run(self, rng: np.random.Generator, ledger: QueryLedger | None = None) -> int:
        """One execution of the search; returns the reported vertex."""
        if ledger is not None:
            ledger.add(MARKED_CHECK)
        if self.is_marked(self.s):
            return self.s
        if not self._prepared:
            self._prepare()
        N = 1 << self.bits
        for _ in range(self.rounds):
            self.U.charge(ledger, N - 1)
            if rng.random() >= self.p_zero:
                continue
            k = int(np.searchsorted(self._cdf, rng.random(), side="right"))
            v = int(self._vertices[k])
            if ledger is not None:
                ledger.add(MARKED_CHECK)
            if self.is_marked(v):
                return v
        return self.s


def quantum_walk_search(wg, s: int, is_marked, C_bound: float, rng: np.random.Generator,
                        ledger: QueryLedger | None = None, rounds: int = DEFAULT_ROUNDS) -> int:
    """Find a marked vertex reachable from s, or return an unmarked vertex.

    With probability at least 2/3 the result is marked whenever s is
    connected to a marked vertex and ``C_bound`` bounds the commute time.
    If no marked vertex is reachable the result is never marked.
    """
    return WalkSearch(wg, s, is_marked, C_bound, rounds).run(rng, ledger)


def mh_commute_bound(n: int) -> int:
    return 36 * n * n


class MHDecider:
    """The MH decider for fixed (g, s, t): walk search on G' for the target x_t."""

    def __init__(self, g: Graph, s: int, t: int, rounds: int = DEFAULT_ROUNDS,
                 C_bound: float | None = None):
        g.check_vertex(s)
        g.check_vertex(t)
        self.g, self.s, self.t = g, s, t
        self.mh = mh_transform(g)
        self.target = self.mh.original(t)
        self.C_bound = mh_commute_bound(g.n) if C_bound is None else C_bound
        self.search = None if s == t else WalkSearch(
            self.mh.weighted, self.mh.original(s), self._is_target, self.C_bound, rounds)

    def _is_target(self, x: int) -> bool:
        if not 0 <= x < self.mh.n:
            raise ValueError(f"marking oracle called on invalid label {x!r}")
        return x == self.target

    def run_vertex(self, rng: np.random.Generator, ledger: QueryLedger | None = None) -> int:
        if self.search is None:
            return self.target
        return self.search.run(rng, ledger)

    def run(self, rng: np.random.Generator, ledger: QueryLedger | None = None) -> str:
        return "connected" if self.run_vertex(rng, ledger) == self.target else "disconnected"


def ustcon_mh(g: Graph, s: int, t: int, rng: np.random.Generator,
              ledger: QueryLedger | None = None) -> str:
    """Decide st-connectivity with one-sided error using C = 36 n^2."""
    return MHDecider(g, s, t).run(rng, ledger)
