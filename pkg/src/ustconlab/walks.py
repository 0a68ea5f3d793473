"""Exact random-walk analytics and seeded walk simulation.

Everything here is classical.  Linear systems are solved densely per
connected component (hitting times) with numpy/scipy LU factorisations.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .graph import CLASSICAL_STEP, Graph, QueryLedger, WeightedGraph, as_weighted

BIPARTITE_TOL = 1e-10


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic P with a reference to the graph it came from.

    ``matrix`` is a float array, or an object array of Fractions when the
    matrix was built with ``exact=True``.
    """

    matrix: np.ndarray
    source: object

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def exact(self) -> bool:
        return self.matrix.dtype == object

    def as_float(self) -> np.ndarray:
        return self.matrix.astype(float) if self.exact else self.matrix


class Distribution:
    """Probability vector over ``range(n)``."""

    def __init__(self, probs, tol: float = 1e-12):
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1:
            raise ValueError("distribution must be a vector")
        if (p < -tol).any():
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > max(tol, 1e-12 * p.size):
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        self.probs = np.clip(p, 0.0, None)

    def __len__(self):
        return self.probs.size

    def __getitem__(self, u):
        return self.probs[u]

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def mass(self, vertices) -> float:
        return float(self.probs[list(vertices)].sum())

    def restrict(self, vertices) -> "Distribution":
        """Normalised restriction to ``vertices``."""
        idx = np.asarray(sorted(set(vertices)), dtype=np.int64)
        total = self.probs[idx].sum()
        if total <= 0:
            raise ValueError("restriction to a zero-mass set")
        q = np.zeros_like(self.probs)
        q[idx] = self.probs[idx] / total
        return Distribution(q)

    @property
    def pi_min(self) -> float:
        return float(self.probs[self.probs > 0].min())

    def __repr__(self):
        return f"Distribution({np.array2string(self.probs, precision=4)})"


def point_mass(n: int, u: int) -> Distribution:
    p = np.zeros(n)
    p[u] = 1.0
    return Distribution(p)


def tv_distance(a, b) -> float:
    pa = a.probs if isinstance(a, Distribution) else np.asarray(a, dtype=float)
    pb = b.probs if isinstance(b, Distribution) else np.asarray(b, dtype=float)
    if pa.shape != pb.shape:
        raise ValueError("distributions have different lengths")
    return 0.5 * float(np.abs(pa - pb).sum())


# ---------------------------------------------------------------- matrices

def transition_matrix(wg, exact: bool = False) -> TransitionMatrix:
    """P_{u,v} = W_{u,v} / w_u."""
    wg = as_weighted(wg)
    n = wg.n
    if exact:
        P = np.full((n, n), Fraction(0), dtype=object)
        for (u, v), w in zip(wg.graph.edge_list, wg.weights):
            P[u, v] = w / wg.vertex_weights[u]
            P[v, u] = w / wg.vertex_weights[v]
        return TransitionMatrix(P, wg)
    indptr, indices, w = wg.csr
    P = np.zeros((n, n))
    rows = np.repeat(np.arange(n), np.diff(indptr))
    P[rows, indices] = w / wg.vertex_weights_float[rows]
    return TransitionMatrix(P, wg)


def transition_sparse(wg):
    import scipy.sparse as sp

    wg = as_weighted(wg)
    indptr, indices, w = wg.csr
    rows = np.repeat(np.arange(wg.n), np.diff(indptr))
    return sp.csr_matrix((w / wg.vertex_weights_float[rows], indices, indptr),
                         shape=(wg.n, wg.n))


def stationary_distribution(wg) -> Distribution:
    """pi(u) = w_u / W(G) over the whole vertex set."""
    wg = as_weighted(wg)
    w = wg.vertex_weights_float
    return Distribution(w / w.sum())


def stationary_exact(wg) -> tuple:
    wg = as_weighted(wg)
    total = wg.total_weight()
    return tuple(w / total for w in wg.vertex_weights)


# ---------------------------------------------------------------- connectivity

def component(g, s: int) -> frozenset:
    """Vertex set of the connected component containing s, by BFS."""
    g = g.graph if isinstance(g, WeightedGraph) else g
    g.check_vertex(s)
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return frozenset(seen)


def components(g) -> list:
    """All components as sorted tuples, ordered by smallest vertex."""
    g = g.graph if isinstance(g, WeightedGraph) else g
    done = np.zeros(g.n, dtype=bool)
    out = []
    for u in range(g.n):
        if not done[u]:
            comp = tuple(sorted(component(g, u)))
            done[list(comp)] = True
            out.append(comp)
    return out


def connected_oracle(g, s: int, t: int) -> bool:
    g = g.graph if isinstance(g, WeightedGraph) else g
    g.check_vertex(t)
    return t in component(g, s)


def is_connected(g) -> bool:
    g = g.graph if isinstance(g, WeightedGraph) else g
    return len(component(g, 0)) == g.n


# ---------------------------------------------------------------- spectra

def _symmetrized(wg):
    P = transition_matrix(wg).matrix
    pi = stationary_distribution(wg).probs
    r = np.sqrt(pi)
    return (r[:, None] * P) / r[None, :]


def spectrum(wg) -> np.ndarray:
    """Eigenvalues of P in descending order, via the pi-symmetrised matrix."""
    A = _symmetrized(as_weighted(wg))
    A = 0.5 * (A + A.T)
    return np.linalg.eigvalsh(A)[::-1]


def spectral_gap(wg) -> float:
    """Absolute spectral gap min(1 - lambda_2, 1 + lambda_n) of a connected graph.

    Bipartite graphs return exactly 0.
    """
    wg = as_weighted(wg)
    if not is_connected(wg.graph):
        raise ValueError("spectral gap needs a connected graph; pass a single component")
    lam = spectrum(wg)
    if wg.n == 1:
        return 1.0
    gap = min(1.0 - lam[1], 1.0 + lam[-1])
    return 0.0 if gap < BIPARTITE_TOL else float(gap)


def mixing_time_bound(gap: float, pi_min: float, eps: float) -> int:
    """ceil((1/gap) * ln(1/(eps*pi_min)))."""
    if gap <= 0:
        raise ValueError("mixing bound needs a positive spectral gap")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 < pi_min <= 1:
        raise ValueError("pi_min must lie in (0, 1]")
    return math.ceil(math.log(1.0 / (eps * pi_min)) / gap)


def mixing_time_lower_bound(gap: float, eps: float) -> float:
    """The converse (1/gap - 1) * ln(1/(2 eps)); reported, never asserted."""
    if gap <= 0:
        return math.inf
    return (1.0 / gap - 1.0) * math.log(1.0 / (2.0 * eps))


def worst_tv(P: np.ndarray, pi: np.ndarray) -> float:
    """max over starting vertices of TV(P[x, :], pi) for a matrix power P."""
    return 0.5 * float(np.abs(P - pi[None, :]).sum(axis=1).max())


def exact_mixing_time(P, pi, eps: float = 0.25, t_max: int = 1 << 40) -> int:
    """Smallest t with max-start TV(P^t, pi) <= eps.

    Worst-start TV is non-increasing in t, so we bracket by repeated
    squaring and then binary search using stored powers.
    """
    P = P.as_float() if isinstance(P, TransitionMatrix) else np.asarray(P, dtype=float)
    pi = pi.probs if isinstance(pi, Distribution) else np.asarray(pi, dtype=float)
    n = P.shape[0]
    if worst_tv(np.eye(n), pi) <= eps:
        return 0
    powers = [P]  # powers[k] = P^(2^k)
    while worst_tv(powers[-1], pi) > eps:
        if (1 << len(powers)) > t_max:
            raise RuntimeError("chain does not mix within t_max (periodic or disconnected?)")
        powers.append(powers[-1] @ powers[-1])
    # answer lies in (2^(K-1), 2^K] where K = len(powers) - 1
    K = len(powers) - 1
    if K == 0:
        return 1
    t = 1 << (K - 1)
    acc = powers[K - 1]
    for k in range(K - 2, -1, -1):
        trial = acc @ powers[k]
        if worst_tv(trial, pi) > eps:
            acc = trial
            t += 1 << k
    return t + 1


# ---------------------------------------------------------------- hitting times

def _component_system(wg, comp):
    idx = np.asarray(sorted(comp), dtype=np.int64)
    P = transition_matrix(wg).matrix[np.ix_(idx, idx)] if wg.n <= 4000 else \
        transition_sparse(wg)[idx][:, idx].toarray()
    return idx, P


def hitting_times_to(wg, t: int) -> np.ndarray:
    """Vector h with h[u] = H_{u,t}; infinite outside the component of t."""
    wg = as_weighted(wg)
    comp = component(wg.graph, t)
    idx, P = _component_system(wg, comp)
    k = idx.size
    pos = int(np.searchsorted(idx, t))
    A = np.eye(k) - P
    A[pos, :] = 0.0
    A[pos, pos] = 1.0
    b = np.ones(k)
    b[pos] = 0.0
    h = np.full(wg.n, np.inf)
    h[idx] = np.linalg.solve(A, b)
    return h


def hitting_time_exact(wg, s: int, t: int) -> float:
    wg = as_weighted(wg)
    if not connected_oracle(wg.graph, s, t):
        raise ValueError(f"{s} and {t} lie in different components; hitting time is infinite")
    if s == t:
        return 0.0
    return float(hitting_times_to(wg, t)[s])


def hitting_time_matrix(wg, vertices=None) -> np.ndarray:
    """H[i, j] = H_{v_i, v_j} for ``vertices`` (default all), inf across components.

    Uses the fundamental matrix Z = (I - P + 1 pi)^-1 of each component:
    H_{u,v} = (Z_vv - Z_uv) / pi_v.  Only the needed columns of Z are solved.
    """
    wg = as_weighted(wg)
    vertices = list(range(wg.n)) if vertices is None else list(vertices)
    H = np.full((len(vertices), len(vertices)), np.inf)
    where = {v: i for i, v in enumerate(vertices)}
    for comp in components(wg.graph):
        mine = [v for v in comp if v in where]
        if not mine:
            continue
        idx, P = _component_system(wg, comp)
        w = wg.vertex_weights_float[idx]
        pi = w / w.sum()
        k = idx.size
        A = np.eye(k) - P + pi[None, :]
        cols = np.searchsorted(idx, mine)
        rhs = np.zeros((k, len(mine)))
        rhs[cols, np.arange(len(mine))] = 1.0
        Z = sla.lu_solve(sla.lu_factor(A), rhs)  # columns Z[:, v] for v in mine
        Zsub = Z[cols, :]                          # Zsub[i, j] = Z[u_i, v_j]
        Hc = (np.diag(Zsub)[None, :] - Zsub) / pi[cols][None, :]
        np.fill_diagonal(Hc, 0.0)
        rows = [where[v] for v in mine]
        H[np.ix_(rows, rows)] = Hc
    return H


def first_hit_distribution(wg, s: int, M) -> dict:
    """Distribution of the first vertex of M hit by a walk from s."""
    wg = as_weighted(wg)
    comp = component(wg.graph, s)
    targets = sorted(set(M) & comp)
    if not targets:
        raise ValueError("s is disconnected from every vertex of M")
    if s in targets:
        return {s: 1.0}
    idx, P = _component_system(wg, comp)
    pos = {v: i for i, v in enumerate(idx.tolist())}
    tpos = [pos[v] for v in targets]
    free = [i for i in range(idx.size) if i not in set(tpos)]
    A = np.eye(len(free)) - P[np.ix_(free, free)]
    B = P[np.ix_(free, tpos)]
    Q = np.linalg.solve(A, B)
    row = Q[free.index(pos[s])]
    return {v: float(q) for v, q in zip(targets, row)}


def hitting_time_to_set(wg, s: int, M) -> float:
    wg = as_weighted(wg)
    comp = component(wg.graph, s)
    targets = set(M) & comp
    if not targets:
        raise ValueError("s is disconnected from every vertex of M")
    if s in targets:
        return 0.0
    idx, P = _component_system(wg, comp)
    pos = {v: i for i, v in enumerate(idx.tolist())}
    A = np.eye(idx.size) - P
    b = np.ones(idx.size)
    for v in targets:
        A[pos[v], :] = 0.0
        A[pos[v], pos[v]] = 1.0
        b[pos[v]] = 0.0
    return float(np.linalg.solve(A, b)[pos[s]])


def commute_time_exact(wg, s: int, M) -> float:
    """Expected time to reach M from s and come back: H_{s,M} + sum_v q(v) H_{v,s}."""
    wg = as_weighted(wg)
    M = set(M)
    if not M:
        raise ValueError("M must be nonempty")
    if s in M:
        return 0.0
    q = first_hit_distribution(wg, s, M)
    back = hitting_times_to(wg, s)
    return hitting_time_to_set(wg, s, M) + sum(p * float(back[v]) for v, p in q.items())


# ---------------------------------------------------------------- simulation

class WalkSampler:
    """Vectorised one-step sampler for the walk of a weighted graph.

    Each row of P gets a Walker alias table laid out alongside the CSR
    arrays: a step draws one uniform r, uses floor(r * d_u) as the column
    and the fractional part to choose between the column and its alias.
    """

    def __init__(self, wg):
        wg = as_weighted(wg)
        indptr, indices, w = wg.csr
        prob = np.ones_like(w)
        alias = np.arange(w.size, dtype=np.int64)
        for u in range(wg.n):
            a, b = indptr[u], indptr[u + 1]
            _alias_row(w[a:b], prob[a:b], alias[a:b], a)
        self._indptr = indptr
        self._deg = np.diff(indptr)
        self._indices = indices
        self._prob = prob
        self._alias = alias
        self.n = wg.n

    def step(self, pos: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        r = rng.random(pos.shape) * self._deg[pos]
        k = np.floor(r).astype(np.int64)
        frac = r - k
        idx = self._indptr[pos] + k
        idx = np.where(frac < self._prob[idx], idx, self._alias[idx])
        return self._indices[idx]

    def run(self, starts, steps: int, rng: np.random.Generator,
            ledger: QueryLedger | None = None) -> np.ndarray:
        if steps < 0:
            raise ValueError("steps must be non-negative")
        pos = np.array(starts, dtype=np.int64, copy=True)
        for _ in range(steps):
            pos = self.step(pos, rng)
        if ledger is not None:
            ledger.add(CLASSICAL_STEP, steps * pos.size)
        return pos


def run_walk(wg, start: int, steps: int, rng: np.random.Generator,
             ledger: QueryLedger | None = None) -> int:
    """Endpoint of one seeded walk of ``steps`` transitions from ``start``."""
    return int(WalkSampler(wg).run([start], steps, rng, ledger)[0])


def run_walks(wg, starts, steps: int, rng: np.random.Generator,
              ledger: QueryLedger | None = None) -> np.ndarray:
    return WalkSampler(wg).run(starts, steps, rng, ledger)


def endpoint_distribution(wg, start: int, steps: int) -> Distribution:
    """Exact sigma P^t for sigma a point mass at ``start``."""
    wg = as_weighted(wg)
    P = transition_matrix(wg).matrix
    sigma = np.zeros(wg.n)
    sigma[start] = 1.0
    for _ in range(steps):
        sigma = sigma @ P
    return Distribution(sigma / sigma.sum())


def _alias_row(weights, prob, alias, offset):
    """Vose's alias construction for one row, written into the given slices."""
    d = weights.size
    scaled = weights * (d / weights.sum())
    small = [i for i in range(d) if scaled[i] < 1.0]
    large = [i for i in range(d) if scaled[i] >= 1.0]
    while small and large:
        i, j = small.pop(), large[-1]
        prob[i] = scaled[i]
        alias[i] = offset + j
        scaled[j] -= 1.0 - scaled[i]
        if scaled[j] < 1.0:
            small.append(large.pop())
    for i in small + large:
        prob[i] = 1.0
        alias[i] = offset + i
