"""Walk operators on the directed-edge pair space.

``szegedy_operator`` is W(P) = S (2 Pi_A - I), where Pi_A projects onto the
states |u>|p_u> = O_W |u>|0> and S swaps the two registers.  Its eigenphases
on span(A + SA) satisfy cos(theta) = lambda for the eigenvalues lambda of the
discriminant D_uv = sqrt(P_uv P_vu).

``reflection_walk`` is the more general product of two reflections about
"out" and "in" star states, allowing extra dangling pair labels at some
vertices (used for the source and sink edges of the search algorithm).
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..graph import SZEGEDY_STEP, WEIGHTED_WALK_ORACLE, as_weighted
from ..walks import component as _component
from .state import Basis, StateVector, UnitaryAction


def pair_basis(wg, vertices=None) -> Basis:
    """Directed edges (u, v) with u in ``vertices`` (default all), sorted."""
    g = as_weighted(wg).graph
    vs = range(g.n) if vertices is None else sorted(vertices)
    return Basis([(u, v) for u in vs for v in g.adjacency[u]])


def star_states(wg, basis: Basis) -> dict:
    """|p_u> = sum_v sqrt(P_uv)|u, v> for every u present in ``basis``."""
    wg = as_weighted(wg)
    indptr, indices, w = wg.csr
    out = {}
    for u in sorted({lab[0] for lab in basis.labels}, key=int):
        a, b = indptr[u], indptr[u + 1]
        amps = np.sqrt(w[a:b] / wg.vertex_weights_float[u])
        idx = basis.indices([(u, int(v)) for v in indices[a:b]])
        out[u] = (idx, amps)
    return out


def _reflection(dim, blocks):
    """2 sum |psi><psi| - I for orthonormal psi given as ``(indices, amps)``."""
    rows, cols, vals = [], [], []
    for idx, amps in blocks:
        amps = amps / np.linalg.norm(amps)
        outer = 2.0 * np.outer(amps, np.conj(amps))
        rows.append(np.repeat(idx, idx.size))
        cols.append(np.tile(idx, idx.size))
        vals.append(outer.ravel())
    R = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(dim, dim), dtype=complex) if blocks else sp.csr_matrix((dim, dim))
    return R - sp.identity(dim, dtype=complex, format="csr")


def swap_matrix(basis: Basis):
    n = len(basis)
    rows = basis.indices([(v, u) for (u, v) in basis.labels])
    return sp.csr_matrix((np.ones(n), (rows, np.arange(n))), shape=(n, n), dtype=complex)


def szegedy_operator(wg, vertices=None) -> UnitaryAction:
    """W(P) on the pair space of ``vertices`` (a union of components).

    Costs per application: one walk step and two weighted-oracle calls
    (the reflection about A is O_W (2|0><0| - I) O_W^dag).
    """
    wg = as_weighted(wg)
    if vertices is not None:
        vertices = set(vertices)
        for u in vertices:
            if not _component(wg.graph, u) <= vertices:
                raise ValueError("vertex set must be a union of connected components")
    basis = pair_basis(wg, vertices)
    stars = star_states(wg, basis)
    R = _reflection(len(basis), list(stars.values()))
    W = swap_matrix(basis) @ R
    return UnitaryAction(basis, W.tocsr(), "W(P)", {SZEGEDY_STEP: 1, WEIGHTED_WALK_ORACLE: 2})


def stationary_pair_state(wg, basis: Basis) -> StateVector:
    """sum_u sqrt(pi(u)) |u>|p_u> restricted to the vertices in ``basis``."""
    wg = as_weighted(wg)
    stars = star_states(wg, basis)
    w = wg.vertex_weights_float
    us = list(stars)
    total = w[us].sum()
    a = np.zeros(len(basis), dtype=complex)
    for u, (idx, amps) in stars.items():
        a[idx] = np.sqrt(w[u] / total) * amps
    return StateVector(basis, a)


def a_subspace(wg, basis: Basis) -> np.ndarray:
    """Orthonormal columns spanning span(A + SA) (via SVD)."""
    stars = star_states(wg, basis)
    cols = []
    for idx, amps in stars.values():
        v = np.zeros(len(basis), dtype=complex)
        v[idx] = amps
        cols.append(v)
    A = np.array(cols).T
    S = swap_matrix(basis).toarray()
    M = np.hstack([A, S @ A])
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, s > 1e-9]


def reflection_walk(wg, vertices, extra_out=None, extra_in=None, name="U") -> UnitaryAction:
    """Product of reflections (I - 2 Pi_in)(I - 2 Pi_out) with dangling labels.

    The out-star of u is sum_v sqrt(W_uv)|u,v> and the in-star of v is
    sum_u sqrt(W_uv)|u,v>, both normalised.  ``extra_out[u]`` (and
    ``extra_in``) is a list of ``(label, weight)`` pairs adding
    sqrt(weight)|label> to the corresponding star; these labels are new
    basis states of their own.  Vertices whose only star is made of
    dangling labels still get a reflection.
    """
    wg = as_weighted(wg)
    extra_out = extra_out or {}
    extra_in = extra_in or {}
    vs = sorted(vertices)
    g = wg.graph
    labels = [(u, v) for u in vs for v in g.adjacency[u]]
    for extra in (extra_out, extra_in):
        for u in sorted(extra):
            labels.extend(lab for lab, _ in extra[u])
    basis = Basis(labels)
    indptr, indices, w = wg.csr

    def blocks(direction):
        out = []
        extra = extra_out if direction == "out" else extra_in
        for u in vs:
            a, b = indptr[u], indptr[u + 1]
            nbrs = indices[a:b].tolist()
            pairs = [(u, v) for v in nbrs] if direction == "out" else [(v, u) for v in nbrs]
            amps = list(np.sqrt(w[a:b]))
            for lab, x in extra.get(u, ()):
                pairs.append(lab)
                amps.append(np.sqrt(x))
            out.append((basis.indices(pairs), np.asarray(amps, dtype=float)))
        return out

    D = len(basis)
    Rout = -_reflection(D, blocks("out"))
    Rin = -_reflection(D, blocks("in"))
    # -(2 Pi - I) = I - 2 Pi
    return UnitaryAction(basis, (Rin @ Rout).tocsr(), name)
