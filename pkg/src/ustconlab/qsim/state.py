"""Labelled state vectors and unitary actions.

A :class:`Basis` is an ordered tuple of hashable labels.  Amplitudes live in
a dense numpy array indexed by that order; the basis itself is always the
reachable subspace of whatever is being simulated, so dense storage over it
is cheap while the labels keep registers readable.
"""
from __future__ import annotations

import io

import numpy as np
import scipy.sparse as sp

from ..graph import QueryLedger

NORM_TOL = 1e-10
PRUNE = 1e-14
DENSE_CAP = 4096


def label_key(label):
    """Total order on mixed labels: None < ints < strings < tuples."""
    if label is None:
        return (0,)
    if isinstance(label, (bool, int, np.integer)):
        return (1, int(label))
    if isinstance(label, str):
        return (2, label)
    if isinstance(label, tuple):
        return (3, tuple(label_key(x) for x in label))
    raise TypeError(f"unsupported label {label!r}")


class Basis:
    def __init__(self, labels, sort: bool = False):
        labels = list(labels)
        if sort:
            labels.sort(key=label_key)
        self.labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("basis labels must be distinct")

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        return isinstance(other, Basis) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"label {label!r} not in basis") from None

    def indices(self, labels) -> np.ndarray:
        return np.fromiter((self._index[lab] for lab in labels), dtype=np.int64)

    def __repr__(self):
        return f"Basis(dim={len(self)})"


class StateVector:
    """Unit vector over a :class:`Basis`.

    Construction normalisation is checked, not silently applied; use
    :meth:`normalized` when a renormalised post-measurement state is wanted.
    """

    def __init__(self, basis: Basis, amps, check: bool = True):
        a = np.asarray(amps, dtype=complex)
        if a.shape != (len(basis),):
            raise ValueError(f"amplitude vector of shape {a.shape} for basis of dim {len(basis)}")
        self.basis = basis
        self.amps = a
        if check and abs(self.norm() - 1.0) > NORM_TOL:
            raise ValueError(f"state has norm {self.norm()!r}")

    @classmethod
    def from_dict(cls, basis: Basis, mapping) -> "StateVector":
        a = np.zeros(len(basis), dtype=complex)
        for lab, amp in mapping.items():
            a[basis.index(lab)] += amp
        return cls(basis, a)

    @classmethod
    def basis_state(cls, basis: Basis, label) -> "StateVector":
        a = np.zeros(len(basis), dtype=complex)
        a[basis.index(label)] = 1.0
        return cls(basis, a)

    @classmethod
    def normalized(cls, basis: Basis, amps) -> "StateVector":
        a = np.asarray(amps, dtype=complex)
        nrm = np.linalg.norm(a)
        if nrm == 0:
            raise ValueError("cannot normalise the zero vector")
        return cls(basis, a / nrm)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __getitem__(self, label) -> complex:
        return self.amps[self.basis.index(label)] if label in self.basis else 0j

    def inner(self, other) -> complex:
        """<self|other>; bases may differ, missing labels have amplitude 0."""
        if isinstance(other, StateVector):
            if other.basis == self.basis:
                return complex(np.vdot(self.amps, other.amps))
            total = 0j
            for lab, amp in zip(self.basis.labels, self.amps):
                if amp != 0 and lab in other.basis:
                    total += np.conj(amp) * other.amps[other.basis.index(lab)]
            return complex(total)
        return complex(np.conj(other.inner(self)))

    def distance(self, other) -> float:
        if other.basis != self.basis:
            other = other.embed(self.basis)
        return float(np.linalg.norm(self.amps - other.amps))

    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amps) ** 2
        return p / p.sum()

    def sample(self, rng: np.random.Generator):
        """Measure in the label basis; returns the label."""
        k = rng.choice(len(self.basis), p=self.probabilities())
        return self.basis.labels[k]

    def to_dict(self, prune: float = PRUNE) -> dict:
        keep = np.flatnonzero(np.abs(self.amps) > prune)
        return {self.basis.labels[i]: complex(self.amps[i]) for i in keep}

    def embed(self, basis: Basis) -> "StateVector":
        """Same state over a larger basis containing every non-zero label."""
        a = np.zeros(len(basis), dtype=complex)
        for lab, amp in self.to_dict(prune=0.0).items():
            a[basis.index(lab)] = amp
        return StateVector(basis, a)

    def marginal(self, register: int) -> dict:
        """Distribution of one component of tuple labels."""
        out = {}
        for lab, p in zip(self.basis.labels, self.probabilities()):
            out[lab[register]] = out.get(lab[register], 0.0) + p
        return out

    def dump_csv(self, prune: float = PRUNE) -> str:
        """Debug dump ``label,re,im`` sorted by label."""
        buf = io.StringIO()
        buf.write("label,re,im\n")
        items = sorted(self.to_dict(prune).items(), key=lambda kv: label_key(kv[0]))
        for lab, amp in items:
            buf.write(f"\"{lab!r}\",{amp.real:.12g},{amp.imag:.12g}\n")
        return buf.getvalue()

    def __repr__(self):
        return f"StateVector(dim={len(self.basis)}, nnz={len(self.to_dict())})"


class UnitaryAction:
    """A unitary on a labelled basis, stored as a sparse matrix.

    ``cost`` is a ``{ledger_kind: count}`` mapping charged to the ledger
    every time the action is applied to a state.
    """

    def __init__(self, basis: Basis, matrix, name: str = "U", cost=None):
        M = sp.csr_matrix(matrix, dtype=complex)
        if M.shape != (len(basis), len(basis)):
            raise ValueError("matrix shape does not match basis")
        self.basis = basis
        self.matrix = M
        self.name = name
        self.cost = dict(cost or {})

    @classmethod
    def from_columns(cls, basis: Basis, columns, name="U", cost=None) -> "UnitaryAction":
        """Build from ``{input_label: {output_label: amplitude}}``; every label needs a column."""
        rows, cols, vals = [], [], []
        for lab in basis.labels:
            j = basis.index(lab)
            for out, amp in columns[lab].items():
                if abs(amp) > PRUNE:
                    rows.append(basis.index(out))
                    cols.append(j)
                    vals.append(amp)
        n = len(basis)
        return cls(basis, sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex),
                   name, cost)

    def __len__(self):
        return len(self.basis)

    def charge(self, ledger: QueryLedger | None, times: int = 1) -> None:
        if ledger is not None:
            ledger.merge(self.cost, times)

    def apply(self, state: StateVector, ledger: QueryLedger | None = None) -> StateVector:
        if state.basis != self.basis:
            state = state.embed(self.basis)
        self.charge(ledger)
        return StateVector(self.basis, self.matrix @ state.amps)

    def apply_label(self, label, ledger: QueryLedger | None = None) -> StateVector:
        return self.apply(StateVector.basis_state(self.basis, label), ledger)

    def adjoint(self) -> "UnitaryAction":
        return UnitaryAction(self.basis, self.matrix.conj().T.tocsr(), self.name + "^dag", self.cost)

    def compose(self, other: "UnitaryAction", name=None) -> "UnitaryAction":
        """self after other."""
        if other.basis != self.basis:
            raise ValueError("bases differ")
        cost = dict(other.cost)
        for k, v in self.cost.items():
            cost[k] = cost.get(k, 0) + v
        return UnitaryAction(self.basis, self.matrix @ other.matrix,
                             name or f"{self.name}*{other.name}", cost)

    def dense(self) -> np.ndarray:
        if len(self.basis) > DENSE_CAP:
            raise ValueError(f"dense materialisation capped at dimension {DENSE_CAP}")
        return self.matrix.toarray()

    def unitarity_error(self) -> float:
        U = self.dense()
        return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max())

    def __repr__(self):
        return f"UnitaryAction({self.name}, dim={len(self.basis)})"


def random_state(basis: Basis, rng: np.random.Generator) -> StateVector:
    a = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    return StateVector.normalized(basis, a)


def complete_block(block, column) -> dict:
    """Extend one unit column to an orthonormal basis of a block of labels.

    ``block`` lists the labels in basis order with the "zero" input label
    first; ``column`` is the image of that zero label.  Gram-Schmidt runs
    over the column followed by the standard basis vectors in block order,
    and dependent candidates are skipped.  Returns ``{label: image}``
    with images as arrays over the block.
    """
    k = len(block)
    col = np.asarray(column, dtype=complex)
    Q = [col / np.linalg.norm(col)]
    for i in range(k):
        if len(Q) == k:
            break
        e = np.zeros(k, dtype=complex)
        e[i] = 1.0
        for q in Q:
            e = e - np.vdot(q, e) * q
        for q in Q:  # second pass for stability
            e = e - np.vdot(q, e) * q
        nrm = np.linalg.norm(e)
        if nrm > 1e-10:
            Q.append(e / nrm)
    if len(Q) != k:
        raise RuntimeError("completion failed")
    return {lab: Q[i] for i, lab in enumerate(block)}
