"""Exact simulation of textbook phase estimation.

With N = 2^bits, the branch for outcome k is

    |phi_k> = (1/N) sum_j exp(-2 pi i j k / N) U^j |psi>,

obtained from the N powers U^j|psi> with a single FFT along j.  The
convention is U v = exp(2 pi i phase) v with phase in [0, 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph import QueryLedger
from .state import StateVector, UnitaryAction

MAX_BITS = 20
#: cap on N * dim complex entries held at once (256 MiB)
ENTRY_CAP = 1 << 24


@dataclass
class PhaseEstimate:
    bits: int
    branches: np.ndarray  # shape (N, dim), unnormalised
    basis: object

    @property
    def probabilities(self) -> np.ndarray:
        p = np.sum(np.abs(self.branches) ** 2, axis=1)
        return p / p.sum()

    def branch(self, k: int) -> StateVector:
        """Normalised post-measurement state for outcome k."""
        return StateVector.normalized(self.basis, self.branches[k])

    def sample(self, rng: np.random.Generator):
        k = int(rng.choice(self.branches.shape[0], p=self.probabilities))
        return k, self.branch(k)


def _powers(u: UnitaryAction, amps: np.ndarray, N: int) -> np.ndarray:
    out = np.empty((N, amps.size), dtype=complex)
    out[0] = amps
    M = u.matrix
    for j in range(1, N):
        out[j] = M @ out[j - 1]
    return out


def phase_estimation(u: UnitaryAction, st: StateVector, bits: int,
                     ledger: QueryLedger | None = None, cap: int = ENTRY_CAP) -> PhaseEstimate:
    """Simulate phase estimation of ``u`` on ``st`` with ``bits`` output bits.

    Charges ``2**bits - 1`` applications of ``u`` (the controlled powers).
    """
    if not 0 <= bits <= MAX_BITS:
        raise ValueError(f"bits must lie in 0..{MAX_BITS}")
    N = 1 << bits
    if st.basis != u.basis:
        st = st.embed(u.basis)
    if N * len(u.basis) > cap:
        raise MemoryError(f"phase estimation needs {N} x {len(u.basis)} amplitudes, above cap {cap}")
    powers = _powers(u, st.amps, N)
    branches = np.fft.fft(powers, axis=0) / N
    u.charge(ledger, N - 1)
    return PhaseEstimate(bits, branches, u.basis)


def zero_branch(u: UnitaryAction, st: StateVector, bits: int,
                ledger: QueryLedger | None = None) -> np.ndarray:
    """Unnormalised outcome-0 branch (1/N) sum_j U^j|psi>, in O(dim) memory."""
    if not 0 <= bits <= MAX_BITS:
        raise ValueError(f"bits must lie in 0..{MAX_BITS}")
    N = 1 << bits
    if st.basis != u.basis:
        st = st.embed(u.basis)
    M = u.matrix
    psi = st.amps.copy()
    acc = np.zeros_like(psi)
    for _ in range(N):
        acc += psi
        psi = M @ psi
    u.charge(ledger, N - 1)
    return acc / N


def fejer_distribution(phase: float, bits: int) -> np.ndarray:
    """Closed-form outcome distribution for an eigenvector of eigenphase ``phase``."""
    N = 1 << bits
    k = np.arange(N)
    delta = phase - k / N
    num = np.sin(np.pi * N * delta) ** 2
    den = (N * np.sin(np.pi * delta)) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(np.sin(np.pi * delta)) < 1e-12, 1.0, num / den)


def zero_amplitude(phi, bits: int) -> np.ndarray:
    """alpha_0(phi) = (1/N) sum_j exp(i j phi) for eigenphases phi in (-pi, pi].

    This is the amplitude left on outcome 0 by an eigenvector of phase phi.
    """
    N = 1 << bits
    phi = np.asarray(phi, dtype=float)
    half = phi / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.sin(N * half) / (N * np.sin(half))
    mag = np.where(np.abs(np.sin(half)) < 1e-15, 1.0, mag)
    return mag * np.exp(1j * (N - 1) * half)
