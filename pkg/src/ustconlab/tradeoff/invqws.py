"""Inverse quantum walk search: amplify T|pi_A> up to T|pi> on one component.

The target is the phase-0 eigenvector T|pi> = sum_u sqrt(pi(u))|u>|p_u> of
the Szegedy operator W on the component's pair space.  Fixed-point
amplitude amplification alternates

* an exact reflection about a = T|pi_A> (the seed set is stored, so
  |pi_A> is prepared exactly and O_W maps it to a), and
* an approximate reflection about the phase-0 space of W: ``copies``
  independent phase-estimation registers of ``bits`` bits each, and a
  phase kick only when every register reads 0.

Simulation.  In the eigenbasis {|z_j>} of W (phases phi_j), one register
leaves amplitude alpha_0(phi_j) on outcome 0, so the all-zero amplitude is
G_j = conj(alpha_0(phi_j))^copies.  The ancillas of component j therefore
stay in span{|0...0>, |e_j>} and the state is two coefficient vectors
(x_j, y_j) on that 2D space.  This is exact: the brute-force
register-by-register simulation agrees to round-off at tiny sizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from ..graph import SZEGEDY_STEP, WEIGHTED_WALK_ORACLE, WSET_OP, QueryLedger, as_weighted
from ..qsim.amplify import fixed_point_phases, fixed_point_rounds
from ..qsim.phase import zero_amplitude
from ..qsim.szegedy import stationary_pair_state, szegedy_operator
from ..walks import component


@dataclass(frozen=True)
class ComponentSpectrum:
    vertices: tuple
    basis: object
    phases: np.ndarray   # eigenphases of W in (-pi, pi]
    Z: np.ndarray        # unitary eigenvector matrix, columns z_j
    target: np.ndarray   # T|pi> in eigen coordinates

    def to_eigen(self, amps: np.ndarray) -> np.ndarray:
        return self.Z.conj().T @ amps


@lru_cache(maxsize=32)
def component_spectrum(wg, vertices: frozenset) -> ComponentSpectrum:
    W = szegedy_operator(wg, vertices)
    T, Z = sla.schur(W.dense(), output="complex")
    phases = np.angle(np.diag(T))
    target = stationary_pair_state(wg, W.basis)
    return ComponentSpectrum(tuple(sorted(vertices)), W.basis, phases, Z,
                             Z.conj().T @ target.amps)


@dataclass(frozen=True)
class Schedule:
    bits: int
    copies: int
    rounds: int
    floor: float
    delta_fp: float


def reflection_bits(delta: float) -> int:
    return math.ceil(math.log2(1.0 / math.sqrt(delta))) + 3


def leakage_bound(delta: float, bits: int) -> float:
    """Upper bound on |alpha_0(phi)| over phases with |phi| >= arccos(1 - delta)."""
    theta = math.acos(max(-1.0, 1.0 - delta))
    return min(1.0, 1.0 / ((1 << bits) * math.sin(theta / 2)))


def make_schedule(floor: float, delta: float, eps: float, bits=None, copies=None) -> Schedule:
    """Rounds and register counts for target distance ``eps``.

    Half of ``eps`` goes to the fixed-point error and half to the
    imperfect reflections: with l rounds, ``copies`` is chosen so that
    rho^copies <= eps / (4 l), rho being :func:`leakage_bound`.
    """
    delta_fp = eps / 2
    if math.sqrt(floor) >= 1 - eps * eps / 2:
        rounds = 0
    else:
        rounds = fixed_point_rounds(floor, delta_fp)
    bits = reflection_bits(delta) if bits is None else bits
    if copies is None:
        rho = leakage_bound(delta, bits)
        if rounds == 0:
            copies = 0
        elif rho >= 1:
            raise ValueError("phase-estimation precision too low for this gap")
        else:
            copies = max(1, math.ceil(math.log(4 * rounds / eps) / math.log(1 / rho)))
    return Schedule(bits, copies, rounds, floor, delta_fp)


class PreparedState:
    """Output of :func:`inverse_qws`: system plus ancilla coefficients.

    ``x`` holds the coefficients with every ancilla register at 0 and ``y``
    the ones along each component's orthogonal ancilla vector, both in the
    eigenbasis of W.
    """

    def __init__(self, spectrum: ComponentSpectrum, x, y, schedule: Schedule, pi_A: float):
        self.spectrum = spectrum
        self.x = x
        self.y = y
        self.schedule = schedule
        self.pi_A = pi_A

    def norm(self) -> float:
        return float(math.sqrt(np.vdot(self.x, self.x).real + np.vdot(self.y, self.y).real))

    def inner(self, other: "PreparedState") -> complex:
        if not isinstance(other, PreparedState):
            raise TypeError("inner product needs another PreparedState")
        if set(self.spectrum.vertices).isdisjoint(other.spectrum.vertices):
            return 0j
        if self.spectrum is not other.spectrum:
            raise ValueError("states on overlapping but different vertex sets")
        if (self.schedule.bits, self.schedule.copies) != (other.schedule.bits, other.schedule.copies):
            raise ValueError("states prepared with different ancilla registers")
        return complex(np.vdot(self.x, other.x) + np.vdot(self.y, other.y))

    def overlap(self) -> complex:
        """<pi| (T^dag, ancilla 0) |self>."""
        return complex(np.vdot(self.spectrum.target, self.x))

    def fidelity(self) -> float:
        return float(abs(self.overlap()) ** 2)

    def distance(self) -> float:
        """min over global phases of || |self> - |pi>|0> ||."""
        return float(math.sqrt(max(0.0, 2.0 - 2.0 * abs(self.overlap()))))

    def pair_amplitudes(self) -> np.ndarray:
        """System amplitudes on the pair basis for the all-zero ancilla branch."""
        return self.spectrum.Z @ self.x


def prepare_seed_state(wg, A) -> np.ndarray:
    """T|pi_A> on the component pair basis of A (amplitudes)."""
    wg = as_weighted(wg)
    comp = frozenset(component(wg.graph, next(iter(A))))
    spec = component_spectrum(wg, comp)
    basis = spec.basis
    w = wg.vertex_weights_float
    A = sorted(set(A))
    total = w[A].sum()
    amps = np.zeros(len(basis), dtype=complex)
    indptr, indices, ew = wg.csr
    for u in A:
        a, b = indptr[u], indptr[u + 1]
        idx = basis.indices([(u, int(v)) for v in indices[a:b]])
        amps[idx] = math.sqrt(w[u] / total) * np.sqrt(ew[a:b] / w[u])
    return amps


def inverse_qws(wg, A, delta: float, eps: float = 0.125, ledger: QueryLedger | None = None,
                pi_floor: float | None = None, bits=None, copies=None,
                state_amps=None) -> PreparedState:
    """Prepare an eps-approximation of T|pi> on the component of A.

    ``pi_floor`` is the lower bound on pi(A) that fixes the schedule
    (default: the exact pi(A)).  ``state_amps`` optionally supplies T|pi_A>
    on the component pair basis, e.g. as produced through the weighted set.
    """
    wg = as_weighted(wg)
    A = sorted(set(A))
    if not A:
        raise ValueError("A must be nonempty")
    comp = component(wg.graph, A[0])
    if not set(A) <= comp:
        raise ValueError("A must lie inside a single connected component")
    if delta <= 0:
        raise ValueError("delta must be positive")
    spec = component_spectrum(wg, frozenset(comp))
    w = wg.vertex_weights_float
    cidx = list(comp)
    pi_A = float(w[A].sum() / w[cidx].sum())
    floor = pi_A if pi_floor is None else min(pi_floor, 1.0)
    sched = make_schedule(floor, delta, eps, bits, copies)

    a_pair = prepare_seed_state(wg, A) if state_amps is None else np.asarray(state_amps, complex)
    a = spec.to_eigen(a_pair)
    x = a.copy()
    y = np.zeros_like(x)
    if ledger is not None:
        ledger.add(WSET_OP)
        ledger.add(WEIGHTED_WALK_ORACLE)
    if sched.rounds == 0:
        return PreparedState(spec, x, y, sched, pi_A)

    G = np.conj(zero_amplitude(spec.phases, sched.bits)) ** sched.copies
    h = np.sqrt(np.clip(1.0 - np.abs(G) ** 2, 0.0, None))
    alphas, betas = fixed_point_phases(sched.rounds, sched.delta_fp)
    N0 = 1 << sched.bits
    for al, be in zip(alphas, betas):
        # S_t(beta) = I - (1 - e^{i beta}) |B_j><B_j| per eigencomponent
        c = np.conj(G) * x + h * y
        k = (1 - np.exp(1j * be)) * c
        x = x - k * G
        y = y - k * h
        # S_s(alpha) = I - (1 - e^{i alpha}) |a, 0><a, 0|
        x = x - (1 - np.exp(1j * al)) * a * np.vdot(a, x)
        x, y = -x, -y
        if ledger is not None:
            steps = 2 * sched.copies * (N0 - 1)
            ledger.add(SZEGEDY_STEP, steps)
            ledger.add(WEIGHTED_WALK_ORACLE, 2 * steps + 2)
            ledger.add(WSET_OP, 2)
    return PreparedState(spec, x, y, sched, pi_A)


def walk_oracle_calls(sched: Schedule) -> int:
    """Weighted-oracle calls charged by :func:`inverse_qws` for a schedule."""
    N0 = 1 << sched.bits
    return 1 + sched.rounds * (4 * sched.copies * (N0 - 1) + 2)


def cost_scale(pi_A: float, delta: float, eps: float) -> float:
    """sqrt(1/(pi(A) delta)) * log(1/(pi(A) eps))."""
    return math.sqrt(1.0 / (pi_A * delta)) * math.log(1.0 / (pi_A * eps))
