"""Seed sets, the SWAP test and the gap-promise st-connectivity decider."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..graph import QueryLedger, as_weighted
from ..qsim.oracles import weighted_ow_oracle
from ..qsim.state import StateVector
from ..walks import WalkSampler, component, mixing_time_bound, stationary_distribution
from .invqws import PreparedState, component_spectrum, inverse_qws
from .wset import WeightedSampleSet

SEED_CONSTANT = 120
DEFAULT_EPS = 0.125
DEFAULT_REPS = 75
DEFAULT_THRESHOLD = 0.64


@dataclass(frozen=True)
class SeedSet:
    vertices: tuple
    source: int
    walk_length: int
    walk_count: int

    def __len__(self):
        return len(self.vertices)


def seed_walk_length(delta: float, pi_min: float, p: int, n: int) -> int:
    return mixing_time_bound(delta, pi_min, p / (8 * n))


def seed_set(wg, v0: int, p: int, delta: float, pi_min: float, rng: np.random.Generator,
             c: int = SEED_CONSTANT, ledger: QueryLedger | None = None,
             sampler: WalkSampler | None = None) -> SeedSet:
    """Endpoints of c*p independent walks from v0, duplicates removed."""
    wg = as_weighted(wg)
    if p < 1:
        raise ValueError("p must be at least 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    length = seed_walk_length(delta, pi_min, p, wg.n)
    count = c * p
    sampler = sampler or WalkSampler(wg)
    ends = sampler.run(np.full(count, v0), length, rng, ledger)
    return SeedSet(tuple(np.unique(ends).tolist()), v0, length, count)


def seed_weight_set(wg, seeds: SeedSet, ledger: QueryLedger | None = None) -> WeightedSampleSet:
    """Store the seed vertices with integer weights w_u * (common denominator)."""
    wg = as_weighted(wg)
    den = wg.vertex_denominator
    ints = [int(wg.vertex_weight(u) * den) for u in seeds.vertices]
    bits = max(1, math.ceil(math.log2(wg.n + 1)))
    ws = WeightedSampleSet(max(1, len(seeds)), bits, weight_bound=max(ints), ledger=ledger)
    for u, c in zip(seeds.vertices, ints):
        ws.insert(u, c)
    return ws


def seed_pair_state(wg, ws: WeightedSampleSet, ledger: QueryLedger | None = None,
                    ow=None) -> StateVector:
    """|pi_A> from the weighted set, then one O_W call to reach T|pi_A>."""
    wg = as_weighted(wg)
    vstate = ws.prepare_state()
    ow = ow or weighted_ow_oracle(wg)
    lifted = StateVector.from_dict(ow.basis, {(u, None): a for u, a in vstate.to_dict(0).items()})
    return ow.apply(lifted, ledger)


def _component_amps(wg, pair_state: StateVector, A):
    comp = frozenset(component(as_weighted(wg).graph, A[0]))
    spec = component_spectrum(as_weighted(wg), comp)
    return spec, np.array([pair_state[lab] for lab in spec.basis.labels], dtype=complex)


def swap_probability(a, b) -> float:
    return 0.5 * (1.0 + abs(a.inner(b)) ** 2)


def swap_test(a, b, rng: np.random.Generator) -> int:
    """0 with probability (1 + |<a|b>|^2)/2, else 1."""
    if isinstance(a, StateVector) and isinstance(b, StateVector) and len(a.basis) != len(b.basis):
        raise ValueError("SWAP test needs states of the same dimension")
    return 0 if rng.random() < swap_probability(a, b) else 1


def swap_test_joint(a: StateVector, b: StateVector, rng: np.random.Generator):
    """Explicit control-register SWAP test on |0>|a>|b>; returns (bit, Pr[0])."""
    if a.basis != b.basis:
        raise ValueError("SWAP test needs a shared basis")
    ab = np.kron(a.amps, b.amps)
    d = len(a.basis)
    ba = ab.reshape(d, d).T.ravel()
    # H on control, controlled swap, H on control: the control-0 branch
    zero = 0.5 * (ab + ba)
    p0 = float(np.vdot(zero, zero).real)
    return (0 if rng.random() < p0 else 1), p0


class TradeoffDecider:
    """Single-shot and amplified seed-set decider for a fixed instance."""

    def __init__(self, wg, s: int, t: int, delta: float, p: int, c: int = SEED_CONSTANT,
                 eps: float = DEFAULT_EPS, use_wset: bool = True):
        self.wg = as_weighted(wg)
        self.s, self.t = s, t
        self.delta, self.p, self.c, self.eps = delta, p, c, eps
        self.pi_min = stationary_distribution(self.wg).pi_min
        self.floor = p / (8 * self.wg.n)
        self.sampler = WalkSampler(self.wg)
        self.use_wset = use_wset
        self.ow = weighted_ow_oracle(self.wg) if use_wset else None

    def prepare(self, seeds: SeedSet, ledger=None) -> PreparedState:
        amps = None
        if self.use_wset:
            ws = seed_weight_set(self.wg, seeds, ledger)
            pair = seed_pair_state(self.wg, ws, ledger, self.ow)
            _, amps = _component_amps(self.wg, pair, seeds.vertices)
        return inverse_qws(self.wg, seeds.vertices, self.delta, self.eps, ledger,
                           pi_floor=self.floor, state_amps=amps)

    def seed_batch(self, v0: int, reps: int, rng: np.random.Generator,
                   ledger: QueryLedger | None = None) -> list:
        """``reps`` independent seed sets from v0, walked as one batch."""
        length = seed_walk_length(self.delta, self.pi_min, self.p, self.wg.n)
        count = self.c * self.p
        ends = self.sampler.run(np.full(reps * count, v0), length, rng, ledger).reshape(reps, count)
        return [SeedSet(tuple(np.unique(row).tolist()), v0, length, count) for row in ends]

    def decide(self, L: SeedSet, M: SeedSet, rng: np.random.Generator,
               ledger: QueryLedger | None = None) -> str:
        if set(L.vertices) & set(M.vertices):
            return "connected"
        a = self.prepare(L, ledger)
        b = self.prepare(M, ledger)
        return "connected" if swap_test(a, b, rng) == 0 else "disconnected"

    def run(self, rng: np.random.Generator, ledger: QueryLedger | None = None) -> str:
        if self.s == self.t:
            return "connected"
        L = seed_set(self.wg, self.s, self.p, self.delta, self.pi_min, rng, self.c, ledger, self.sampler)
        M = seed_set(self.wg, self.t, self.p, self.delta, self.pi_min, rng, self.c, ledger, self.sampler)
        return self.decide(L, M, rng, ledger)

    def run_amplified(self, rng: np.random.Generator, reps: int = DEFAULT_REPS,
                      threshold: float = DEFAULT_THRESHOLD, ledger: QueryLedger | None = None) -> str:
        """Repeat the single-shot pipeline ``reps`` times and vote."""
        if self.s == self.t:
            return "connected"
        Ls = self.seed_batch(self.s, reps, rng, ledger)
        Ms = self.seed_batch(self.t, reps, rng, ledger)
        hits = sum(self.decide(L, M, rng, ledger) == "connected" for L, M in zip(Ls, Ms))
        return "connected" if hits / reps >= threshold else "disconnected"


def ustcon_tradeoff(wg, s: int, t: int, delta: float, p: int, rng: np.random.Generator,
                    c: int = SEED_CONSTANT, eps: float = DEFAULT_EPS,
                    ledger: QueryLedger | None = None) -> str:
    """One run of the seed-set / state-preparation / SWAP-test pipeline."""
    return TradeoffDecider(wg, s, t, delta, p, c, eps).run(rng, ledger)


def ustcon_tradeoff_amplified(wg, s: int, t: int, delta: float, p: int, rng: np.random.Generator,
                              reps: int = DEFAULT_REPS, threshold: float = DEFAULT_THRESHOLD,
                              c: int = SEED_CONSTANT, eps: float = DEFAULT_EPS,
                              ledger: QueryLedger | None = None) -> str:
    """Majority-style vote over ``reps`` single runs."""
    return TradeoffDecider(wg, s, t, delta, p, c, eps).run_amplified(rng, reps, threshold, ledger)
