import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from ustconlab.graph import (QueryLedger, WEIGHTED_WALK_ORACLE, build_graph, complete, er_connected,
                             lollipop, path, two_component, unweighted)
from ustconlab.qsim import Basis, StateVector
from ustconlab.qsim.amplify import fixed_point_phases
from ustconlab.qsim.szegedy import szegedy_operator
from ustconlab.tradeoff import (TradeoffDecider, WeightedSampleSet, inverse_qws, seed_set,
                                swap_probability, swap_test, swap_test_joint, wset_contains,
                                wset_prepare_state, wset_update)
from ustconlab.tradeoff.algorithm import seed_pair_state, seed_walk_length, seed_weight_set
from ustconlab.tradeoff.invqws import (component_spectrum, make_schedule, prepare_seed_state,
                                       walk_oracle_calls)
from ustconlab.walks import (Distribution, WalkSampler, component, endpoint_distribution,
                             spectral_gap, stationary_distribution, tv_distance)


def paw():
    return build_graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)])


# ---------------------------------------------------------------- weighted sample set

def test_wset_examples():
    ws = WeightedSampleSet(4, 3)
    assert not wset_contains(ws, 5)
    wset_update(ws, ("insert", 5, 1))
    assert wset_contains(ws, 5)
    wset_update(ws, ("delete", 5))
    assert len(ws) == 0 and ws.total == 0
    ws.insert(1, 1)
    ws.insert(2, 3)
    assert ws.total == 4
    st_ = wset_prepare_state(ws)
    assert np.allclose(st_.amps, [0.5, math.sqrt(3) / 2], atol=1e-12)
    one = WeightedSampleSet(1, 2)
    one.insert(3, 1)
    assert one.prepare_state().to_dict() == pytest.approx({3: 1})


def test_wset_errors():
    ws = WeightedSampleSet(2, 3, weight_bound=10)
    with pytest.raises(ValueError):
        ws.prepare_state()
    with pytest.raises(ValueError):
        ws.insert(1, 11)
    with pytest.raises(ValueError):
        ws.insert(1, 0)
    with pytest.raises(ValueError):
        ws.insert(8, 1)
    ws.insert(1, 2)
    with pytest.raises(KeyError):
        ws.insert(1, 3)
    with pytest.raises(KeyError):
        ws.delete(2)
    ws.insert(2, 2)
    with pytest.raises(OverflowError):
        ws.insert(3, 1)
    with pytest.raises(ValueError):
        wset_update(ws, ("upsert", 1))


ops = st.lists(st.tuples(st.sampled_from(["insert", "delete"]), st.integers(0, 31),
                         st.integers(1, 50)), max_size=200)


@given(ops)
@settings(max_examples=60)
def test_wset_mirror(seq):
    ws = WeightedSampleSet(32, 5, weight_bound=50)
    mirror = {}
    for kind, x, c in seq:
        if kind == "insert" and x not in mirror:
            ws.insert(x, c)
            mirror[x] = c
        elif kind == "delete" and x in mirror:
            ws.delete(x)
            del mirror[x]
        assert ws.contains(x) == (x in mirror)
    ws.audit()
    assert ws.items() == sorted(mirror.items())
    assert ws.total == sum(mirror.values())
    if mirror:
        amps = ws.prepare_state().to_dict()
        tot = sum(mirror.values())
        for x, c in mirror.items():
            assert amps[x] == pytest.approx(math.sqrt(c / tot), abs=1e-12)


def test_wset_sampling_follows_weights():
    ws = WeightedSampleSet(4, 3)
    for x, c in [(0, 1), (3, 2), (5, 5)]:
        ws.insert(x, c)
    assert [ws.find_prefix(r) for r in range(8)] == [0, 3, 3, 5, 5, 5, 5, 5]
    rng = np.random.default_rng(0)
    draws = np.array([ws.sample(rng) for _ in range(8000)])
    assert np.mean(draws == 5) == pytest.approx(5 / 8, abs=0.02)


def test_wset_touches_logarithmic():
    rng = np.random.default_rng(1)
    ell = 1 << 12
    ws = WeightedSampleSet(ell, 16)
    keys = rng.permutation(1 << 16)[:ell]
    worst = 0
    for k in keys:
        ws.insert(int(k), 1)
        worst = max(worst, ws.last_touches)
    for k in keys[:1000]:
        ws.contains(int(k))
        worst = max(worst, ws.last_touches)
        ws.delete(int(k))
        worst = max(worst, ws.last_touches)
    # AVL height is below 1.45 log2(ell); rotations add a constant
    assert worst <= 1.45 * math.log2(ell) + 6


def test_seed_weights_give_restricted_stationary_state():
    wg = unweighted(lollipop(5, 4))
    pi = stationary_distribution(wg).probs
    rng = np.random.default_rng(2)
    seeds = seed_set(wg, 0, 2, 0.05, stationary_distribution(wg).pi_min, rng, c=3)
    st_ = seed_weight_set(wg, seeds).prepare_state()
    L = list(seeds.vertices)
    want = np.sqrt(pi[L] / pi[L].sum())
    assert abs(np.vdot(want, st_.amps)) ** 2 >= 1 - 1e-12


# ---------------------------------------------------------------- seed sets

def test_seed_set_formula_example():
    assert seed_walk_length(0.1, 1 / 32, 4, 16) == 70
    rng = np.random.default_rng(3)
    s = seed_set(unweighted(complete(16)), 0, 4, 0.1, 1 / 32, rng)
    assert (s.walk_length, s.walk_count) == (70, 480)
    assert s.source == 0 and len(s) == len(set(s.vertices))


def test_seed_set_confined_to_component():
    g = two_component(path(2), path(3))
    rng = np.random.default_rng(4)
    for _ in range(20):
        assert set(seed_set(unweighted(g), 0, 2, 0.5, 0.1, rng).vertices) <= {0, 1}
    with pytest.raises(ValueError):
        seed_set(unweighted(g), 0, 0, 0.5, 0.1, rng)


def test_seed_endpoints_match_matrix_power():
    wg = unweighted(lollipop(4, 3))
    sd = stationary_distribution(wg)
    t = seed_walk_length(spectral_gap(wg), sd.pi_min, 2, wg.n)
    ends = WalkSampler(wg).run(np.full(100_000, 6), t, np.random.default_rng(5))
    emp = Distribution(np.bincount(ends, minlength=wg.n) / ends.size)
    assert tv_distance(emp, endpoint_distribution(wg, 6, t)) <= 0.02


# ---------------------------------------------------------------- inverse walk search

def test_invqws_whole_component_needs_no_rounds():
    wg = unweighted(complete(6))
    out = inverse_qws(wg, range(6), 0.5)
    assert out.schedule.rounds == 0
    assert out.fidelity() == pytest.approx(1, abs=1e-12)


def test_invqws_complete8():
    wg = unweighted(complete(8))
    led = QueryLedger()
    out = inverse_qws(wg, {0, 1}, spectral_gap(wg), 1 / 8, led)
    assert out.schedule.rounds >= 1
    # |pi> is uniform over the 56 ordered pairs by symmetry
    uniform = np.full(56, 1 / math.sqrt(56))
    fid = abs(np.vdot(uniform, out.pair_amplitudes())) ** 2
    assert fid == pytest.approx(out.fidelity(), abs=1e-9)
    assert fid >= 1 - 1 / 8
    assert out.norm() == pytest.approx(1, abs=1e-9)
    assert led[WEIGHTED_WALK_ORACLE] == walk_oracle_calls(out.schedule)


def test_invqws_random_graphs():
    rng = np.random.default_rng(6)
    for seed in range(6):
        g = er_connected(int(rng.integers(8, 33)), 0.3, seed)
        wg = unweighted(g)
        gap = spectral_gap(wg)
        if gap <= 0:
            continue
        pi = stationary_distribution(wg).probs
        A = set(rng.choice(g.n, size=3, replace=False).tolist())
        floor = 2 / (8 * g.n)
        assert pi[list(A)].sum() >= floor
        out = inverse_qws(wg, A, gap, 1 / 8, pi_floor=floor)
        assert out.fidelity() >= 1 - 1 / 8


def test_invqws_errors_and_disjoint_inner():
    wg = unweighted(two_component(complete(4), complete(4)))
    with pytest.raises(ValueError):
        inverse_qws(wg, {0, 5}, 0.5)
    with pytest.raises(ValueError):
        inverse_qws(wg, set(), 0.5)
    with pytest.raises(ValueError):
        inverse_qws(wg, {0}, 0.0)
    a = inverse_qws(wg, {0}, 0.5)
    b = inverse_qws(wg, {5}, 0.5)
    assert a.inner(b) == 0


def _pe_unitary(W, bits, copies):
    """Dense phase-estimation unitary on system x `copies` registers, built gate by gate."""
    D, N = W.shape[0], 1 << bits
    H = sla.hadamard(N) / math.sqrt(N)
    Fdag = np.exp(-2j * np.pi * np.outer(np.arange(N), np.arange(N)) / N) / math.sqrt(N)
    powers = [np.linalg.matrix_power(W, k) for k in range(N)]
    dim = D * N ** copies

    def apply(vec):
        psi = vec.reshape((D,) + (N,) * copies)
        for r in range(copies):
            ax = r + 1
            psi = np.moveaxis(np.tensordot(H, psi, axes=([1], [ax])), 0, ax)
            psi = np.stack([np.tensordot(powers[k], np.take(psi, k, axis=ax), axes=([1], [0]))
                            for k in range(N)], axis=ax)
            psi = np.moveaxis(np.tensordot(Fdag, psi, axes=([1], [ax])), 0, ax)
        return psi.reshape(dim)

    return np.column_stack([apply(e) for e in np.eye(dim, dtype=complex)])


@pytest.mark.parametrize("copies", [1, 2])
def test_invqws_matches_register_level_simulation(copies):
    wg = unweighted(paw())
    comp = frozenset(range(4))
    spec = component_spectrum(wg, comp)
    W = szegedy_operator(wg, comp).dense()
    D = W.shape[0]
    bits = 2
    anc = (1 << bits) ** copies
    V = _pe_unitary(W, bits, copies)
    P0 = np.kron(np.eye(D), np.diag(np.eye(anc)[0]))
    gap = spectral_gap(wg)

    def brute(A):
        a = np.kron(prepare_seed_state(wg, A), np.eye(anc)[0])
        sched = make_schedule(sum(wg.graph.degree(u) for u in A) / (2 * wg.graph.m),
                              gap, 0.125, bits, copies)
        alphas, betas = fixed_point_phases(sched.rounds, sched.delta_fp)
        psi = a.copy()
        for al, be in zip(alphas, betas):
            St = V.conj().T @ (np.eye(D * anc) - (1 - np.exp(1j * be)) * P0) @ V
            psi = St @ psi
            psi = psi - (1 - np.exp(1j * al)) * a * np.vdot(a, psi)
            psi = -psi
        return psi, sched

    states = {}
    for A in ({3}, {0}, {1, 3}):
        psi, sched = brute(A)
        out = inverse_qws(wg, A, gap, 0.125, bits=bits, copies=copies)
        assert out.schedule == sched and sched.rounds >= 1
        zero = psi.reshape(D, anc)[:, 0]
        assert np.abs(zero - out.pair_amplitudes()).max() < 1e-10
        assert np.linalg.norm(psi.reshape(D, anc)[:, 1:]) == pytest.approx(
            np.linalg.norm(out.y), abs=1e-10)
        states[frozenset(A)] = (psi, out)
    (p1, o1), (p2, o2) = states[frozenset({3})], states[frozenset({1, 3})]
    assert np.vdot(p1, p2) == pytest.approx(o1.inner(o2), abs=1e-10)


def test_seed_pair_state_matches_direct_preparation():
    wg = unweighted(lollipop(4, 3))
    seeds = seed_set(wg, 0, 2, 0.1, 0.05, np.random.default_rng(7), c=2)
    pair = seed_pair_state(wg, seed_weight_set(wg, seeds))
    spec = component_spectrum(wg, frozenset(component(wg.graph, 0)))
    amps = np.array([pair[lab] for lab in spec.basis.labels])
    assert np.abs(amps - prepare_seed_state(wg, seeds.vertices)).max() < 1e-12


# ---------------------------------------------------------------- SWAP test

def overlap_pair(r):
    b = Basis([0, 1])
    return (StateVector.basis_state(b, 0),
            StateVector(b, np.array([r, math.sqrt(1 - r * r)], dtype=complex)))


def test_swap_examples():
    a, _ = overlap_pair(1.0)
    assert swap_probability(a, a) == 1
    x, y = overlap_pair(0.0)
    assert swap_probability(x, y) == pytest.approx(0.5)
    a, b = overlap_pair(2 / 3)
    assert swap_probability(a, b) == pytest.approx(13 / 18)
    with pytest.raises(ValueError):
        swap_test(a, StateVector.basis_state(Basis([0, 1, 2]), 0), np.random.default_rng(0))


@pytest.mark.parametrize("r", [0.0, 1 / 3, 2 / 3, 1.0])
def test_swap_frequencies(r):
    a, b = overlap_pair(r)
    rng = np.random.default_rng(8)
    shots = 100_000
    zeros = sum(swap_test(a, b, rng) == 0 for _ in range(shots))
    p = (1 + r * r) / 2
    assert abs(zeros / shots - p) <= 3 * math.sqrt(p * (1 - p) / shots) + 1e-12


def test_swap_joint_state_cross_check():
    rng = np.random.default_rng(9)
    b = Basis(list(range(4)))
    for _ in range(5):
        u = StateVector.normalized(b, rng.normal(size=4) + 1j * rng.normal(size=4))
        v = StateVector.normalized(b, rng.normal(size=4) + 1j * rng.normal(size=4))
        _, p0 = swap_test_joint(u, v, rng)
        assert p0 == pytest.approx(swap_probability(u, v), abs=1e-12)


# ---------------------------------------------------------------- decider

def test_intersection_short_circuit():
    dec = TradeoffDecider(unweighted(complete(8)), 0, 5, spectral_gap(unweighted(complete(8))), 8)
    rng = np.random.default_rng(10)
    meets = 0
    for _ in range(200):
        L = seed_set(dec.wg, 0, 8, dec.delta, dec.pi_min, rng)
        M = seed_set(dec.wg, 5, 8, dec.delta, dec.pi_min, rng)
        meets += bool(set(L.vertices) & set(M.vertices))
    assert meets >= 198
    assert dec.run(rng) == "connected"


def test_amplified_disconnected():
    g = two_component(complete(8), complete(8))
    wg = unweighted(g)
    gap = spectral_gap(unweighted(complete(8)))
    dec = TradeoffDecider(wg, 0, 8, gap, 2)
    rng = np.random.default_rng(11)
    outs = [dec.run_amplified(rng) for _ in range(10)]
    assert outs.count("disconnected") >= 9


def test_amplified_connected():
    g = lollipop(6, 4)
    wg = unweighted(g)
    dec = TradeoffDecider(wg, 0, g.n - 1, spectral_gap(wg), 2)
    rng = np.random.default_rng(12)
    outs = [dec.run_amplified(rng) for _ in range(10)]
    assert outs.count("connected") >= 9
    assert dec.run(rng) in ("connected", "disconnected")
    same = TradeoffDecider(wg, 3, 3, 0.1, 2)
    assert same.run(rng) == "connected"
