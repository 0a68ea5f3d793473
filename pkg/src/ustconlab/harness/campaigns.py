"""One campaign per subcommand.

Each campaign takes a resolved :class:`ExperimentConfig` and returns a
:class:`Report`.  Trials that draw randomness get their own generator from
``trial_rng(cfg.seed, trial_id)``.  Trial ids are fixed before any work is
scheduled, so the rows do not depend on the worker count.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from ..graph import (LEDGER_KINDS, QueryLedger, build_graph, complete, cycle, er_connected,
                     index_query, index_query_budget, lollipop, path,
                     read_edge_list, star, two_component, unweighted, DEGREE, NEIGHBOUR,
                     WALK_ORACLE, SZEGEDY_STEP, WEIGHTED_WALK_ORACLE)
from ..mh import (collapsed_walk, mh_transform, original_hitting_times, unweighted_max_hitting,
                  verify_mh_hitting)
from ..parity import (ParityInstance, explicit_edges, materialize, oracle_adjacency,
                      parity_degree_query, parity_via_connectivity, sortedness_violations)
from ..qsim.oracles import mh_u_from_components, ow_oracle, ow_via_array_queries, weighted_ow_oracle
from ..qsim.state import Basis, StateVector, random_state
from ..search import MHDecider
from ..tradeoff.algorithm import TradeoffDecider, seed_set, seed_walk_length, swap_probability, swap_test_joint
from ..tradeoff.invqws import cost_scale, inverse_qws
from ..tradeoff.wset import WeightedSampleSet
from ..walks import (WalkSampler, commute_time_exact, component, connected_oracle,
                     exact_mixing_time, spectral_gap, stationary_distribution, transition_matrix)
from .config import ExperimentConfig
from .report import Report, parallel_map, trial_rng, trial_seed

LEDGER_COLUMNS = list(LEDGER_KINDS)


def _ledger_row(ledger: QueryLedger) -> dict:
    return ledger.snapshot()


def _graph_from_file(cfg):
    g = read_edge_list(cfg.graph_file)
    return g.graph if hasattr(g, "graph") else g


def _family_graph(family: str, n: int, seed: int):
    """A representative member of a family with about n vertices."""
    if family == "path":
        return path(n)
    if family == "cycle":
        return cycle(max(n, 3))
    if family == "star":
        return star(n)
    if family == "complete":
        return complete(n)
    if family == "lollipop":
        k = max(3, n // 2)
        return lollipop(k, n - k)
    if family == "two_component":
        return two_component(path(n // 2), complete(n - n // 2))
    if family == "er_connected":
        return er_connected(n, min(1.0, 2.0 * math.log(n) / n), seed)
    raise ValueError(family)


FAMILY_ORDER = ("path", "cycle", "star", "complete", "lollipop", "two_component", "er_connected")


def _family_grid(cfg):
    fams = FAMILY_ORDER if cfg.family == "all" else (cfg.family,)
    sizes = (cfg.n,) if cfg.n is not None else cfg.sizes
    return [(f, n) for f in fams for n in sizes]


# ---------------------------------------------------------------- mh-hitting

def mh_hitting(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "seed", "family", "n", "m", "max_hitting", "bound",
                               "ratio", "worst_s", "worst_t", "method", "passed"])
    if cfg.graph_file:
        grid = [("file", None)]
    else:
        grid = _family_grid(cfg)
    for i, (fam, n) in enumerate(grid):
        seed = trial_seed(cfg.seed, i)
        g = _graph_from_file(cfg) if fam == "file" else _family_graph(fam, n, seed % (1 << 32))
        r = verify_mh_hitting(g)
        rep.add(trial=i, seed=seed, family=fam, n=g.n, m=g.m, max_hitting=r.max_hitting,
                bound=r.bound, ratio=r.max_hitting / r.bound, worst_s=r.pair[0],
                worst_t=r.pair[1], method=r.method, passed=r.passed)
    ok = sum(r["passed"] for r in rep.rows)
    rep.passed = ok == len(rep.rows)
    rep.summary("all", ok, len(rep.rows), rep.passed)
    return rep


# ---------------------------------------------------------------- mix-check

def _mixing_pair(g):
    wg = unweighted(g)
    P = transition_matrix(wg).as_float()
    pi = stationary_distribution(wg).probs
    t_unw = exact_mixing_time(P, pi)
    Q = collapsed_walk(g).matrix
    t_mh = exact_mixing_time(Q, np.full(g.n, 1.0 / g.n))
    h_unw = unweighted_max_hitting(g)
    H = original_hitting_times(g, "collapsed")
    h_mh = float(H[np.isfinite(H)].max()) / 2
    return t_unw, t_mh, h_unw, h_mh


def mix_check(cfg: ExperimentConfig) -> Report:
    """Lollipop mixing times of the simple walk and the MH walk.

    MH time is counted in proposals (two steps on G').  The primary rows
    use clique = clique_frac * n; a half-clique split is reported as well.
    """
    rep = Report(cfg.command, ["trial", "n", "clique", "path", "primary", "t_unweighted", "t_mh",
                               "ratio", "hit_unweighted", "hit_mh", "passed"])
    sizes = (cfg.n,) if cfg.n is not None else cfg.sizes
    fracs = [cfg.clique_frac] + ([0.5] if cfg.clique_frac != 0.5 else [])
    trial = 0
    primary = []
    for frac in fracs:
        for n in sizes:
            k = max(3, int(round(frac * n)))
            g = lollipop(k, n - k)
            t_unw, t_mh, h_unw, h_mh = _mixing_pair(g)
            row = dict(trial=trial, n=n, clique=k, path=n - k, primary=frac == cfg.clique_frac,
                       t_unweighted=t_unw, t_mh=t_mh, ratio=t_unw / t_mh,
                       hit_unweighted=h_unw, hit_mh=h_mh, passed=t_unw > t_mh)
            rep.add(**row)
            if row["primary"]:
                primary.append(row)
            trial += 1
    exceeds = all(r["passed"] for r in primary)
    ratios = [r["ratio"] for r in primary]
    grows = all(b > a for a, b in zip(ratios, ratios[1:]))
    rep.passed = exceeds and grows
    rep.summary("primary", sum(r["passed"] for r in primary), len(primary), rep.passed,
                ratio_grows=grows)
    return rep


# ---------------------------------------------------------------- oracle-check

def _oracle_error(circuit, direct) -> float:
    """max over basis inputs of || circuit|b> - direct|b> ||_inf."""
    basis = direct.basis
    worst = 0.0
    D = direct.matrix.tocsc()
    for k, lab in enumerate(basis.labels):
        out = circuit.apply(StateVector.basis_state(basis, lab)).amps
        col = D[:, k].toarray().ravel()
        worst = max(worst, float(np.abs(out - col).max()))
    return worst


def oracle_check(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "seed", "family", "n", "m", "d_max", "err_array",
                               "err_mh", "index_neighbour_max", "index_budget", "array_degree",
                               "array_neighbour", "mh_degree", "mh_walk_oracle", "unitarity",
                               "passed"])
    grid = [("file", None)] if cfg.graph_file else _family_grid(cfg)
    for i, (fam, n) in enumerate(grid):
        seed = trial_seed(cfg.seed, i)
        g = _graph_from_file(cfg) if fam == "file" else _family_graph(fam, n, seed % (1 << 32))
        dmax = int(g.degrees.max()) if g.n else 0
        A = ow_via_array_queries(g)
        err_a = _oracle_error(A, ow_oracle(g))
        M = mh_u_from_components(g)
        err_m = _oracle_error(M, weighted_ow_oracle(M.mh.weighted))
        worst_idx = 0
        for u in range(g.n):
            for v in g.neighbours(u):
                led = QueryLedger()
                index_query(g, u, v, led)
                worst_idx = max(worst_idx, led[NEIGHBOUR])
        budget = index_query_budget(max(dmax, 1))
        rng = trial_rng(cfg.seed, i)
        la, lm = QueryLedger(), QueryLedger()
        A.apply(random_state(A.basis, rng), la)
        M.apply(random_state(M.basis, rng), lm)
        unit = max(A.unitarity_error(), M.unitarity_error())
        ok = (err_a <= 1e-9 and err_m <= 1e-9 and worst_idx <= budget
              and la[DEGREE] <= 4 and lm[DEGREE] <= 4 and lm[WALK_ORACLE] <= 1 and unit <= 1e-9)
        rep.add(trial=i, seed=seed, family=fam, n=g.n, m=g.m, d_max=dmax, err_array=err_a,
                err_mh=err_m, index_neighbour_max=worst_idx, index_budget=budget,
                array_degree=la[DEGREE], array_neighbour=la[NEIGHBOUR], mh_degree=lm[DEGREE],
                mh_walk_oracle=lm[WALK_ORACLE], unitarity=unit, passed=ok)
    ok = sum(r["passed"] for r in rep.rows)
    rep.passed = ok == len(rep.rows)
    rep.summary("all", ok, len(rep.rows), rep.passed)
    return rep


# ---------------------------------------------------------------- qws-demo

def search_suite():
    """20 connected and 20 disconnected (label, graph spec, s, t) instances, n <= 32."""
    conn = [
        ("path8", ("path", 8), 0, 7), ("path16", ("path", 16), 0, 15),
        ("path32", ("path", 32), 0, 31), ("cycle9", ("cycle", 9), 0, 4),
        ("cycle16", ("cycle", 16), 0, 8), ("cycle31", ("cycle", 31), 0, 15),
        ("star8", ("star", 8), 1, 2), ("star32", ("star", 32), 1, 31),
        ("complete8", ("complete", 8), 0, 7), ("complete16", ("complete", 16), 0, 15),
        ("complete32", ("complete", 32), 0, 31), ("lollipop4_4", ("lollipop", 4, 4), 0, 7),
        ("lollipop8_8", ("lollipop", 8, 8), 0, 15), ("lollipop16_16", ("lollipop", 16, 16), 0, 31),
        ("lollipop8_24", ("lollipop", 8, 24), 0, 31), ("er12", ("er", 12, 0.3, 1), 0, 11),
        ("er20", ("er", 20, 0.2, 2), 0, 19), ("er32", ("er", 32, 0.15, 3), 0, 31),
        ("path8+complete8", ("two", ("path", 8), ("complete", 8)), 0, 7),
        ("cycle10+star10", ("two", ("cycle", 10), ("star", 10)), 11, 15),
    ]
    pairs = [(("path", 4), ("path", 4)), (("path", 8), ("path", 8)), (("path", 16), ("path", 16)),
             (("cycle", 5), ("cycle", 7)), (("cycle", 16), ("cycle", 16)), (("star", 6), ("star", 10)),
             (("star", 16), ("path", 16)), (("complete", 4), ("complete", 4)),
             (("complete", 8), ("complete", 8)), (("complete", 16), ("complete", 16)),
             (("complete", 8), ("path", 24)), (("lollipop", 4, 4), ("path", 8)),
             (("lollipop", 8, 8), ("complete", 16)), (("er", 10, 0.3, 4), ("er", 10, 0.3, 5)),
             (("er", 16, 0.25, 6), ("cycle", 16)), (("er", 12, 0.3, 7), ("complete", 20)),
             (("path", 2), ("complete", 30)), (("complete", 30), ("path", 2)),
             (("cycle", 3), ("lollipop", 8, 8)), (("star", 24), ("complete", 8))]
    disc = []
    for a, b in pairs:
        na = build_spec(a).n
        nb = build_spec(b).n
        disc.append((f"{_spec_name(a)}|{_spec_name(b)}", ("two", a, b), 0, na + nb - 1))
    return conn, disc


def _spec_name(spec):
    if spec[0] == "er":
        return f"er{spec[1]}s{spec[3]}"
    return spec[0] + "_".join(str(x) for x in spec[1:])


def build_spec(spec):
    kind = spec[0]
    if kind == "path":
        return path(spec[1])
    if kind == "cycle":
        return cycle(spec[1])
    if kind == "star":
        return star(spec[1])
    if kind == "complete":
        return complete(spec[1])
    if kind == "lollipop":
        return lollipop(spec[1], spec[2])
    if kind == "er":
        return er_connected(spec[1], spec[2], spec[3])
    if kind == "two":
        return two_component(build_spec(spec[1]), build_spec(spec[2]))
    if kind == "file":
        g = read_edge_list(spec[1])
        return g.graph if hasattr(g, "graph") else g
    raise ValueError(f"unknown graph spec {spec!r}")


def _search_task(task):
    label, spec, s, t, rounds, c_bound, seed, first_trial, trials = task
    g = build_spec(spec)
    truth = connected_oracle(g, s, t)
    cb = None
    if c_bound == "exact":
        mh = mh_transform(g)
        cb = max(1.0, commute_time_exact(mh.weighted, mh.original(s), {mh.original(t)})) \
            if truth else 1.0
    dec = MHDecider(g, s, t, rounds=rounds, C_bound=cb)
    rows = []
    for k in range(trials):
        tid = first_trial + k
        rng = trial_rng(seed, tid)
        led = QueryLedger()
        out = dec.run(rng, led)
        rows.append(dict(trial=tid, seed=trial_seed(seed, tid), instance=label, n=g.n, s=s, t=t,
                         truth="connected" if truth else "disconnected", outcome=out,
                         correct=out == ("connected" if truth else "disconnected"),
                         **_ledger_row(led)))
    return rows


def qws_demo(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "seed", "instance", "n", "s", "t", "truth", "outcome",
                               "correct"] + LEDGER_COLUMNS)
    if cfg.graph_file:
        g = build_spec(("file", cfg.graph_file))
        label = "file"
        group = "connected" if connected_oracle(g, cfg.s, cfg.t) else "disconnected"
        instances = [(group, label, ("file", cfg.graph_file), cfg.s, cfg.t)]
    else:
        conn, disc = search_suite()
        instances = [("connected",) + x for x in conn] + [("disconnected",) + x for x in disc]
    tasks = [(label, spec, s, t, cfg.rounds, cfg.c_bound, cfg.seed, i * cfg.trials, cfg.trials)
             for i, (_, label, spec, s, t) in enumerate(instances)]
    for rows in parallel_map(_search_task, tasks, cfg.workers):
        rep.rows.extend(rows)
    passed = True
    for group, label, *_ in instances:
        rows = [r for r in rep.rows if r["instance"] == label]
        hits = sum(r["outcome"] == "connected" for r in rows)
        if group == "connected":
            s = rep.summary(label, hits, len(rows))
            ok = s["wilson_lo"] >= 2 / 3
        else:
            s = rep.summary(label, hits, len(rows))
            ok = hits == 0
        s["passed"] = ok
        passed &= ok
    rep.passed = passed
    return rep


# ---------------------------------------------------------------- qws-scaling

def qws_scaling(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "seed", "instance", "n", "commute", "c_bound", "outcome",
                               "correct"] + LEDGER_COLUMNS)
    sizes = (cfg.n,) if cfg.n is not None else cfg.sizes
    means, commutes = [], []
    for i, n in enumerate(sizes):
        g = _family_graph(cfg.family, n, trial_seed(cfg.seed, i) % (1 << 32))
        s, t = 0, g.n - 1
        mh = mh_transform(g)
        C = commute_time_exact(mh.weighted, mh.original(s), {mh.original(t)})
        dec = MHDecider(g, s, t, rounds=cfg.rounds, C_bound=C if cfg.c_bound == "exact" else None)
        counts = []
        for k in range(cfg.trials):
            tid = i * cfg.trials + k
            led = QueryLedger()
            out = dec.run(trial_rng(cfg.seed, tid), led)
            counts.append(led[SZEGEDY_STEP])
            rep.add(trial=tid, seed=trial_seed(cfg.seed, tid), instance=f"{cfg.family}{n}", n=g.n,
                    commute=C, c_bound=dec.C_bound, outcome=out,
                    correct=out == ("connected" if connected_oracle(g, s, t) else "disconnected"),
                    **_ledger_row(led))
        means.append(float(np.mean(counts)))
        commutes.append(C)
        rep.summary(f"{cfg.family}{n}", mean_walk_steps=means[-1], commute=C)
    if len(sizes) >= 2:
        slope, icpt = np.polyfit(np.log(commutes), np.log(means), 1)
        rep.passed = abs(slope - 0.5) <= 0.15
        rep.summary("fit", slope=float(slope), intercept=float(icpt), passed=rep.passed)
    else:
        rep.passed = True
    return rep


# ---------------------------------------------------------------- seedset-check

def seedset_suite():
    return [("complete16", ("complete", 16)), ("cycle15", ("cycle", 15)),
            ("lollipop8_8", ("lollipop", 8, 8)), ("er32", ("er", 32, 0.2, 1)),
            ("er64", ("er", 64, 0.1, 2))]


def _seedset_task(task):
    label, spec, p, c, reps, seed, tid = task
    g = build_spec(spec)
    wg = unweighted(g)
    gap = spectral_gap(wg)
    pi = stationary_distribution(wg)
    v0 = g.n - 1
    rng = trial_rng(seed, tid)
    length = seed_walk_length(gap, pi.pi_min, p, g.n)
    count = c * p
    led = QueryLedger()
    ends = WalkSampler(wg).run(np.full(reps * count, v0), length, rng, led).reshape(reps, count)
    floor = p / (8 * g.n)
    rows = []
    for r, row in enumerate(ends):
        L = np.unique(row)
        piL = float(pi.probs[L].sum())
        rows.append(dict(trial=tid, rep=r, seed=trial_seed(seed, tid), instance=label, n=g.n,
                         p=p, gap=gap, walk_length=length, walks=count, size=len(L),
                         pi_L=piL, floor=floor, outcome=piL >= floor))
    return rows


def seedset_check(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "rep", "seed", "instance", "n", "p", "gap", "walk_length",
                               "walks", "size", "pi_L", "floor", "outcome"])
    suite = seedset_suite()
    tasks = []
    for i, (label, spec) in enumerate(suite):
        for j, p in enumerate(cfg.p):
            tasks.append((label, spec, p, cfg.c, cfg.reps, cfg.seed, i * len(cfg.p) + j))
    passed = True
    for task, rows in zip(tasks, parallel_map(_seedset_task, tasks, cfg.workers)):
        rep.rows.extend(rows)
        hits = sum(r["outcome"] for r in rows)
        sigma = math.sqrt(0.9 * 0.1 / len(rows))
        s = rep.summary(f"{task[0]}:p={task[2]}", hits, len(rows))
        s["passed"] = s["freq"] >= 0.9 - 3 * sigma
        s["sigma"] = sigma
        passed &= s["passed"]
    rep.passed = passed
    return rep


# ---------------------------------------------------------------- invqws-check

def invqws_suite():
    return [("complete16", ("complete", 16)), ("cycle15", ("cycle", 15)),
            ("lollipop6_4", ("lollipop", 6, 4)), ("er24", ("er", 24, 0.25, 3)),
            ("er32", ("er", 32, 0.2, 1))]


SMALL_SEED_CONSTANTS = (1, 4)


def _seed_constants(c):
    """The configured c, then small constants whose seed sets miss part of the graph."""
    return (c,) + tuple(x for x in SMALL_SEED_CONSTANTS if x != c)


def invqws_check(cfg: ExperimentConfig) -> Report:
    """Fidelity under the seed-set schedule and the cost of the exact-pi(A) schedule.

    At n <= 32 the configured c = 120 seed sets cover every vertex, so the
    trials are repeated with c in {1, 4}, where pi(A) < 1.
    """
    rep = Report(cfg.command, ["trial", "seed", "instance", "n", "c", "p", "size", "pi_A", "floor",
                               "fidelity", "distance", "rounds", "copies", "bits",
                               "fidelity_exact", "oracle_calls", "cost_scale", "cost_ratio",
                               "outcome"])
    tid = 0
    ratios = []
    passed = True
    for label, spec in invqws_suite():
        g = build_spec(spec)
        wg = unweighted(g)
        gap = spectral_gap(wg)
        pi_min = stationary_distribution(wg).pi_min
        for c, p in itertools.product(_seed_constants(cfg.c), cfg.p):
            floor = p / (8 * g.n)
            for _ in range(cfg.trials):
                rng = trial_rng(cfg.seed, tid)
                L = seed_set(wg, g.n - 1, p, gap, pi_min, rng, c)
                st = inverse_qws(wg, L.vertices, gap, cfg.eps, pi_floor=floor)
                led = QueryLedger()
                ex = inverse_qws(wg, L.vertices, gap, cfg.eps, led)
                calls = led[WEIGHTED_WALK_ORACLE]
                scale = cost_scale(st.pi_A, gap, cfg.eps)
                ok = st.pi_A < floor or st.fidelity() >= 1 - cfg.eps
                ok &= ex.fidelity() >= 1 - cfg.eps
                if ex.schedule.rounds > 0:
                    ratios.append(calls / scale)
                passed &= ok
                rep.add(trial=tid, seed=trial_seed(cfg.seed, tid), instance=label, n=g.n, c=c, p=p,
                        size=len(L), pi_A=st.pi_A, floor=floor, fidelity=st.fidelity(),
                        distance=st.distance(), rounds=st.schedule.rounds,
                        copies=st.schedule.copies, bits=st.schedule.bits,
                        fidelity_exact=ex.fidelity(), oracle_calls=calls, cost_scale=scale,
                        cost_ratio=calls / scale, outcome=ok)
                tid += 1
    # small seed sets: the schedule from pi(A) needs at least one round here
    for label, spec in invqws_suite():
        g = build_spec(spec)
        wg = unweighted(g)
        gap = spectral_gap(wg)
        for size in (1, 2, 3):
            A = tuple(range(size))
            led = QueryLedger()
            ex = inverse_qws(wg, A, gap, cfg.eps, led)
            calls = led[WEIGHTED_WALK_ORACLE]
            scale = cost_scale(ex.pi_A, gap, cfg.eps)
            ok = ex.fidelity() >= 1 - cfg.eps
            if ex.schedule.rounds > 0:
                ratios.append(calls / scale)
            passed &= ok
            rep.add(trial=tid, seed=trial_seed(cfg.seed, tid), instance=label, n=g.n, size=size,
                    pi_A=ex.pi_A, fidelity_exact=ex.fidelity(), distance=ex.distance(),
                    rounds=ex.schedule.rounds, copies=ex.schedule.copies, bits=ex.schedule.bits,
                    oracle_calls=calls, cost_scale=scale, cost_ratio=calls / scale, outcome=ok)
            tid += 1
    n_ok = sum(bool(r["outcome"]) for r in rep.rows)
    rep.summary("fidelity", n_ok, len(rep.rows), passed)
    if ratios:
        kappa = float(np.median(ratios))
        spread = max(ratios) / min(ratios)
        cost_ok = spread <= 4.0
        rep.summary("cost", kappa=kappa, ratio_min=min(ratios), ratio_max=max(ratios),
                    spread=spread, passed=cost_ok)
        passed &= cost_ok
    rep.passed = passed
    return rep


# ---------------------------------------------------------------- swap-check

SWAP_OVERLAPS = (0.0, 1 / 3, 2 / 3, 1.0)


def overlap_pair(r: float, dim: int, rng: np.random.Generator):
    """Two random states in C^dim with |<a|b>| = r."""
    basis = Basis(list(range(dim)))
    a = random_state(basis, rng)
    w = random_state(basis, rng).amps
    w = w - np.vdot(a.amps, w) * a.amps
    w /= np.linalg.norm(w)
    phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
    b = StateVector(basis, phase * (r * a.amps + math.sqrt(1 - r * r) * w))
    return a, b


def swap_check(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "seed", "overlap", "shots", "zeros", "freq_zero",
                               "expected", "circuit_p0", "sigma", "z", "passed"])
    passed = True
    for i, r in enumerate(SWAP_OVERLAPS):
        rng = trial_rng(cfg.seed, i)
        a, b = overlap_pair(r, 4, rng)
        _, p0 = swap_test_joint(a, b, rng)
        expected = 0.5 * (1 + r * r)
        zeros = int((rng.random(cfg.shots) < p0).sum())
        freq = zeros / cfg.shots
        sigma = math.sqrt(expected * (1 - expected) / cfg.shots)
        if sigma > 0:
            z = (freq - expected) / sigma
        else:
            z = 0.0 if freq == expected else math.inf
        ok = abs(z) <= 3 and abs(p0 - expected) <= 1e-12 and abs(swap_probability(a, b) - expected) <= 1e-12
        passed &= ok
        rep.add(trial=i, seed=trial_seed(cfg.seed, i), overlap=r, shots=cfg.shots, zeros=zeros,
                freq_zero=freq, expected=expected, circuit_p0=p0, sigma=sigma, z=z, passed=ok)
    rep.passed = passed
    rep.summary("all", sum(r["passed"] for r in rep.rows), len(rep.rows), passed)
    return rep


# ---------------------------------------------------------------- tradeoff-run

def tradeoff_suite():
    conn = [
        ("complete8", ("complete", 8), 0, 7), ("complete12", ("complete", 12), 0, 11),
        ("complete16", ("complete", 16), 0, 15), ("er16", ("er", 16, 0.4, 11), 0, 15),
        ("er24", ("er", 24, 0.3, 12), 0, 23), ("er32", ("er", 32, 0.25, 13), 0, 31),
        ("cycle9", ("cycle", 9), 0, 4), ("lollipop6_3", ("lollipop", 6, 3), 0, 8),
        ("complete8+er12", ("two", ("complete", 8), ("er", 12, 0.4, 14)), 8, 19),
        ("er20", ("er", 20, 0.3, 15), 0, 19),
    ]
    disc = [
        ("complete8|complete8", ("two", ("complete", 8), ("complete", 8)), 0, 15),
        ("complete6|er12", ("two", ("complete", 6), ("er", 12, 0.4, 16)), 0, 17),
        ("er16|er16", ("two", ("er", 16, 0.3, 17), ("er", 16, 0.3, 18)), 0, 31),
        ("cycle7|complete9", ("two", ("cycle", 7), ("complete", 9)), 0, 15),
        ("complete4|complete20", ("two", ("complete", 4), ("complete", 20)), 0, 23),
        ("complete12|complete12", ("two", ("complete", 12), ("complete", 12)), 0, 23),
        ("er10|cycle9", ("two", ("er", 10, 0.4, 19), ("cycle", 9)), 0, 18),
        ("lollipop6_3|complete10", ("two", ("lollipop", 6, 3), ("complete", 10)), 0, 18),
        ("complete3|er24", ("two", ("complete", 3), ("er", 24, 0.3, 20)), 0, 26),
        ("complete16|complete16", ("two", ("complete", 16), ("complete", 16)), 0, 31),
    ]
    return conn, disc


def _component_gap(g, v):
    comp = sorted(component(g, v))
    sub = [(comp.index(a), comp.index(b)) for a, b in g.edge_list if a in comp and b in comp]
    return spectral_gap(unweighted(build_graph(len(comp), sub)))


def _tradeoff_task(task):
    label, spec, s, t, p, c, eps, reps, threshold, delta, seed, first, trials = task
    g = build_spec(spec)
    truth = connected_oracle(g, s, t)
    if delta is None:
        delta = min(_component_gap(g, s), _component_gap(g, t))
    dec = TradeoffDecider(unweighted(g), s, t, delta, p, c, eps)
    rows = []
    for k in range(trials):
        tid = first + k
        led = QueryLedger()
        out = dec.run_amplified(trial_rng(seed, tid), reps, threshold, led)
        exp = "connected" if truth else "disconnected"
        rows.append(dict(trial=tid, seed=trial_seed(seed, tid), instance=label, n=g.n, s=s, t=t,
                         delta=delta, truth=exp, outcome=out, correct=out == exp,
                         **_ledger_row(led)))
    return rows


def tradeoff_run(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "seed", "instance", "n", "s", "t", "delta", "truth",
                               "outcome", "correct"] + LEDGER_COLUMNS)
    if cfg.graph_file:
        instances = [("file", ("file", cfg.graph_file), cfg.s, cfg.t)]
    else:
        conn, disc = tradeoff_suite()
        instances = conn + disc
    p = cfg.p[0]
    tasks = [(label, spec, s, t, p, cfg.c, cfg.eps, cfg.reps, cfg.threshold, cfg.delta,
              cfg.seed, i * cfg.trials, cfg.trials) for i, (label, spec, s, t) in enumerate(instances)]
    passed = True
    for task, rows in zip(tasks, parallel_map(_tradeoff_task, tasks, cfg.workers)):
        rep.rows.extend(rows)
        ok_count = sum(r["correct"] for r in rows)
        s = rep.summary(task[0], ok_count, len(rows))
        s["passed"] = s["wilson_lo"] >= 2 / 3
        passed &= s["passed"]
    rep.passed = passed
    return rep


# ---------------------------------------------------------------- parity-check

def parity_check(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "n", "x", "parity", "connected", "neighbour_queries",
                               "oracle_queries", "degree_oracle_queries", "structure_ok",
                               "sorted_ok", "passed"])
    tid = 0
    for n in range(cfg.nmin, cfg.nmax + 1):
        for x in itertools.product((0, 1), repeat=n):
            inst = ParityInstance(x)
            par = sum(x) % 2
            conn = parity_via_connectivity(x)
            # degree queries over every vertex: no O_x use
            before = inst.queries
            for v in inst.vertices():
                parity_degree_query(inst, v)
            deg_q = inst.queries - before
            before = inst.queries
            adj = oracle_adjacency(inst)
            nq = sum(len(nb) for nb in adj.values())
            oq = inst.queries - before
            want = {}
            for a, b in explicit_edges(x):
                want.setdefault(a, []).append(b)
                want.setdefault(b, []).append(a)
            g = materialize(x)
            structure = all(sorted(want.get(v, [])) == sorted(adj[v]) for v in adj) and all(
                sorted(ParityInstance.vertex_id(w) for w in adj[v])
                == list(g.neighbours(ParityInstance.vertex_id(v))) for v in adj)
            sorted_ok = not sortedness_violations(ParityInstance(x))
            ok = conn == par and oq == nq and deg_q == 0 and structure and sorted_ok
            rep.add(trial=tid, n=n, x="".join(map(str, x)), parity=par, connected=conn,
                    neighbour_queries=nq, oracle_queries=oq, degree_oracle_queries=deg_q,
                    structure_ok=structure, sorted_ok=sorted_ok, passed=ok)
            tid += 1
    n_ok = sum(r["passed"] for r in rep.rows)
    rep.passed = n_ok == len(rep.rows)
    rep.summary("all", n_ok, len(rep.rows), rep.passed)
    return rep


# ---------------------------------------------------------------- wset-fuzz

def _fuzz(ws: WeightedSampleSet, key_space: int, ops: int, rng: np.random.Generator, rep: Report):
    mirror = {}
    ok_all = True
    for k in range(ops):
        x = int(rng.integers(key_space))
        r = rng.random()
        if r < 0.4:
            c = int(rng.integers(1, 1000))
            op = "insert"
            # a full set refuses any insert before looking for the key
            if len(mirror) >= ws.capacity:
                try:
                    ws.insert(x, c)
                    got = "no-error"
                except OverflowError:
                    got = "OverflowError"
                want = "OverflowError"
            elif x in mirror:
                try:
                    ws.insert(x, c)
                    got = "no-error"
                except KeyError:
                    got = "KeyError"
                want = "KeyError"
            else:
                ws.insert(x, c)
                mirror[x] = c
                got = want = "ok"
        elif r < 0.7:
            op = "delete"
            if x in mirror:
                ws.delete(x)
                del mirror[x]
                got = want = "ok"
            else:
                try:
                    ws.delete(x)
                    got = "no-error"
                except KeyError:
                    got = "KeyError"
                want = "KeyError"
        elif r < 0.9:
            op = "contains"
            got, want = ws.contains(x), x in mirror
        else:
            op = "prepare"
            if mirror:
                st = ws.prepare_state()
                keys = sorted(mirror)
                tot = sum(mirror.values())
                exact = np.sqrt(np.array([mirror[q] for q in keys], dtype=float) / tot)
                err = float(np.abs(st.amps - exact).max()) if list(st.basis.labels) == keys else math.inf
                got, want = err <= 1e-12, True
            else:
                got = want = True
        struct = ws.total == sum(mirror.values()) and len(ws) == len(mirror) \
            and ws.items() == sorted(mirror.items())
        ok = got == want and struct
        ok_all &= ok
        rep.add(trial=k, op=op, key=x, expected=want, got=got, touches=ws.last_touches, size=len(mirror),
                passed=ok)
    ws.audit()
    return ok_all


def wset_fuzz(cfg: ExperimentConfig) -> Report:
    rep = Report(cfg.command, ["trial", "seed", "op", "key", "expected", "got", "size", "ell",
                               "touches", "mean_touches", "max_touches", "passed"])
    rng = trial_rng(cfg.seed, 0)
    ws = WeightedSampleSet(256, 10)
    fuzz_ok = _fuzz(ws, 1024, cfg.ops, rng, rep)
    for r in rep.rows:
        r["seed"] = trial_seed(cfg.seed, 0)
    ells, means, maxes = [], [], []
    tid = cfg.ops
    for k in range(4, cfg.nmax + 1):
        ell = 1 << k
        rng = trial_rng(cfg.seed, tid)
        keys = rng.permutation(1 << (cfg.nmax + 2))[:ell + 64]
        ws = WeightedSampleSet(ell + 64, cfg.nmax + 2, weight_bound=1 << 20)
        for x in keys[:ell]:
            ws.insert(int(x), int(rng.integers(1, 1 << 10)))
        touches = []
        for j in range(64):
            ws.contains(int(keys[rng.integers(ell)]))
            touches.append(ws.last_touches)
            ws.insert(int(keys[ell + j]), 1)
            touches.append(ws.last_touches)
            ws.delete(int(keys[ell + j]))
            touches.append(ws.last_touches)
            ws.sample(rng)
            touches.append(ws.last_touches)
        ells.append(ell)
        means.append(float(np.mean(touches)))
        maxes.append(int(max(touches)))
        rep.add(trial=tid, seed=trial_seed(cfg.seed, tid), op="touch-profile", ell=ell,
                mean_touches=means[-1], max_touches=maxes[-1], passed=True)
        tid += 1
    x = np.log2(ells)
    a, b = np.polyfit(x, maxes, 1)
    resid = np.asarray(maxes) - (a * x + b)
    ss_tot = float(((maxes - np.mean(maxes)) ** 2).sum())
    r2 = 1 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    fit_ok = a > 0 and r2 >= 0.9 and float(np.abs(resid).max()) <= 4
    rep.summary("fuzz", sum(r["passed"] for r in rep.rows[:cfg.ops]), cfg.ops, fuzz_ok)
    rep.summary("touch-fit", a=float(a), b=float(b), r2=r2, max_residual=float(np.abs(resid).max()),
                passed=fit_ok)
    rep.passed = fuzz_ok and fit_ok
    return rep


CAMPAIGNS = {
    "mh-hitting": mh_hitting,
    "mix-check": mix_check,
    "oracle-check": oracle_check,
    "qws-demo": qws_demo,
    "qws-scaling": qws_scaling,
    "seedset-check": seedset_check,
    "invqws-check": invqws_check,
    "swap-check": swap_check,
    "tradeoff-run": tradeoff_run,
    "parity-check": parity_check,
    "wset-fuzz": wset_fuzz,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    cfg = cfg.resolved()
    return CAMPAIGNS[cfg.command](cfg)


def render(cfg: ExperimentConfig) -> tuple:
    """(report, CSV text) for a configuration."""
    cfg = cfg.resolved()
    report = CAMPAIGNS[cfg.command](cfg)
    return report, report.render(cfg.to_text())
