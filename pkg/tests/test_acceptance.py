"""The twelve acceptance criteria, each run through its harness campaign at defaults.

Every campaign is rendered once and cached; criterion 12 reruns all of them
with two workers and compares the CSV bytes.
"""
import math
import time

import pytest

from ustconlab.harness import ExperimentConfig, render

_CACHE = {}


def run(command, **kw):
    key = (command, tuple(sorted(kw.items())))
    if key not in _CACHE:
        t0 = time.perf_counter()
        rep, text = render(ExperimentConfig(command, **kw))
        _CACHE[key] = (rep, text, time.perf_counter() - t0)
    return _CACHE[key]


def data_rows(rep):
    return list(rep.rows)


def summaries(rep):
    return {s["trial"].split(":", 1)[1]: s for s in rep.summaries}


def test_c01_mh_hitting_bound(record):
    rep, _, secs = run("mh-hitting")
    rows = data_rows(rep)
    fams = {r["family"] for r in rows}
    ok = all(r["max_hitting"] <= 18 * r["n"] ** 2 for r in rows) and max(r["n"] for r in rows) >= 100
    worst = max(r["max_hitting"] / (18 * r["n"] ** 2) for r in rows)
    ok = ok and secs < 120
    record(1, "MH hitting <= 18 n^2", ok,
           f"{len(rows)} graphs over {len(fams)} families, worst H/18n^2 = {worst:.3f}, {secs:.1f}s")
    assert ok


def test_c02_lollipop_contrast(record):
    rep, _, _ = run("mix-check")
    prim = [r for r in data_rows(rep) if r["primary"]]
    prim.sort(key=lambda r: r["n"])
    ratios = [r["t_unweighted"] / r["t_mh"] for r in prim]
    ok = [r["n"] for r in prim] == [16, 32, 64] and all(x > 1 for x in ratios) and all(
        a < b for a, b in zip(ratios, ratios[1:]))
    record(2, "lollipop mixing contrast", ok,
           "t_unw/t_mh = " + ", ".join(f"{r['t_unweighted']}/{r['t_mh']}" for r in prim))
    assert ok


def test_c03_oracle_equivalence(record):
    rep, _, _ = run("oracle-check")
    rows = data_rows(rep)
    err = max(max(r["err_array"], r["err_mh"]) for r in rows)
    budget = all(r["index_neighbour_max"] <= r["index_budget"] for r in rows)
    const = {(r["array_degree"], r["mh_degree"], r["mh_walk_oracle"]) for r in rows}
    ok = err <= 1e-9 and budget and len(const) == 1 and max(r["n"] for r in rows) <= 32
    record(3, "oracle equivalences", ok,
           f"{len(rows)} graphs, max error {err:.1e}, index budgets met: {budget}, "
           f"(deg, MH deg, O_W) per U = {sorted(const)}")
    assert ok


def test_c04_one_sided_error(record):
    rep, _, _ = run("qws-demo")
    rows = data_rows(rep)
    conn = [s for k, s in summaries(rep).items() if "|" not in k]
    false_pos = sum(r["outcome"] == "connected" for r in rows if r["truth"] == "disconnected")
    n_disc = sum(r["truth"] == "disconnected" for r in rows)
    lo = min(s["wilson_lo"] for s in conn)
    ok = len(conn) == 20 and n_disc == 20 * 500 and false_pos == 0 and lo >= 2 / 3
    record(4, "walk search one-sided error", ok,
           f"{false_pos}/{n_disc} false 'connected'; min connected Wilson lower bound {lo:.3f}")
    assert ok


def test_c05_sqrt_scaling(record):
    rep, _, _ = run("qws-scaling")
    slope = summaries(rep)["fit"]["slope"]
    ok = abs(slope - 0.5) <= 0.15
    record(5, "sqrt(C) scaling", ok, f"log-log slope {slope:.3f}")
    assert ok


def test_c06_seed_set_mass(record):
    rep, _, _ = run("seedset-check")
    s = summaries(rep)
    inst = {k.split(":")[0] for k in s}
    worst = min(v["freq"] - (0.9 - 3 * v["sigma"]) for v in s.values())
    reps = min(sum(1 for r in rep.rows if r["instance"] == k.split(":")[0]
                   and r["p"] == int(k.split("=")[1])) for k in s)
    ok = len(inst) >= 5 and reps >= 500 and worst >= 0
    record(6, "seed-set stationary mass", ok,
           f"{len(s)} (instance, p) blocks x {reps} reps, min freq {min(v['freq'] for v in s.values()):.3f}")
    assert ok


def test_c07_inverse_walk_search(record):
    rep, _, _ = run("invqws-check")
    # seed-set rows qualify when pi(A) >= p/8n; the small-A rows are scheduled from pi(A) itself
    rows = [r for r in data_rows(rep) if "floor" not in r or r["pi_A"] >= r["floor"]]
    fmin = min(min(r.get("fidelity", 1.0), r["fidelity_exact"]) for r in rows)
    cost = summaries(rep)["cost"]
    ok = fmin >= 1 - 1 / 8 and cost["passed"]
    record(7, "inverse walk search", ok,
           f"{len(rows)} qualifying trials, min fidelity {fmin:.4f}, "
           f"calls / scale in [{cost['ratio_min']:.1f}, {cost['ratio_max']:.1f}]")
    assert ok


def test_c08_swap_test(record):
    rep, _, _ = run("swap-check")
    rows = data_rows(rep)
    zs = [abs(r["z"]) for r in rows]
    ok = sorted(round(r["overlap"], 6) for r in rows) == [0, round(1 / 3, 6), round(2 / 3, 6), 1] \
        and all(r["shots"] == 100_000 for r in rows) and max(zs) <= 3
    record(8, "SWAP test statistics", ok, "|z| = " + ", ".join(f"{z:.2f}" for z in zs))
    assert ok


def test_c09_amplified_decider(record):
    rep, _, _ = run("tradeoff-run")
    s = summaries(rep)
    conn = [v for k, v in s.items() if "|" not in k]
    disc = [v for k, v in s.items() if "|" in k]
    ok = len(conn) == 10 and len(disc) == 10 and all(v["wilson_lo"] >= 2 / 3 for v in s.values()) \
        and max(r["n"] for r in rep.rows) <= 32
    record(9, "amplified seed-set decider", ok,
           f"min Wilson lower bound connected {min(v['wilson_lo'] for v in conn):.3f}, "
           f"disconnected {min(v['wilson_lo'] for v in disc):.3f}")
    assert ok


def test_c10_parity_reduction(record):
    rep, _, _ = run("parity-check")
    rows = data_rows(rep)
    counts = {}
    for r in rows:
        counts[r["n"]] = counts.get(r["n"], 0) + 1
    ok = counts == {n: 2 ** n for n in range(1, 13)} and all(r["passed"] for r in rows) and all(
        r["oracle_queries"] == r["neighbour_queries"] and r["degree_oracle_queries"] == 0 for r in rows)
    record(10, "parity reduction", ok, f"{len(rows)} strings, n = 1..12, all agree")
    assert ok


def test_c11_weighted_sample_set(record):
    rep, _, _ = run("wset-fuzz")
    s = summaries(rep)
    prof = [r for r in rep.rows if r["op"] == "touch-profile"]
    ok = s["fuzz"]["passed"] and s["touch-fit"]["passed"] and max(r["ell"] for r in prof) == 1 << 16 \
        and sum(1 for r in rep.rows if r["op"] != "touch-profile") == 10_000
    fit = s["touch-fit"]
    record(11, "weighted sample set", ok,
           f"10^4 mirrored ops; max touches ~ {fit['a']:.2f} log2(l) + {fit['b']:.2f}, R^2 {fit['r2']:.3f}")
    assert ok


COMMANDS = ["mh-hitting", "mix-check", "oracle-check", "qws-demo", "qws-scaling", "seedset-check",
            "invqws-check", "swap-check", "tradeoff-run", "parity-check", "wset-fuzz"]


def test_c12_determinism(record):
    same = []
    for cmd in COMMANDS:
        _, first, _ = run(cmd)
        _, again = render(ExperimentConfig(cmd, workers=2))
        same.append(first == again)
    ok = all(same)
    bad = [c for c, s in zip(COMMANDS, same) if not s]
    record(12, "byte-identical reruns", ok,
           f"{sum(same)}/{len(COMMANDS)} campaigns identical under a 2-worker rerun"
           + (f" (differ: {', '.join(bad)})" if bad else ""))
    assert ok
