import csv
import io
import math

import pytest

from ustconlab.graph import path, two_component, write_edge_list
from ustconlab.harness import (ConfigError, ExperimentConfig, Report, render, trial_seed,
                               wilson_interval)
from ustconlab.harness.cli import main


def parse_csv(text):
    header = [l for l in text.splitlines() if l.startswith("#")]
    body = [l for l in text.splitlines() if not l.startswith("#")]
    return header, list(csv.DictReader(io.StringIO("\n".join(body))))


# ---------------------------------------------------------------- config

def test_config_roundtrip():
    cfg = ExperimentConfig("tradeoff-run", p=(2, 4), seed=5, workers=3).resolved()
    text = cfg.to_text()
    back = ExperimentConfig.from_text(text)
    assert back.to_text() == text
    assert back.p == (2, 4) and back.reps == 75 and back.threshold == 0.64
    # workers and out do not change results and stay out of the canonical form
    assert "workers" not in text and "out" not in text


@pytest.mark.parametrize("kwargs,field", [
    (dict(command="bogus"), "command"),
    (dict(command="qws-demo", trials=0), "trials"),
    (dict(command="seedset-check", p=(2, -1)), "p[1]"),
    (dict(command="tradeoff-run", delta=3.0), "delta"),
    (dict(command="tradeoff-run", eps=1.5), "eps"),
    (dict(command="qws-scaling", c_bound="tight"), "c_bound"),
    (dict(command="parity-check", nmax=25), "nmax"),
    (dict(command="parity-check", nmin=5, nmax=3), "nmin"),
    (dict(command="swap-check", graph_file="g.txt"), "graph_file"),
])
def test_config_errors_name_field(kwargs, field):
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(**kwargs).resolved()
    assert exc.value.field == field


def test_from_text_errors():
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_text('{"command": "swap-check", "colour": 1}')
    assert exc.value.field == "colour"
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text("[1, 2]")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text("{not json")


# ---------------------------------------------------------------- seeds and intervals

def test_trial_seeds_frozen():
    assert trial_seed(0, 0) == 15793235383387715774
    assert trial_seed(0, 1) == 5836529245451711556
    assert trial_seed(7, 3) == 5061563556724077661
    assert len({trial_seed(1, i) for i in range(1000)}) == 1000


def test_wilson_interval():
    z = 2.5758293035489004
    lo, hi = wilson_interval(0, 10)
    assert lo == 0 and hi == pytest.approx(z * z / (10 + z * z))
    lo, hi = wilson_interval(10, 10)
    assert hi == 1 and lo == pytest.approx(10 / (10 + z * z))
    lo, hi = wilson_interval(50, 100, 0.95)
    half = 1.959963984540054 * math.sqrt(0.25 / 100 + 1.959963984540054 ** 2 / 40000)
    den = 1 + 1.959963984540054 ** 2 / 100
    assert (lo, hi) == pytest.approx((0.5 - half / den, 0.5 + half / den))
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_report_format():
    rep = Report("swap-check", ["trial", "value"])
    rep.add(trial=0, value=1 / 3)
    rep.add(trial=1, value=True)
    rep.summary("all", 2, 2, True)
    text = rep.render('{"command":"swap-check"}')
    header, rows = parse_csv(text)
    assert header[0].startswith("# ustconlab ")
    assert header[1] == "# command: swap-check"
    assert '# config: {"command":"swap-check"}' in header
    assert rows[0]["value"] == "0.333333333333"
    assert rows[1]["value"] == "1"
    assert rows[-1]["trial"] == "summary:all" and rows[-1]["passed"] == "1"


# ---------------------------------------------------------------- campaigns and CLI

def test_mh_hitting_path64_example():
    _, text = render(ExperimentConfig("mh-hitting", family="path", n=64))
    _, rows = parse_csv(text)
    row = rows[0]
    assert (row["max_hitting"], row["bound"], row["passed"]) == ("16000", "73728", "1")


def test_parity_table_size():
    rep, _ = render(ExperimentConfig("parity-check", nmin=12, nmax=12))
    assert len(rep.rows) == 1 << 12 and rep.passed


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "swap.csv"
    assert main(["swap-check", "--shots", "2000", "--out", str(out)]) == 0
    assert out.read_text().startswith("# ustconlab")
    assert main(["no-such-command"]) == 2
    assert main(["qws-demo", "--trials", "-3"]) == 2
    assert main(["mh-hitting", "--graph-file", str(tmp_path / "missing.txt"), "--s", "0",
                 "--t", "1"]) == 2
    g = tmp_path / "p20.txt"
    write_edge_list(path(20), g)
    # one amplification round is far too few on a long path
    assert main(["qws-demo", "--graph-file", str(g), "--s", "0", "--t", "19",
                 "--trials", "100", "--rounds", "1", "--out", str(tmp_path / "f.csv")]) == 1
    capsys.readouterr()
    assert main(["wset-fuzz", "--print-config"]) == 0
    assert '"ops":10000' in capsys.readouterr().out


def test_cli_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("USTCONLAB_OUT", str(tmp_path / "runs"))
    assert main(["parity-check", "--nmax", "3"]) == 0
    _, rows = parse_csv((tmp_path / "runs" / "parity-check.csv").read_text())
    assert len(rows) == 2 + 4 + 8 + 1


def test_cli_graph_file(tmp_path):
    g = tmp_path / "two.txt"
    write_edge_list(two_component(path(3), path(3)), g)
    dest = tmp_path / "demo.csv"
    assert main(["qws-demo", "--graph-file", str(g), "--s", "0", "--t", "4", "--trials", "50",
                 "--out", str(dest)]) == 0
    _, rows = parse_csv(dest.read_text())
    trials = [r for r in rows if not r["trial"].startswith("summary")]
    assert len(trials) == 50
    assert all(r["outcome"] == "disconnected" for r in trials)


def test_determinism_across_workers(tmp_path):
    g = tmp_path / "p12.txt"
    write_edge_list(path(12), g)
    base = dict(graph_file=str(g), s=0, t=11, trials=40)
    _, a = render(ExperimentConfig("qws-demo", **base))
    _, b = render(ExperimentConfig("qws-demo", **base))
    _, c = render(ExperimentConfig("qws-demo", workers=2, **base))
    assert a == b == c
    _, d = render(ExperimentConfig("qws-demo", seed=1, **base))
    assert d != a


def test_determinism_in_worker_pool():
    # several (instance, p) blocks, so the pool really splits the work
    cfg = dict(p=(2, 4), reps=10)
    _, a = render(ExperimentConfig("seedset-check", **cfg))
    _, b = render(ExperimentConfig("seedset-check", workers=2, **cfg))
    assert a == b
