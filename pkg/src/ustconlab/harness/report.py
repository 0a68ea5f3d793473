"""CSV reports, per-trial seeding, Wilson intervals and the worker pool."""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .. import __version__


def trial_seed(master: int, index: int) -> int:
    """Seed of trial ``index``: the first word of SeedSequence([master, index])."""
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1, dtype=np.uint64)[0])


def trial_rng(master: int, index: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(master, index))


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> tuple:
    if trials == 0:
        return (0.0, 1.0)
    z = norm.ppf(0.5 + confidence / 2)
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return (max(0.0, centre - half), min(1.0, centre + half))


def parallel_map(fn, tasks, workers: int = 1) -> list:
    """Order-preserving map, optionally over a process pool."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return "%.12g" % v
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


SUMMARY_COLUMNS = ("freq", "wilson_lo", "wilson_hi", "passed")


@dataclass
class Report:
    """Rows of one campaign plus summary rows and the overall verdict."""

    command: str
    columns: list
    rows: list = field(default_factory=list)
    summaries: list = field(default_factory=list)
    passed: bool = True
    notes: list = field(default_factory=list)

    def add(self, **row) -> None:
        self.rows.append(row)

    def summary(self, label: str, successes=None, trials=None, passed=None, **extra) -> dict:
        row = {"trial": f"summary:{label}"}
        if successes is not None and trials:
            lo, hi = wilson_interval(successes, trials)
            row.update(freq=successes / trials, wilson_lo=lo, wilson_hi=hi)
        if passed is not None:
            row["passed"] = bool(passed)
        row.update(extra)
        self.summaries.append(row)
        return row

    def render(self, config_text: str) -> str:
        cols = ["trial"] + [c for c in self.columns if c != "trial"]
        cols += [c for c in SUMMARY_COLUMNS if c not in cols]
        extra = sorted({k for r in self.summaries for k in r} - set(cols))
        cols += extra
        out = io.StringIO()
        out.write(f"# ustconlab {__version__}\n")
        out.write(f"# command: {self.command}\n")
        out.write(f"# config: {config_text}\n")
        for note in self.notes:
            out.write(f"# {note}\n")
        out.write(f"# verdict: {'pass' if self.passed else 'fail'}\n")
        out.write(",".join(cols) + "\n")
        for r in self.rows + self.summaries:
            out.write(",".join(fmt(r.get(c)) for c in cols) + "\n")
        return out.getvalue()
