"""Command-line entry point: ``ustconlab <subcommand> [options]``.

Exit status is 0 when the campaign's criterion passes, 1 when it fails and
2 on a usage or configuration error.  The CSV goes to ``--out``, or into the
directory named by ``USTCONLAB_OUT`` as ``<subcommand>.csv``, or to stdout.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .campaigns import CAMPAIGNS
from .config import COMMANDS, ConfigError, ExperimentConfig

OUT_ENV = "USTCONLAB_OUT"

HELP = {
    "mh-hitting": "max hitting time on the MH graph against 18 n^2",
    "mix-check": "lollipop mixing times, simple walk vs MH walk",
    "oracle-check": "composed walk oracles against the direct ones",
    "qws-demo": "walk-search decider trials (one-sided error)",
    "qws-scaling": "walk-operator count against exact commute time",
    "seedset-check": "Monte Carlo of the seed-set stationary mass",
    "invqws-check": "fidelity and cost of inverse walk search",
    "swap-check": "SWAP test statistics",
    "tradeoff-run": "amplified seed-set decider trials",
    "parity-check": "exhaustive parity reduction table",
    "wset-fuzz": "weighted sample set against a dict mirror",
}


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--out", help="output CSV path")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--print-config", action="store_true",
                        help="print the canonical config and exit")

    parser = argparse.ArgumentParser(prog="ustconlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=HELP[name])
        if name in ("mh-hitting", "mix-check", "oracle-check", "qws-scaling"):
            p.add_argument("--family")
            p.add_argument("--n", type=int)
            p.add_argument("--sizes", type=_int_list)
        if name in ("mh-hitting", "oracle-check", "qws-demo", "tradeoff-run"):
            p.add_argument("--graph-file", help="graph in edge-list format")
        if name in ("qws-demo", "tradeoff-run"):
            p.add_argument("--s", type=int)
            p.add_argument("--t", type=int)
        if name in ("qws-demo", "qws-scaling", "invqws-check", "tradeoff-run"):
            p.add_argument("--trials", type=int)
        if name in ("qws-demo", "qws-scaling"):
            p.add_argument("--rounds", type=int)
            p.add_argument("--c-bound", choices=("mh", "exact"))
        if name in ("seedset-check", "invqws-check", "tradeoff-run"):
            p.add_argument("--p", type=_int_list, help="walk-count multiplier(s), e.g. 2,4,8")
            p.add_argument("--c", type=int)
        if name in ("seedset-check", "tradeoff-run"):
            p.add_argument("--reps", type=int)
        if name in ("invqws-check", "tradeoff-run"):
            p.add_argument("--eps", type=float)
        if name == "tradeoff-run":
            p.add_argument("--delta", type=float, help="gap override (default: exact gap)")
            p.add_argument("--threshold", type=float)
        if name == "mix-check":
            p.add_argument("--clique-frac", type=float)
        if name == "swap-check":
            p.add_argument("--shots", type=int)
        if name == "parity-check":
            p.add_argument("--nmin", type=int, help="shortest string length (default 1)")
        if name in ("parity-check", "wset-fuzz"):
            p.add_argument("--nmax", type=int)
        if name == "wset-fuzz":
            p.add_argument("--ops", type=int)
    return parser


def config_from_args(args) -> ExperimentConfig:
    fields = {k: v for k, v in vars(args).items() if k not in ("print_config",) and v is not None}
    return ExperimentConfig(**fields).resolved()


def output_path(cfg: ExperimentConfig):
    if cfg.out:
        return Path(cfg.out)
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env) / f"{cfg.command}.csv"
    return None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"ustconlab: config error at {exc.field}: {exc.message}", file=sys.stderr)
        return 2
    if args.print_config:
        print(cfg.to_text())
        return 0
    try:
        report = CAMPAIGNS[cfg.command](cfg)
    except (OSError, ValueError) as exc:
        print(f"ustconlab: {exc}", file=sys.stderr)
        return 2
    text = report.render(cfg.to_text())
    dest = output_path(cfg)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    status = "pass" if report.passed else "FAIL"
    print(f"{cfg.command}: {status} ({len(report.rows)} rows)", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
