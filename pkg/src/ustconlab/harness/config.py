"""Experiment configuration with a canonical JSON text form."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace

from ..graph import FAMILIES

COMMANDS = (
    "mh-hitting", "mix-check", "oracle-check", "qws-demo", "qws-scaling", "seedset-check",
    "invqws-check", "swap-check", "tradeoff-run", "parity-check", "wset-fuzz",
)


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is the dotted path of the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    family: str | None = None
    n: int | None = None
    sizes: tuple | None = None
    p: tuple | None = None
    delta: float | None = None
    eps: float | None = None
    c: int | None = None
    reps: int | None = None
    rounds: int | None = None
    c_bound: str | None = None
    trials: int | None = None
    seed: int = 0
    s: int | None = None
    t: int | None = None
    graph_file: str | None = None
    nmin: int | None = None
    nmax: int | None = None
    ops: int | None = None
    shots: int | None = None
    clique_frac: float | None = None
    threshold: float | None = None
    workers: int = 1
    out: str | None = None

    def to_text(self) -> str:
        """Canonical form: sorted-key JSON without whitespace.

        ``workers`` and ``out`` are excluded, since they do not change the
        results.
        """
        d = asdict(self)
        d.pop("workers")
        d.pop("out")
        d = {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<text>", f"not valid JSON ({exc.msg})") from None
        if not isinstance(d, dict):
            raise ConfigError("<text>", "expected a JSON object")
        return from_dict(d)

    def resolved(self) -> "ExperimentConfig":
        """Fill command defaults and validate."""
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown subcommand {self.command!r}")
        filled = {k: v for k, v in DEFAULTS[self.command].items() if getattr(self, k) is None}
        if self.n is not None:
            # an explicit --n replaces the size list
            filled.pop("sizes", None)
        cfg = replace(self, **filled)
        validate(cfg)
        return cfg


DEFAULTS = {
    "mh-hitting": dict(family="all", sizes=(10, 25, 50, 100)),
    "mix-check": dict(family="lollipop", sizes=(16, 32, 64), clique_frac=0.25),
    "oracle-check": dict(family="all", sizes=(4, 8, 16, 32)),
    "qws-demo": dict(family="suite", trials=500, rounds=9, c_bound="mh"),
    "qws-scaling": dict(family="path", sizes=(8, 16, 32, 64), trials=200, rounds=9, c_bound="mh"),
    "seedset-check": dict(family="suite", p=(2, 4, 8), reps=500, c=120),
    "invqws-check": dict(family="suite", p=(2, 4, 8), trials=40, eps=0.125, c=120),
    "swap-check": dict(shots=100000),
    "tradeoff-run": dict(family="suite", p=(2,), trials=30, reps=75, c=120, eps=0.125, threshold=0.64),
    "parity-check": dict(nmin=1, nmax=12),
    "wset-fuzz": dict(ops=10000, nmax=16),
}

_INT_FIELDS = ("n", "c", "reps", "rounds", "trials", "seed", "s", "t", "nmin", "nmax", "ops", "shots", "workers")
_FLOAT_FIELDS = ("delta", "eps", "clique_frac", "threshold")


def from_dict(d: dict) -> ExperimentConfig:
    names = {f.name for f in fields(ExperimentConfig)}
    for k in d:
        if k not in names:
            raise ConfigError(k, "unknown field")
    if "command" not in d:
        raise ConfigError("command", "missing")
    d = dict(d)
    for key in ("sizes", "p"):
        if isinstance(d.get(key), list):
            d[key] = tuple(d[key])
    return ExperimentConfig(**d)


def _positive_int(field, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(field, f"must be at least {minimum}")


def validate(cfg: ExperimentConfig) -> None:
    for name in _INT_FIELDS:
        v = getattr(cfg, name)
        if v is not None:
            _positive_int(name, v, 0 if name in ("seed", "s", "t") else 1)
    for name in _FLOAT_FIELDS:
        v = getattr(cfg, name)
        if v is not None:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(name, f"expected a number, got {v!r}")
    for name in ("sizes", "p"):
        v = getattr(cfg, name)
        if v is not None:
            if not v:
                raise ConfigError(name, "must not be empty")
            for i, x in enumerate(v):
                _positive_int(f"{name}[{i}]", x)
    if cfg.delta is not None and not 0 < cfg.delta <= 2:
        raise ConfigError("delta", "must lie in (0, 2]")
    if cfg.eps is not None and not 0 < cfg.eps < 1:
        raise ConfigError("eps", "must lie in (0, 1)")
    if cfg.clique_frac is not None and not 0 < cfg.clique_frac < 1:
        raise ConfigError("clique_frac", "must lie in (0, 1)")
    if cfg.threshold is not None and not 0.5 < cfg.threshold < 1:
        raise ConfigError("threshold", "must lie in (1/2, 1)")
    if cfg.c_bound is not None and cfg.c_bound not in ("mh", "exact"):
        raise ConfigError("c_bound", "must be 'mh' or 'exact'")
    if cfg.family is not None and cfg.family not in ("all", "suite") and cfg.family not in FAMILIES:
        raise ConfigError("family", f"unknown family {cfg.family!r}")
    if cfg.nmin is not None and cfg.nmax is not None and cfg.nmin > cfg.nmax:
        raise ConfigError("nmin", "must not exceed nmax")
    if cfg.command == "parity-check" and cfg.nmax > 20:
        raise ConfigError("nmax", "exhaustive check is limited to 20 bits")
    if cfg.command == "wset-fuzz" and cfg.nmax > 20:
        raise ConfigError("nmax", "set sizes are limited to 2^20")
    if cfg.graph_file is not None and cfg.command not in ("mh-hitting", "oracle-check", "qws-demo", "tradeoff-run"):
        raise ConfigError("graph_file", f"not used by {cfg.command}")
    if cfg.command in ("qws-demo", "tradeoff-run") and cfg.graph_file is not None:
        if cfg.s is None or cfg.t is None:
            raise ConfigError("s" if cfg.s is None else "t", "required with graph_file")
