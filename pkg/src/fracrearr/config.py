"""Run configuration: a JSON object with a fixed set of keys."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .maximizer import INITS


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    domain: list = field(default_factory=lambda: [[-1.0, 1.0]])
    h: float = 1 / 32
    s: float | list = 0.5
    beta: float = 0.5
    init: str = "centered"
    max_iter: int = 100
    restarts: int = 10
    seed: int = 0
    solver: str = "direct"
    solver_tol: float = 1e-12
    brute_limit: int = 10**7
    f: str = "ones"
    out: str | None = None

    @property
    def s_values(self) -> list[float]:
        return list(self.s) if isinstance(self.s, list) else [self.s]

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


KEYS = tuple(RunConfig.__dataclass_fields__)


def _num(name, v, *, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {v!r}")
    if integer and not float(v).is_integer():
        raise ConfigError(f"{name}: expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{name}: must be finite")
    return int(v) if integer else float(v)


def _exponent(name, v):
    v = _num(name, v)
    if not 0 < v < 1:
        raise ConfigError(f"{name}: must lie in (0, 1), got {v}")
    return v


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    cfg = RunConfig(**data)

    dom = cfg.domain
    if not isinstance(dom, list) or not dom:
        raise ConfigError("domain: expected a non-empty list of [left, right] pairs")
    pairs = []
    for i, p in enumerate(dom):
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise ConfigError(f"domain[{i}]: expected a [left, right] pair")
        a, b = _num(f"domain[{i}][0]", p[0]), _num(f"domain[{i}][1]", p[1])
        if not b > a:
            raise ConfigError(f"domain[{i}]: right endpoint must exceed left")
        pairs.append([a, b])
    cfg.domain = pairs

    cfg.h = _num("h", cfg.h)
    if cfg.h <= 0:
        raise ConfigError(f"h: must be positive, got {cfg.h}")
    if isinstance(cfg.s, list):
        cfg.s = [_exponent(f"s[{i}]", v) for i, v in enumerate(cfg.s)]
    else:
        cfg.s = _exponent("s", cfg.s)
    cfg.beta = _num("beta", cfg.beta)
    if cfg.beta <= 0:
        raise ConfigError(f"beta: must be positive, got {cfg.beta}")
    if cfg.init not in INITS:
        raise ConfigError(f"init: must be one of {', '.join(INITS)}")
    for key in ("max_iter", "restarts", "brute_limit"):
        v = _num(key, getattr(cfg, key), integer=True)
        if v < 1:
            raise ConfigError(f"{key}: must be >= 1")
        setattr(cfg, key, v)
    cfg.seed = _num("seed", cfg.seed, integer=True)
    if cfg.solver not in ("direct", "iterative"):
        raise ConfigError("solver: must be 'direct' or 'iterative'")
    cfg.solver_tol = _num("solver_tol", cfg.solver_tol)
    if cfg.solver_tol <= 0:
        raise ConfigError("solver_tol: must be positive")
    if not isinstance(cfg.f, str):
        raise ConfigError("f: expected 'ones', 'zeros' or a CSV path")
    if cfg.out is not None and not isinstance(cfg.out, str):
        raise ConfigError("out: expected a directory path")
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(data)
