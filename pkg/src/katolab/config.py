"""Experiment configuration: dataclass, key=value file parser, validation."""

import dataclasses
from dataclasses import dataclass
from typing import Optional

from .errors import KatolabError


@dataclass
class ExperimentConfig:
    """All knobs of a single experiment (one experiment per config file)."""

    experiment: str = "thm1"
    symbol: str = "airy"
    n_schedule: tuple = (8, 16, 32, 64, 128, 256)
    epsilon: float = 0.25
    s: float = 0.0
    T: float = 1.0
    R: float = 1.0
    T_max: float = 40.0
    N: float = 1.0
    x_step: float = 0.05
    t_step: Optional[float] = None
    backend: str = "auto"
    max_nodes: int = 1 << 28
    threads: int = 1
    seed: int = 0
    seeds: int = 20
    band: tuple = (1.0, 5.0)
    data: Optional[str] = None
    out: Optional[str] = None
    plot_script: Optional[str] = None
    growth_factor: float = 2.0
    bounded_factor: float = 5.0
    norm_uniform_tol: float = 1.05
    spread_factor: float = 3.0
    time_domain_max_n: int = 128
    trace_order: Optional[float] = None
    timing: bool = False
    sweep_T: Optional[tuple] = None

    def validate(self):
        if self.experiment not in ("thm1", "thm2", "baseline", "trace", "y1",
                                   "validate_symbol", "evolve"):
            raise KatolabError(f"unknown experiment kind {self.experiment!r}")
        if any(b <= a for a, b in zip(self.n_schedule, self.n_schedule[1:])):
            raise KatolabError("n_schedule must be strictly increasing")
        if any(n < 1 for n in self.n_schedule):
            raise KatolabError("n_schedule entries must be positive")
        if not (self.epsilon == 0.0 or 0.0 < self.epsilon < 0.5):
            raise KatolabError(
                "epsilon must lie in (0, 1/2) for sharpness runs (0 for control)")
        if self.T <= 0 or self.R <= 0 or self.T_max <= self.T:
            raise KatolabError("need T > 0, R > 0, T_max > T")
        if self.backend not in ("auto", "oversampled_fft", "filon"):
            raise KatolabError(f"unknown backend {self.backend!r}")
        if self.threads < 1 or self.seeds < 1:
            raise KatolabError("threads and seeds must be >= 1")
        return self


_BOOL = {"true": True, "yes": True, "1": True,
         "false": False, "no": False, "0": False}


def _coerce(raw: str, typ, name: str):
    raw = raw.strip()
    if raw.lower() in ("none", ""):
        return None
    if typ is tuple:
        parts = [p.strip() for p in raw.strip("()[]").split(",") if p.strip()]
        vals = []
        for p in parts:
            try:
                vals.append(int(p))
            except ValueError:
                vals.append(float(p))
        return tuple(vals)
    if typ is bool:
        if raw.lower() not in _BOOL:
            raise KatolabError(f"cannot parse boolean {raw!r} for {name}")
        return _BOOL[raw.lower()]
    if typ is int:
        return int(raw)
    if typ is float:
        return float(raw)
    return raw


def _field_types():
    types = {}
    for f in dataclasses.fields(ExperimentConfig):
        t = f.type
        if isinstance(t, str):
            # typing.Optional[...] strings collapse to the inner type
            t = {"str": str, "float": float, "int": int, "tuple": tuple,
                 "bool": bool, "Optional[str]": str, "Optional[float]": float,
                 "Optional[tuple]": tuple}.get(t, str)
        types[f.name] = t
    return types


FIELD_TYPES = _field_types()


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` comments) into a config dict."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise KatolabError(f"line {lineno}: expected 'key = value'")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in FIELD_TYPES:
            raise KatolabError(f"line {lineno}: unknown config key {key!r}")
        out[key] = _coerce(raw, FIELD_TYPES[key], key)
    return out


def load_config(path: str, overrides: dict = None) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        values = parse_config_text(fh.read())
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values).validate()
