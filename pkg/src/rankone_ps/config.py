"""Suite configuration: YAML documents validated into :class:`SuiteConfig`.

Example::

    model: h2               # or [h2, h3]
    suite: intertwining-offdiag   # or a list, or "all"
    lambda_grid: [1, 2, 5, 10]
    seed: 7
    symbols:
      - {name: bump-trig, center: [0.2, 1.1], width: 0.7}
    atoms:
      j: [{weight: [1, 0], point: 0.4}, ...]
    tolerances: {rel: 1.0e-6}
    params: {n_atoms: 3}
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .quantization import SYMBOL_FAMILY

SUITES = (
    "iwasawa",
    "bracket",
    "poisson",
    "principal-series",
    "ps-invariance",
    "intertwining-diagonal",
    "intertwining-offdiag",
    "msp-rate",
    "fourier-inversion",
)
MODELS = ("h2", "h3")
THREADS_ENV = "RANKONE_PS_THREADS"

_KEYS = {"model", "suite", "lambda_grid", "atoms", "symbols", "symbol", "cutoff",
         "tolerances", "seed", "parallelism", "params"}


class ConfigError(ValueError):
    pass


def default_parallelism() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


@dataclass
class SuiteConfig:
    models: list
    suites: list
    lambda_grid: list | None = None
    atoms: dict | None = None
    symbols: list | None = None
    cutoff: dict | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    parallelism: int = 1
    params: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Normalized config as stored in reports; parses back to the same config."""
        out = {
            "model": list(self.models),
            "suite": list(self.suites),
            "seed": self.seed,
            "parallelism": self.parallelism,
            "tolerances": dict(self.tolerances),
            "params": dict(self.params),
        }
        if self.lambda_grid is not None:
            out["lambda_grid"] = list(self.lambda_grid)
        if self.atoms is not None:
            out["atoms"] = copy.deepcopy(self.atoms)
        if self.symbols is not None:
            out["symbols"] = copy.deepcopy(self.symbols)
        if self.cutoff is not None:
            out["cutoff"] = dict(self.cutoff)
        return out


def _as_list(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def parse_config(data: dict, *, suite_override=None, parallelism=None) -> SuiteConfig:
    """Validate a config mapping; unknown suites/symbols name the valid choices."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of keys to values")
    unknown = set(data) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}; valid: {sorted(_KEYS)}")

    models = [str(m).lower() for m in _as_list(data.get("model", "h2"))]
    for m in models:
        if m not in MODELS:
            raise ConfigError(f"unknown model {m!r}; valid models: {list(MODELS)}")

    suites = suite_override if suite_override is not None else data.get("suite")
    if suites is None:
        raise ConfigError(f"config needs a 'suite'; valid suites: {list(SUITES)}")
    suites = _as_list(suites)
    if suites == ["all"]:
        suites = list(SUITES)
    for s in suites:
        if s not in SUITES:
            raise ConfigError(f"unknown suite {s!r}; valid suites: {list(SUITES)}")

    symbols = data.get("symbols", data.get("symbol"))
    if symbols is not None:
        symbols = [dict(s) if isinstance(s, dict) else {"name": s} for s in _as_list(symbols)]
        for s in symbols:
            if s.get("name") not in SYMBOL_FAMILY:
                raise ConfigError(f"unknown symbol {s.get('name')!r}; valid symbols: {sorted(SYMBOL_FAMILY)}")

    grid = data.get("lambda_grid")
    if grid is not None:
        try:
            grid = [float(x) for x in _as_list(grid)]
        except (TypeError, ValueError):
            raise ConfigError("lambda_grid must be a list of real numbers") from None

    tol = data.get("tolerances") or {}
    if not isinstance(tol, dict):
        raise ConfigError("tolerances must be a mapping")
    tol = {str(k): float(v) for k, v in tol.items()}

    par = parallelism if parallelism is not None else data.get("parallelism")
    par = default_parallelism() if par is None else int(par)
    if par < 1:
        raise ConfigError("parallelism must be >= 1")

    params = data.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigError("params must be a mapping")
    atoms = data.get("atoms")
    if atoms is not None and not isinstance(atoms, dict):
        raise ConfigError("atoms must be a mapping with keys 'j' and/or 'k'")

    return SuiteConfig(
        models=models,
        suites=suites,
        lambda_grid=grid,
        atoms=atoms,
        symbols=symbols,
        cutoff=data.get("cutoff"),
        tolerances=tol,
        seed=int(data.get("seed", 0)),
        parallelism=par,
        params=dict(params),
        raw=copy.deepcopy(data),
    )


def load_config(path, **kw) -> SuiteConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror or exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {p}: {exc}") from exc
    return parse_config(data if data is not None else {}, **kw)
