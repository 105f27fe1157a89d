"""Flat ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment, repeating a key appends to
a list. Cutoff lists accept ``a..b`` ranges. Sweep axes are declared as
``sweep.<key> = value`` lines; each grid point replaces ``<key>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, RegDynError
from .seminorms import DEFAULT_TOL, DEFAULT_WINDOW, SeminormSpec, seminorm_grid
from .spectral import FUNCTION_FAMILIES, TRUNCATION_TOL, TestFunction, _generate, required_levels

MODELS = ("bosonic", "counterexample", "fermion_lattice", "rotated")
SUITES = ("evolve", "certify", "membership", "gibbs", "taylor", "dyson", "triple")


def parse_lines(text: str) -> dict[str, list[str]]:
    raw: dict[str, list[str]] = {}
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {no}: empty key")
        raw.setdefault(key, []).append(value)
    return raw


def _ints(values):
    out = []
    for v in values:
        for part in v.replace(",", " ").split():
            if ".." in part:
                a, b = part.split("..", 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    return out


def _floats(values):
    return [float(p) for v in values for p in v.replace(",", " ").split()]


def _bool(value):
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


@dataclass
class RunConfig:
    model: str = "bosonic"
    levels: int | None = None
    spectrum: str = "shifted_integer"
    spectrum_param: tuple = ()
    h_rule: str = "linear"
    h_param: float | None = None
    sites: int = 4
    hopping: float = 1.0
    interaction: float = 0.0
    pairing: float = 0.0
    fields: tuple = ()
    j0: int = 0
    layers: int = 1
    angle: float = float(np.pi / 6)
    regime: str = "banded_finite_R"
    families: tuple = ("exp_decay",)
    gammas: tuple = (1.0,)
    ks: tuple = (0,)
    hat: bool = False
    n: int = 1
    cutoffs: tuple = ()
    times: tuple = (1.0,)
    betas: tuple = (1.0,)
    taus: tuple = (1.0,)
    suites: tuple = ()
    pairing_mode: str = "all_pairs"
    cauchy_tol: float = DEFAULT_TOL
    window: int = DEFAULT_WINDOW
    identity_tol: float = 1e-10
    seed: int = 0
    out: str = "out"
    n_max: int = 4
    operators: tuple = ("random:3",)
    trace_mode: str = "local"
    taylor_order: int = 40
    panels: int = 200
    density_eps: float = 1e-6
    sweep: dict = field(default_factory=dict)

    # ------------------------------------------------------------ derived

    def seminorm_specs(self) -> list[SeminormSpec]:
        return seminorm_grid(self.families, self.gammas, self.ks, self.hat)

    def test_functions(self) -> list[TestFunction]:
        return [TestFunction(f, g) for f in self.families for g in self.gammas]

    @property
    def k_max(self) -> int:
        return max(self.ks, default=0)

    def spectrum_params(self) -> tuple:
        if self.spectrum_param:
            return tuple(self.spectrum_param)
        return (1.0,) if self.spectrum == "shifted_integer" else (2.0,)

    def level_count(self) -> int:
        """Configured levels, validated, or the smallest count meeting the
        truncation rule f(s_{D-1}) s_{D-1}^{k_max+n} < TRUNCATION_TOL."""
        power = self.k_max + self.n
        fs = self.test_functions()
        params = self.spectrum_params()
        need = max(self.cutoffs, default=0) + 1
        if self.levels is None:
            D = required_levels(self.spectrum, params, fs, power)
            if self.model == "rotated":
                # the rotated bases wrap cyclically; keep the edge far from the cutoffs
                D = max(D, 2 * need + 20)
            return max(D, need)
        s = _generate(self.spectrum, params, self.levels)[-1]
        for f in fs:
            if s < f.peak(power) or f(s) * s ** power >= TRUNCATION_TOL:
                raise ConfigError(
                    f"levels={self.levels} too small: {f.label()} * s^{power} = "
                    f"{f(s) * s ** power:.3g} at s={s:g} (need < {TRUNCATION_TOL:g} past the peak "
                    f"at {f.peak(power):.3g}); raise levels or lower k/n")
        if self.levels < need:
            raise ConfigError(f"levels={self.levels} below the largest cutoff {need - 1}")
        return self.levels

    def sweep_points(self):
        """(tag, config) for each point of the sweep grid (one point if none)."""
        if not self.sweep:
            return [("", self)]
        keys = sorted(self.sweep)
        out = []
        for combo in itertools.product(*(self.sweep[k] for k in keys)):
            raw = {k: [v] for k, v in zip(keys, combo)}
            tag = ",".join(f"{k}={v}" for k, v in zip(keys, combo))
            out.append((tag, apply_raw(replace(self, sweep={}), raw)))
        return out


_SCALARS = {
    "model": ("model", str), "levels": ("levels", int), "spectrum": ("spectrum", str),
    "h_rule": ("h_rule", str), "h_param": ("h_param", float), "sites": ("sites", int),
    "hopping": ("hopping", float), "interaction": ("interaction", float),
    "pairing": ("pairing", float), "j0": ("j0", int), "layers": ("layers", int),
    "angle": ("angle", float), "regime": ("regime", str), "hat": ("hat", _bool),
    "n": ("n", int), "pairing_mode": ("pairing_mode", str), "cauchy_tol": ("cauchy_tol", float),
    "window": ("window", int), "identity_tol": ("identity_tol", float), "seed": ("seed", int),
    "out": ("out", str), "n_max": ("n_max", int), "trace_mode": ("trace_mode", str),
    "taylor_order": ("taylor_order", int), "panels": ("panels", int),
    "density_eps": ("density_eps", float),
}
_LISTS = {
    "family": ("families", str), "gamma": ("gammas", float), "k": ("ks", int),
    "cutoffs": ("cutoffs", None), "t": ("times", float), "beta": ("betas", float),
    "tau": ("taus", float), "suite": ("suites", str), "field": ("fields", float),
    "spectrum_param": ("spectrum_param", float), "operator": ("operators", str),
}


def apply_raw(cfg: RunConfig, raw: dict[str, list[str]]) -> RunConfig:
    updates = {}
    sweep = dict(cfg.sweep)
    for key, values in raw.items():
        try:
            if key.startswith("sweep."):
                sweep[key[len("sweep."):]] = tuple(values)
            elif key in _SCALARS:
                if len(values) > 1:
                    raise ConfigError(f"key {key!r} given {len(values)} times")
                name, conv = _SCALARS[key]
                updates[name] = conv(values[0])
            elif key in _LISTS:
                name, conv = _LISTS[key]
                if conv is None:
                    updates[name] = tuple(_ints(values))
                elif conv is float:
                    updates[name] = tuple(_floats(values))
                elif conv is int:
                    updates[name] = tuple(_ints(values))
                else:
                    updates[name] = tuple(p for v in values for p in v.replace(",", " ").split())
            else:
                raise ConfigError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None
    for key in sweep:
        if key not in _SCALARS and key not in _LISTS:
            raise ConfigError(f"unknown sweep key {key!r}")
    return validate(replace(cfg, sweep=sweep, **updates))


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.model not in MODELS:
        raise ConfigError(f"unknown model {cfg.model!r}; expected one of {MODELS}")
    bad = [s for s in cfg.suites if s not in SUITES]
    if bad:
        raise ConfigError(f"unknown suite(s) {bad}; expected {SUITES}")
    bad = [f for f in cfg.families if f not in FUNCTION_FAMILIES]
    if bad:
        raise ConfigError(f"unknown seminorm family {bad}")
    if any(g <= 0 for g in cfg.gammas):
        raise ConfigError("gamma must be > 0")
    if any(k < 0 for k in cfg.ks) or cfg.n < 1:
        raise ConfigError("k must be >= 0 and n >= 1")
    if any(b <= 0 for b in cfg.betas):
        raise ConfigError("beta must be > 0")
    if cfg.window < 1 or cfg.cauchy_tol <= 0:
        raise ConfigError("window must be >= 1 and cauchy_tol > 0")
    if cfg.pairing_mode not in ("adjacent", "all_pairs"):
        raise ConfigError("pairing_mode is adjacent or all_pairs")
    if cfg.trace_mode not in ("local", "ambient"):
        raise ConfigError("trace_mode is local or ambient")
    if cfg.panels < 2 or cfg.panels % 2:
        raise ConfigError("panels must be even and >= 2")
    if cfg.seed < 0 or cfg.seed >= 2 ** 64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    return cfg


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        return apply_raw(RunConfig(), parse_lines(text))
    except ConfigError:
        raise
    except RegDynError as exc:
        raise ConfigError(str(exc)) from None
