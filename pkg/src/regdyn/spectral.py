"""Scale operator S = sum_l s_l P_l on a finite ambient space.

Everything here is diagonal in the reference basis, so operators are
produced as dense matrices for the public API while the internal code works
with the diagonal vectors (``Spectrum.diagonal``) and broadcasting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import zeta

from .errors import (
    DivergentTail,
    LevelOutOfRange,
    NonPositiveEigenvalue,
    NotMonotone,
    ParamError,
)

SPECTRUM_KINDS = ("shifted_integer", "power_law", "explicit")
FUNCTION_FAMILIES = ("exp_decay", "gauss_decay")

# default numerical floor below which a discarded tail is considered invisible
TRUNCATION_TOL = 1e-12


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues s_0 <= s_1 <= ... of S with level degeneracies.

    Basis vectors are grouped by level: the first ``degeneracy[0]`` basis
    indices belong to level 0, the next ``degeneracy[1]`` to level 1, etc.
    """

    kind: str
    params: tuple
    values: np.ndarray
    degeneracy: tuple
    diagonal: np.ndarray = field(init=False, repr=False, compare=False)
    levels: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = _readonly(self.values)
        object.__setattr__(self, "values", values)
        levels = np.repeat(np.arange(len(values)), self.degeneracy)
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "diagonal", _readonly(values[levels]))

    @property
    def level_count(self) -> int:
        return len(self.values)

    @property
    def ambient_dim(self) -> int:
        return int(sum(self.degeneracy))

    def check_level(self, L):
        if not 0 <= L < self.level_count:
            raise LevelOutOfRange(f"level {L} outside 0..{self.level_count - 1}")

    def mask(self, L) -> np.ndarray:
        """Boolean basis mask of Q_L (levels <= L)."""
        self.check_level(L)
        return self.levels <= L


def _generate(kind, params, level_count):
    l = np.arange(level_count, dtype=float)
    if kind == "shifted_integer":
        shift = params[0] if params else 1.0
        return shift + l
    if kind == "power_law":
        p = params[0]
        shift = params[1] if len(params) > 1 else 1.0
        return (shift + l) ** p
    if kind == "explicit":
        values = np.asarray(params, dtype=float)
        if len(values) < level_count:
            raise ParamError(f"explicit spectrum has {len(values)} values, {level_count} requested")
        return values[:level_count]
    raise ParamError(f"unknown spectrum kind {kind!r}; expected one of {SPECTRUM_KINDS}")


def make_spectrum(kind, params=(), level_count=None, degeneracy_rule=None) -> Spectrum:
    """Build a validated spectrum.

    ``degeneracy_rule`` is None (no degeneracy), a sequence of positive
    integers, or a callable ``level -> d_l``.
    """
    params = tuple(params)
    if level_count is None:
        if kind != "explicit":
            raise ParamError("level_count is required for generated spectra")
        level_count = len(params)
    if level_count < 1:
        raise ParamError("level_count must be >= 1")
    values = _generate(kind, params, level_count)
    if np.any(values <= 0):
        bad = int(np.argmax(values <= 0))
        raise NonPositiveEigenvalue(f"s_{bad} = {values[bad]} is not positive")
    drops = np.flatnonzero(np.diff(values) < 0)
    if drops.size:
        l = int(drops[0])
        raise NotMonotone(f"s_{l + 1} = {values[l + 1]} < s_{l} = {values[l]}")

    if degeneracy_rule is None:
        degeneracy = (1,) * level_count
    elif callable(degeneracy_rule):
        degeneracy = tuple(int(degeneracy_rule(l)) for l in range(level_count))
    else:
        degeneracy = tuple(int(d) for d in degeneracy_rule)
    if len(degeneracy) != level_count or any(d < 1 for d in degeneracy):
        raise ParamError("degeneracy must give a positive integer for every level")
    return Spectrum(kind, params, values, degeneracy)


@dataclass(frozen=True)
class TestFunction:
    """Weight f in class C: positive, bounded, faster than any inverse power."""

    __test__ = False  # keep pytest from collecting this class

    family: str
    gamma: float

    def __post_init__(self):
        if self.family not in FUNCTION_FAMILIES:
            raise ParamError(f"unknown test function family {self.family!r}")
        if not self.gamma > 0:
            raise ParamError(f"gamma must be > 0, got {self.gamma}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "exp_decay":
            return np.exp(-self.gamma * x)
        return np.exp(-self.gamma * x * x)

    def peak(self, p) -> float:
        """Location of the maximum of x**p * f(x) on x > 0."""
        if self.family == "exp_decay":
            return p / self.gamma
        return np.sqrt(p / (2.0 * self.gamma))

    def label(self) -> str:
        return f"{self.family}({self.gamma:g})"


def power_matrix(spec: Spectrum, k) -> np.ndarray:
    return np.diag(spec.diagonal ** k)


def cumulative_projector(spec: Spectrum, L) -> np.ndarray:
    return np.diag(spec.mask(L).astype(float))


def f_of_S(f: TestFunction, spec: Spectrum) -> np.ndarray:
    return np.diag(f(spec.diagonal))


def sigma_plus(spec: Spectrum, L) -> float:
    """s_L^+ = sqrt(sum_{l<=L} d_l s_l^2)."""
    m = spec.mask(L)
    return float(np.sqrt(np.sum(spec.diagonal[m] ** 2)))


def sigma_minus(spec: Spectrum, L) -> float:
    """s_L^- = sqrt(sum_{l<=L} d_l s_l^-2)."""
    m = spec.mask(L)
    return float(np.sqrt(np.sum(spec.diagonal[m] ** -2.0)))


def _fit_growth(values):
    """Exponent p of s_l ~ C (1+l)^p fitted on the upper half of a prefix."""
    l = np.arange(len(values), dtype=float)
    half = len(values) // 2
    x, y = np.log1p(l[half:]), np.log(values[half:])
    if len(x) < 2 or np.ptp(y) == 0:
        return 0.0, float(values[-1])
    p, logc = np.polyfit(x, y, 1)
    return float(p), float(np.exp(logc))


def tail_l2(spec: Spectrum, n, L) -> float:
    """sqrt(sum_{k>L} s_k^{-2n}) over the infinite sequence generating ``spec``.

    Levels are counted once each (the bound it feeds is a sup over levels).
    Closed-form kinds use the Hurwitz zeta function. Explicit spectra sum
    their prefix and add a power-law remainder estimate fitted to the prefix.
    """
    if n < 1:
        raise ParamError("n must be >= 1")
    if L < 0:
        raise LevelOutOfRange("L must be >= 0")
    if spec.kind == "shifted_integer":
        shift = spec.params[0] if spec.params else 1.0
        return float(np.sqrt(zeta(2.0 * n, shift + L + 1)))
    if spec.kind == "power_law":
        p = spec.params[0]
        shift = spec.params[1] if len(spec.params) > 1 else 1.0
        if 2.0 * n * p <= 1.0:
            raise DivergentTail(f"sum (l+{shift})^(-{2 * n * p}) diverges")
        return float(np.sqrt(zeta(2.0 * n * p, shift + L + 1)))

    values = spec.values
    p, c = _fit_growth(values)
    q = 2.0 * n * p
    if q <= 1.0:
        raise DivergentTail(f"fitted growth exponent {p:.3g} gives a divergent sum s^-{2 * n}")
    partial = float(np.sum(values[L + 1:] ** (-2.0 * n)))
    # sum_{l>=K} (c (1+l)^p)^-2n <= c^-2n * int_{K}^inf x^-q dx, K = number of listed levels
    K = max(len(values), L + 1)
    remainder = c ** (-2.0 * n) * K ** (1.0 - q) / (q - 1.0)
    return float(np.sqrt(partial + remainder))


def required_levels(kind, params, functions: Sequence[TestFunction], power, tol=TRUNCATION_TOL,
                    limit=100_000, degeneracy_rule: Callable | None = None) -> int:
    """Smallest level count D with f(s_{D-1}) s_{D-1}^power < tol for every f.

    The last level must also lie past the maximum of x^power f(x), so that
    all discarded levels are smaller still.
    """
    del degeneracy_rule  # truncation acts on levels, degeneracy is irrelevant
    for D in range(1, limit + 1):
        s = _generate(kind, params, D)[-1]
        if all(s >= f.peak(power) and f(s) * s ** power < tol for f in functions):
            return D
    raise ParamError(f"no truncation below {limit} levels meets tolerance {tol}")
