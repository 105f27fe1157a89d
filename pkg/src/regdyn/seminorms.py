"""Graph-topology seminorms on truncated operators and Cauchy profiling."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DimMismatch, ParamError, TooFewCutoffs
from .spectral import Spectrum, TestFunction

VERDICTS = ("cauchy", "not_cauchy", "inconclusive")
DEFAULT_TOL = 1e-6
DEFAULT_WINDOW = 3


def is_diagonal(X) -> bool:
    X = np.asarray(X)
    return X.ndim == 2 and np.count_nonzero(X - np.diag(np.diagonal(X))) == 0


def op_norm(X) -> float:
    """Largest singular value."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {X.shape}")
    if X.size == 0:
        return 0.0
    if is_diagonal(X):
        return float(np.max(np.abs(np.diagonal(X))))
    return float(np.linalg.norm(X, 2))


def _check_dims(X, spec: Spectrum):
    X = np.asarray(X)
    D = spec.ambient_dim
    if X.shape != (D, D):
        raise DimMismatch(f"operator shape {X.shape} does not match ambient dimension {D}")
    return X


def seminorm_arms(X, f: TestFunction, k, spec: Spectrum) -> tuple[float, float]:
    """(||f(S) X S^k||, ||S^k X f(S)||)."""
    X = _check_dims(X, spec)
    fd = f(spec.diagonal)
    sk = spec.diagonal ** k
    left = op_norm(fd[:, None] * X * sk[None, :])
    right = op_norm(sk[:, None] * X * fd[None, :])
    return left, right


def seminorm_fk(X, f: TestFunction, k, spec: Spectrum) -> float:
    return max(seminorm_arms(X, f, k, spec))


def seminorm_f(X, f: TestFunction, spec: Spectrum) -> float:
    """||f(S) X f(S)||, the seminorm of the quasi *-algebra topology."""
    X = _check_dims(X, spec)
    fd = f(spec.diagonal)
    return op_norm(fd[:, None] * X * fd[None, :])


@dataclass(frozen=True)
class SeminormSpec:
    """One seminorm of the grid; ``k=None`` selects ||f(S) X f(S)||."""

    f: TestFunction
    k: int | None = 0

    def __call__(self, X, spec: Spectrum) -> float:
        if self.k is None:
            return seminorm_f(X, self.f, spec)
        return seminorm_fk(X, self.f, self.k, spec)

    @property
    def family(self) -> str:
        return self.f.family if self.k is not None else self.f.family + "_hat"

    @property
    def gamma(self) -> float:
        return self.f.gamma

    def label(self) -> str:
        k = "hat" if self.k is None else f"k{self.k}"
        return f"{self.f.family}_{self.f.gamma:g}_{k}"


def seminorm_grid(families, gammas, ks, hat=False) -> list[SeminormSpec]:
    """Cartesian grid of seminorm specs, ordered (family, gamma, k)."""
    out = []
    for fam in families:
        for g in gammas:
            f = TestFunction(fam, float(g))
            out.extend(SeminormSpec(f, int(k)) for k in ks)
            if hat:
                out.append(SeminormSpec(f, None))
    return out


def _fmt(x) -> str:
    return "" if x is None else format(float(x), ".17g")


@dataclass
class ConvergenceReport:
    """Distances d(L, M) across cutoff pairs and the resulting verdict."""

    family: str
    gamma: float | None
    k: int | None
    pairs: list = field(default_factory=list)
    verdict: str = "inconclusive"
    final_distance: float = float("nan")
    window: int = DEFAULT_WINDOW
    tol: float = DEFAULT_TOL
    label: str = ""

    @property
    def max_distance(self) -> float:
        return max((d for _, _, d in self.pairs), default=0.0)

    def worst_pair(self):
        L, M, d = max(self.pairs, key=lambda p: p[2])
        return L, M, d

    def adjacent_profile(self) -> list[tuple[int, float]]:
        """(M, d(L, M)) for consecutive cutoffs, for two-column plot files."""
        cutoffs = sorted({c for L, M, _ in self.pairs for c in (L, M)})
        lookup = {(L, M): d for L, M, d in self.pairs}
        return [(b, lookup[(a, b)]) for a, b in zip(cutoffs, cutoffs[1:]) if (a, b) in lookup]

    def csv_rows(self):
        k = "" if self.k is None else str(self.k)
        gamma = "" if self.gamma is None else _fmt(self.gamma)
        return [[self.family, gamma, k, str(L), str(M), _fmt(d), self.verdict]
                for L, M, d in self.pairs]


def cutoff_pairs(cutoffs: Sequence[int], pairing="all_pairs"):
    cutoffs = list(cutoffs)
    if pairing == "adjacent":
        return list(zip(cutoffs, cutoffs[1:]))
    if pairing == "all_pairs":
        return list(combinations(cutoffs, 2))
    raise ParamError(f"unknown pairing {pairing!r}")


def cauchy_verdict(cutoffs, pairs, tol=DEFAULT_TOL, window=DEFAULT_WINDOW):
    """Finite-window verdict on a list of (L, M, d).

    cauchy: every pair among the last window+1 cutoffs is below ``tol``.
    inconclusive: above tol, but that tail maximum is still smaller than the
    maximum over earlier pairs. not_cauchy: otherwise.
    Returns (verdict, final_distance).
    """
    cutoffs = sorted(cutoffs)
    if len(cutoffs) < window + 2:
        raise TooFewCutoffs(f"need at least {window + 2} cutoffs, got {len(cutoffs)}")
    start = cutoffs[-(window + 1)]
    tail = [d for L, M, d in pairs if min(L, M) >= start]
    earlier = [d for L, M, d in pairs if min(L, M) < start]
    final = next((d for L, M, d in pairs if {L, M} == {cutoffs[-2], cutoffs[-1]}), float("nan"))
    tail_max = max(tail, default=0.0)
    if tail_max < tol:
        return "cauchy", final
    if earlier and tail_max < max(earlier) * (1.0 - 1e-9):
        return "inconclusive", final
    return "not_cauchy", final


def profile(cutoffs: Sequence[int], distance: Callable[[int, int], float], *, family="op",
            gamma=None, k=None, pairing="all_pairs", tol=DEFAULT_TOL, window=DEFAULT_WINDOW,
            label="") -> ConvergenceReport:
    """Profile an arbitrary pairwise distance over the cutoff grid."""
    cutoffs = sorted(cutoffs)
    if len(cutoffs) < window + 2:
        raise TooFewCutoffs(f"need at least {window + 2} cutoffs, got {len(cutoffs)}")
    pairs = [(L, M, float(distance(L, M))) for L, M in cutoff_pairs(cutoffs, pairing)]
    verdict, final = cauchy_verdict(cutoffs, pairs, tol, window)
    return ConvergenceReport(family, gamma, k, pairs, verdict, final, window, tol, label)


def cauchy_profile(seq: Mapping[int, np.ndarray], specs: Sequence[SeminormSpec], spec: Spectrum,
                   pairing="all_pairs", tol=DEFAULT_TOL, window=DEFAULT_WINDOW,
                   label="") -> list[ConvergenceReport]:
    """One report per seminorm for the cutoff-indexed sequence ``seq``."""
    cutoffs = sorted(seq)
    if len(cutoffs) < window + 2:
        raise TooFewCutoffs(f"need at least {window + 2} cutoffs, got {len(cutoffs)}")
    pairs = cutoff_pairs(cutoffs, pairing)
    reports = []
    for sn in specs:
        dist = [(L, M, float(sn(seq[L] - seq[M], spec))) for L, M in pairs]
        verdict, final = cauchy_verdict(cutoffs, dist, tol, window)
        reports.append(ConvergenceReport(sn.family, sn.gamma, sn.k, dist, verdict, final,
                                         window, tol, label or sn.label()))
    return reports


_RANK = {"cauchy": 0, "holds": 0, "pass": 0, "inconclusive": 1, "not_cauchy": 2, "fails": 2,
         "fail": 2}


@dataclass
class Verdict:
    """One machine-readable verdict line.

    ``outcome`` is a Cauchy verdict for sequence checks and holds/fails (or
    pass/fail) for conditions. ``asserted`` marks invariants whose failure
    makes a run exit non-zero; ``passed`` records whether it held.
    """

    cid: str
    outcome: str
    witness: tuple | None = None
    worst: float = float("nan")
    asserted: bool = False
    passed: bool = True
    detail: str = ""

    def line(self) -> str:
        w = "-" if self.witness is None else ",".join(str(x) for x in self.witness)
        status = "ok" if self.passed else "FAILED"
        head = f"{self.cid} {self.outcome} witness={w} worst={_fmt(self.worst) or 'nan'}"
        tail = f" asserted={status}" if self.asserted else ""
        return head + tail + (f" detail={self.detail}" if self.detail else "")


def combine(cid, reports: Sequence[ConvergenceReport], expect=None, detail="") -> Verdict:
    """Worst verdict across reports; asserted only if ``expect`` is given."""
    worst = max(reports, key=lambda r: (_RANK[r.verdict], r.max_distance))
    L, M, d = worst.worst_pair() if worst.pairs else (None, None, float("nan"))
    outcome = worst.verdict
    passed = True if expect is None else outcome == expect
    return Verdict(cid, outcome, (L, M), d, expect is not None, passed,
                   detail or worst.label)
