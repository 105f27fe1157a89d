"""Concrete systems: bosonic ladder, fermion chain, rotated projectors, and
Hamiltonian sequences that diverge in every seminorm."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParamError, RegimeUnachievable
from .hamiltonians import (
    LatticeConfig,
    RotationPlan,
    diagonal_family,
    lattice_family,
    make_h,
    overlap_matrix,
    rotated_family,
)
from .lattice import fermion_chain
from .spectral import Spectrum, TestFunction, _generate, make_spectrum

REGIMES = ("banded_finite_R", "l1_profile", "Bk_summable")
OVERLAP_TOL = 1e-12


@dataclass
class ModelBundle:
    spec: Spectrum
    fam: object
    observables: dict
    provenance: str
    extras: dict = field(default_factory=dict)


def counterexample_h(spec: Spectrum, f0: TestFunction, squared=False) -> np.ndarray:
    """h_l = 1 / f0(s_l), or its square.

    With the plain form f0(s_l) h_l = 1, so every increment H_L - H_{L-1}
    has ||f0(S) . || = 1. With the square the same quantity is 1/f0(s_L),
    unbounded, while ||f0(S) . f0(S)|| of the increment is 1.
    """
    h = 1.0 / f0(spec.values)
    return h * h if squared else h


def resolve_h(rule, spec: Spectrum, param=None, count=None) -> np.ndarray:
    """A preset name, ``counterexample`` / ``counterexample_squared``
    (param = gamma of exp_decay, default 1), or explicit coefficients."""
    count = spec.level_count if count is None else count
    if isinstance(rule, str):
        if rule.startswith("counterexample"):
            f0 = TestFunction("exp_decay", 1.0 if param is None else float(param))
            full = make_spectrum("shifted_integer", (1.0,), count) if count != spec.level_count \
                else spec
            return counterexample_h(full, f0, rule.endswith("squared"))
        return make_h(rule, spec, param, count)
    h = np.asarray(rule, dtype=float)
    if h.shape != (count,):
        raise ParamError(f"expected {count} coefficients, got {h.shape}")
    return h


def random_regular_operator(spec: Spectrum, rng: np.random.Generator, decay=1.0,
                            complex_=True) -> np.ndarray:
    """G_ij exp(-decay (s_i + s_j)) with Gaussian G.

    The weights make every S^a X S^b bounded uniformly in the truncation,
    which a plain Gaussian matrix is not.
    """
    D = spec.ambient_dim
    G = rng.standard_normal((D, D))
    if complex_:
        G = G + 1j * rng.standard_normal((D, D))
    w = np.exp(-decay * spec.diagonal)
    return G * w[:, None] * w[None, :]


# ----------------------------------------------------------------- bosonic

def ladder(level_count):
    """Truncated annihilation operator: a e_l = sqrt(l) e_{l-1}."""
    return np.diag(np.sqrt(np.arange(1, level_count, dtype=float)), 1)


def bosonic_example(level_count, h_rule="linear", h_param=None) -> ModelBundle:
    """S = 1 + N on levels 0..level_count-1 with a diagonal H_L."""
    if level_count < 2:
        raise ParamError("level_count must be >= 2")
    spec = make_spectrum("shifted_integer", (1.0,), level_count)
    fam = diagonal_family(spec, resolve_h(h_rule, spec, h_param))
    a = ladder(level_count)
    rank_one = np.zeros((level_count, level_count))
    rank_one[0, 1] = 1.0
    obs = {"a": a, "adag": a.T.copy(), "N": np.diag(np.arange(level_count, dtype=float)),
           "rank_one_01": rank_one}
    I = np.eye(level_count)
    # B with [X, S] = B X: lowering by one level gives B = I, raising B = -I
    criteria = {"a": I, "adag": -I, "N": 0 * I, "rank_one_01": I}
    return ModelBundle(spec, fam, obs, "bosonic number operator, S = 1 + N",
                       {"criteria": criteria})


# ---------------------------------------------------------------- fermions

def fermion_lattice(sites, cfg: LatticeConfig | None = None, j0=0) -> ModelBundle:
    """Spinless chain with S = 1 + N_total and the localized observables at j0."""
    if not 2 <= sites:
        raise ParamError("sites must be >= 2")
    chain = fermion_chain(sites)
    chain.check_site(j0)
    cfg = cfg or LatticeConfig(sites)
    if cfg.sites != sites:
        raise ParamError("LatticeConfig.sites does not match")
    fam = lattice_family(cfg)
    j1 = (j0 + 1) % sites
    obs = {
        "a_j0": chain.a[j0],
        "adag_j0": chain.adag[j0],
        "N_j0": chain.n[j0],
        "N_j0_N_j1": chain.n[j0] @ chain.n[j1],
        "adag_j0_a_j1": chain.adag[j0] @ chain.a[j1],
        "a_j0_a_j1": chain.a[j0] @ chain.a[j1],
    }
    I = np.eye(chain.dim)
    criteria = {"a_j0": I - chain.n[j0], "adag_j0": -chain.n[j0], "N_j0": 0 * I,
                "N_j0_N_j1": 0 * I, "adag_j0_a_j1": 0 * I, "a_j0_a_j1": 2 * I}
    return ModelBundle(chain.spec, fam, obs, "fermion chain, S = 1 + N_total",
                       {"chain": chain, "j0": j0, "criteria": criteria})


# ------------------------------------------------------- rotated overlaps

def lower_width(overlaps, tol=OVERLAP_TOL) -> int:
    """Largest k - l with a non-negligible overlap (rows l, columns k)."""
    l, k = np.nonzero(overlaps > tol)
    return int(max(np.max(k - l, initial=0), 0))


def band_profile(overlaps, tol=OVERLAP_TOL, columns=None):
    """beta[k, j] = ||P_{k+j} Pi_k|| for j >= 0, plus the extent of the band.

    Returns (beta, R, one_sided) where R is the largest j with a
    non-negligible entry and one_sided says no mass sits at l < k.
    """
    D = overlaps.shape[1]
    cols = range(D) if columns is None else columns
    beta = np.zeros((D, overlaps.shape[0]))
    one_sided = True
    for k in cols:
        col = overlaps[:, k]
        beta[k, : len(col) - k] = col[k:]
        if np.any(col[:k] > tol):
            one_sided = False
    nz = np.nonzero(beta > tol)[1]
    return beta, int(nz.max(initial=0)), one_sided


def B_profile(overlaps) -> np.ndarray:
    """B_k = sum_{j>=0} ||P_{k+j} Pi_k||^2."""
    D = overlaps.shape[1]
    return np.array([np.sum(overlaps[k:, k] ** 2) for k in range(D)])


def shift_invariance_gate(overlaps, columns, tol=1e-9, tail_tol=1e-6):
    """Overlaps depend on l - k only (over ``columns``) and sum_j beta_j converges.

    Returns (passed, beta_j profile, worst translation defect).
    """
    columns = list(columns)
    D = overlaps.shape[0]
    depth = D - max(columns) - 1
    prof = np.array([[overlaps[k + j, k] for j in range(depth)] for k in columns])
    ref = prof[0]
    defect = float(np.max(np.abs(prof - ref)))
    tail = float(np.sum(ref[depth // 2:]))
    return defect <= tol and tail <= tail_tol, ref, defect


def column_decay_gate(B, columns, margin=0.1, floor=1e-14):
    """B_k summable: log-log slope of B_k over ``columns`` steeper than -(1+margin).

    Columns with B_k below ``floor`` are dropped from the fit; all of them
    vanishing counts as summable. Returns (passed, slope).
    """
    ks = np.array([k for k in columns if B[k] > floor])
    if len(ks) < 3:
        return True, -np.inf
    slope = float(np.polyfit(np.log(ks), np.log(B[ks]), 1)[0])
    return slope < -(1.0 + margin), slope


def _angle_rule(angle_rule):
    if callable(angle_rule):
        return angle_rule
    return lambda m, i, _t=float(angle_rule): _t


def rotation_plan(dim, regime, layers=1, angle_rule=np.pi / 6) -> RotationPlan:
    """Basis realizing an overlap regime.

    banded_finite_R: ``layers`` brick-wall layers at the given angles, then
    shifted down just far enough that psi_k has no weight on phi_l, l < k.
    l1_profile: Blaschke circulant with parameter ``angle_rule``, giving
    overlaps a, (1-a^2), (1-a^2)a, ... depending on l - k only.
    Bk_summable: one layer on pairs (2m, 2m+1) with angles theta0/(1+m),
    shifted up by one, so the weight of psi_{2m} on l >= 2m is sin^2.
    """
    if regime == "banded_finite_R":
        plan = RotationPlan.brickwall(dim, layers, _angle_rule(angle_rule))
        width = lower_width(np.abs(plan.basis(dim)))
        return RotationPlan(plan.layers, width) if width else plan
    if regime == "l1_profile":
        return RotationPlan.blaschke(float(angle_rule))
    if regime == "Bk_summable":
        theta0 = float(angle_rule)
        return RotationPlan.brickwall(dim, 1, lambda m, i: theta0 / (1.0 + i // 2), shift=-1)
    raise ParamError(f"unknown overlap regime {regime!r}; expected one of {REGIMES}")


def bulk_columns(dim, plan: RotationPlan):
    """Columns unaffected by the cyclic wrap at the edges of the truncation."""
    reach = 2 * len(plan.layers) + abs(plan.shift) + 1
    if plan.circulant is not None:
        reach = 3 * dim // 4
    return range(1, max(dim - reach, 2))


def rotated_example(level_count, h_rule="linear", layers=1, angle_rule=np.pi / 6,
                    overlap_regime="banded_finite_R", spectrum=("shifted_integer", (1.0,)),
                    h_param=None) -> ModelBundle:
    """H_L = sum_{k<=L} h_k |psi_k><psi_k| with measured overlap diagnostics."""
    kind, params = spectrum
    spec = make_spectrum(kind, params, level_count)
    plan = rotation_plan(level_count, overlap_regime, layers, angle_rule)
    fam = rotated_family(spec, resolve_h(h_rule, spec, h_param), plan)
    ov = overlap_matrix(spec, fam)
    cols = bulk_columns(level_count, plan)
    beta, R, one_sided = band_profile(ov, columns=cols)
    B = B_profile(ov)
    shift_ok, shift_beta, defect = shift_invariance_gate(ov, cols)
    bk_ok, slope = column_decay_gate(B, [k for k in cols if k > 0])
    measured = {"overlap": ov, "R": R, "one_sided": one_sided, "beta": shift_beta,
                "translation_defect": defect, "B": B, "B_slope": slope,
                "shift_invariant": shift_ok, "column_decay": bk_ok, "columns": cols, "plan": plan}
    ok = {"banded_finite_R": one_sided and R <= 2 * max(layers, 1),
          "l1_profile": shift_ok,
          "Bk_summable": bk_ok}[overlap_regime]
    if not ok:
        raise RegimeUnachievable(f"basis does not realize {overlap_regime}", measured)
    obs = {"rank_one_01": np.eye(level_count)[:, [0]] @ np.eye(level_count)[[1], :]}
    return ModelBundle(spec, fam, obs, f"rotated projectors, {overlap_regime}", measured)


def banded_tail_bound(spec: Spectrum, n, R, L, M) -> float:
    """sum_{k=M+1}^{L} (s_k^-n + ... + s_{k+R}^-n), with s extended past the
    truncation by its generator."""
    lo, hi = min(L, M), max(L, M)
    if spec.kind == "explicit":
        s = spec.values
        if hi + R >= len(s):
            raise ParamError("explicit spectrum too short for the bound")
    else:
        s = _generate(spec.kind, spec.params, hi + R + 1)
    return float(sum(np.sum(s[k: k + R + 1] ** -float(n)) for k in range(lo + 1, hi + 1)))
