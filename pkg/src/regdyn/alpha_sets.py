"""The chain of sets A_S^(alpha) = {X bounded : ||S^-1 X S|| <= alpha ||X||}.

On a truncation the smallest admissible alpha is a computable ratio, so
membership becomes the total function ``alpha_star``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CriterionNotApplicable, NotReachable, ParamError, ZeroOperator
from .seminorms import _check_dims, op_norm, seminorm_fk
from .spectral import Spectrum, TestFunction, sigma_minus, sigma_plus

CRITERION_TOL = 1e-10
SUPPORT_TOL = 1e-12


def conjugate_TS(X, spec: Spectrum, n=1) -> np.ndarray:
    """T_S^n(X) = S^-n X S^n."""
    X = _check_dims(X, spec)
    s = spec.diagonal ** float(n)
    return X * (s[None, :] / s[:, None])


def alpha_star(X, spec: Spectrum, n=1) -> float:
    """||T_S^n(X)|| / ||X||."""
    norm = op_norm(_check_dims(X, spec))
    if norm == 0.0:
        raise ZeroOperator("alpha_star is undefined for the zero operator")
    return op_norm(conjugate_TS(X, spec, n)) / norm


@dataclass
class MembershipRecord:
    alpha_star: float
    iterated: list
    theta_hat: float
    bounded_flag: bool
    operator_id: str = ""

    def contains(self, alpha) -> bool:
        """X in A_S^(alpha)."""
        return alpha >= self.alpha_star


def membership(X, spec: Spectrum, n_max=4, operator_id="") -> MembershipRecord:
    """Ratios ||T_S^n(X)|| / ||X|| for n = 1..n_max.

    ``bounded_flag`` is False when the last ratio still exceeds every earlier
    one, i.e. no bound theta is visible within n_max iterations.
    """
    if n_max < 1:
        raise ParamError("n_max must be >= 1")
    X = _check_dims(X, spec)
    norm = op_norm(X)
    if norm == 0.0:
        raise ZeroOperator("membership is undefined for the zero operator")
    iterated = [op_norm(conjugate_TS(X, spec, n)) / norm for n in range(1, n_max + 1)]
    bounded = n_max == 1 or iterated[-1] <= max(iterated[:-1]) * (1.0 + 1e-9)
    return MembershipRecord(iterated[0], iterated, max(iterated), bool(bounded), operator_id)


def project(X, spec: Spectrum, L) -> np.ndarray:
    """Q_L X Q_L."""
    m = spec.mask(L)
    return _check_dims(X, spec) * (m[:, None] & m[None, :])


@dataclass
class RatioRecord:
    L: int
    bound: float
    alpha_star: float
    support_residuals: list
    conjugate_alpha: list
    norm_ratios: list
    passed: bool
    checks: dict = field(default_factory=dict)


def ratio_suite(X, L, spec: Spectrum, n_max=4) -> RatioRecord:
    """Checks on X_L = Q_L X Q_L with beta = s_L^+ s_L^-.

    alpha_star(X_L) <= beta; T_S^n(X_L) stays supported on Q_L; every
    T_S^n(X_L) again has ratio <= beta; ||T_S^n(X_L)|| <= beta^n ||X_L||.
    """
    XL = project(X, spec, L)
    beta = sigma_plus(spec, L) * sigma_minus(spec, L)
    normXL = op_norm(XL)
    support, conj_alpha, ratios = [], [], []
    for n in range(1, n_max + 1):
        Y = conjugate_TS(XL, spec, n)
        support.append(op_norm(Y - project(Y, spec, L)))
        normY = op_norm(Y)
        conj_alpha.append(op_norm(conjugate_TS(Y, spec)) / normY if normY > 0 else 0.0)
        ratios.append(normY / normXL if normXL > 0 else 0.0)
    a = op_norm(conjugate_TS(XL, spec)) / normXL if normXL > 0 else 0.0
    slack = 1e-12 * max(beta, 1.0)
    checks = {
        "membership": a <= beta + slack,
        "support": all(r <= SUPPORT_TOL * max(normXL, 1.0) * beta ** n
                       for n, r in enumerate(support, 1)),
        "conjugates": all(c <= beta + slack for c in conj_alpha),
        "iterated": all(r <= beta ** n * (1 + 1e-12) for n, r in enumerate(ratios, 1)),
    }
    return RatioRecord(L, beta, a, support, conj_alpha, ratios, all(checks.values()), checks)


def density_approximant(X, eps, f: TestFunction, k, spec: Spectrum, exact_space=False):
    """Smallest L_0 with ||X - Q_L0 X Q_L0||^{f,k} < eps.

    Returns (L_0, beta, residual) with beta = s_L0^+ s_L0^-. On a truncation
    the top level is excluded, since Q there is the identity only because of
    the cut; ``exact_space`` admits it for genuinely finite models.
    """
    best_L, best = -1, np.inf
    for L in range(spec.level_count - (0 if exact_space else 1)):
        r = seminorm_fk(X - project(X, spec, L), f, k, spec)
        if r < best:
            best_L, best = L, r
        if r < eps:
            return L, sigma_plus(spec, L) * sigma_minus(spec, L), r
    raise NotReachable(f"no cutoff below {spec.level_count - 1} reaches {eps:g}", best_L, best)


@dataclass
class CriterionResult:
    residual: float
    alpha_hat: float
    beta_hat: float
    beta_hat_s2: float
    alpha_star: float
    conjugate_alpha: float
    applies: bool
    passed: bool


def commutator_criterion(X, B, spec: Spectrum, tol=CRITERION_TOL) -> CriterionResult:
    """Bounds from [X, S] = B X.

    Then T_S(X) = (I + S^-1 B) X, so alpha_star(X) <= ||I + S^-1 B||, and
    T_S^2(X) = (I + S^-2 B S) T_S(X), so alpha_star(T_S X) <= ||I + S^-2 B S||.
    ``beta_hat_s2`` is ||I + S^-2 B S^2||, reported for comparison only.
    """
    X, B = _check_dims(X, spec), _check_dims(B, spec)
    s = spec.diagonal
    I = np.eye(len(s))
    residual = op_norm((X * s[None, :] - s[:, None] * X) - B @ X)
    alpha_hat = op_norm(I + B / s[:, None])
    beta_hat = op_norm(I + B * (s[None, :] / s[:, None] ** 2))
    beta_hat_s2 = op_norm(I + B * (s[None, :] ** 2 / s[:, None] ** 2))
    a = alpha_star(X, spec)
    TX = conjugate_TS(X, spec)
    ca = alpha_star(TX, spec) if op_norm(TX) > 0 else 0.0
    applies = residual <= tol
    slack = 1e-10
    passed = a <= alpha_hat + slack and ca <= beta_hat + slack
    res = CriterionResult(residual, alpha_hat, beta_hat, beta_hat_s2, a, ca, applies, passed)
    if not applies:
        raise CriterionNotApplicable(f"[X, S] - BX has norm {residual:.3g} > {tol:g}", res)
    return res


def fitted_B(X, spec: Spectrum) -> np.ndarray:
    """B = [X, S] X^-1 for invertible X."""
    X = _check_dims(X, spec)
    s = spec.diagonal
    C = X * s[None, :] - s[:, None] * X
    return np.linalg.solve(X.T, C.T).T


def alpha_star_samples(spec: Spectrum, count, rng: np.random.Generator, complex_=True):
    """alpha_star of random Gaussian X; a heavy or growing tail across
    truncations suggests no single alpha covers all bounded operators."""
    D = spec.ambient_dim
    out = np.empty(count)
    for i in range(count):
        X = rng.standard_normal((D, D))
        if complex_:
            X = X + 1j * rng.standard_normal((D, D))
        out[i] = alpha_star(X, spec)
    return out


def weighted_profile(seq, spec: Spectrum, n, k_max):
    """For each X_j: ||S^-n X_j||, the iterated ratios of Y_j = S^-n X_j, and
    ||S^{-n-k} X_j S^k|| for k = 0..k_max.

    Since S^{-n-k} X S^k = T_S^k(Y), a uniform bound on the ratios turns
    ||Y_j|| -> 0 into decay of every weighted norm.
    """
    rows = []
    for X in seq:
        X = _check_dims(X, spec)
        Y = X / spec.diagonal[:, None] ** n
        base = op_norm(Y)
        theta = membership(Y, spec, k_max).iterated if base > 0 and k_max > 0 else [0.0] * k_max
        weighted = [op_norm(conjugate_TS(Y, spec, k)) for k in range(k_max + 1)]
        rows.append({"base": base, "ratios": theta, "weighted": weighted})
    return rows
