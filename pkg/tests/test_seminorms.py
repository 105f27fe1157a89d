import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_complex
from oracles import power_iteration_norm
from regdyn.errors import DimMismatch, TooFewCutoffs
from regdyn.seminorms import (
    SeminormSpec,
    Verdict,
    cauchy_profile,
    cauchy_verdict,
    combine,
    cutoff_pairs,
    op_norm,
    profile,
    seminorm_f,
    seminorm_fk,
    seminorm_grid,
)
from regdyn.spectral import TestFunction, make_spectrum

F1 = TestFunction("exp_decay", 1.0)


def test_op_norm_examples():
    assert op_norm(np.diag([1.0, 2.0, 3.0])) == 3.0
    assert op_norm(np.zeros((4, 4))) == 0.0
    assert op_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) == pytest.approx(2.0, abs=1e-15)


def test_op_norm_power_iteration_oracle(rng):
    for _ in range(10):
        A = random_complex(rng, 8)
        assert op_norm(A) == pytest.approx(power_iteration_norm(A), abs=1e-8)


@given(st.floats(-5, 5), st.integers(0, 1000))
@settings(max_examples=25)
def test_op_norm_homogeneous(c, seed):
    A = random_complex(np.random.default_rng(seed), 5)
    assert op_norm(c * A) == pytest.approx(abs(c) * op_norm(A), rel=1e-12, abs=1e-14)


def test_seminorm_fk_examples():
    spec = make_spectrum("shifted_integer", (1.0,), 30)
    I = np.eye(30)
    assert seminorm_fk(I, F1, 0, spec) == pytest.approx(math.exp(-1), abs=1e-15)
    assert seminorm_fk(I, F1, 1, spec) == pytest.approx(math.exp(-1), abs=1e-15)
    assert seminorm_fk(np.zeros((30, 30)), F1, 2, spec) == 0.0


def test_seminorm_f_examples():
    spec = make_spectrum("shifted_integer", (1.0,), 30)
    S = np.diag(spec.diagonal)
    assert seminorm_f(np.eye(30), F1, spec) == pytest.approx(math.exp(-2), abs=1e-15)
    assert seminorm_f(S, F1, spec) == pytest.approx(math.exp(-2), abs=1e-15)
    assert seminorm_f(np.zeros((30, 30)), F1, spec) == 0.0


def test_seminorm_fk_takes_both_arms(rng):
    spec = make_spectrum("shifted_integer", (1.0,), 6)
    X = np.zeros((6, 6))
    X[5, 0] = 1.0  # f(s_5) s_0^k on one arm, s_5^k f(s_0) on the other
    k = 2
    left = math.exp(-6) * 1.0
    right = 6.0 ** k * math.exp(-1)
    assert seminorm_fk(X, F1, k, spec) == pytest.approx(max(left, right), rel=1e-14)


def test_seminorm_dim_mismatch():
    spec = make_spectrum("shifted_integer", (1.0,), 3)
    with pytest.raises(DimMismatch):
        seminorm_fk(np.eye(4), F1, 0, spec)


@given(st.integers(0, 1000), st.integers(0, 3))
@settings(max_examples=20)
def test_seminorm_triangle_inequality(seed, k):
    rng = np.random.default_rng(seed)
    spec = make_spectrum("shifted_integer", (1.0,), 7)
    X, Y = random_complex(rng, 7), random_complex(rng, 7)
    lhs = seminorm_fk(X + Y, F1, k, spec)
    assert lhs <= (seminorm_fk(X, F1, k, spec) + seminorm_fk(Y, F1, k, spec)) * (1 + 1e-12)


def test_seminorm_grid_labels():
    grid = seminorm_grid(["exp_decay"], [0.5, 1.0], [0, 2])
    assert len(grid) == 4
    assert all(isinstance(g, SeminormSpec) for g in grid)
    assert len({g.label() for g in grid}) == 4


def test_cutoff_pairs():
    assert cutoff_pairs([0, 1, 2], "adjacent") == [(0, 1), (1, 2)]
    assert cutoff_pairs([0, 1, 2]) == [(0, 1), (0, 2), (1, 2)]


def test_constant_sequence_is_cauchy():
    spec = make_spectrum("shifted_integer", (1.0,), 5)
    Y = np.ones((5, 5))
    reps = cauchy_profile({L: Y for L in range(5)}, seminorm_grid(["exp_decay"], [1.0], [0]), spec)
    assert reps[0].verdict == "cauchy"
    assert reps[0].max_distance == 0.0


def test_unit_increments_not_cauchy():
    # X_L = sum_{l<=L} e^{s_l} P_l: each increment has seminorm exactly 1
    spec = make_spectrum("shifted_integer", (1.0,), 30)
    h = np.exp(spec.diagonal)
    seq = {L: np.diag(np.where(spec.levels <= L, h, 0.0)) for L in range(30)}
    rep = cauchy_profile(seq, seminorm_grid(["exp_decay"], [1.0], [0]), spec)[0]
    assert rep.verdict == "not_cauchy"
    adj = [d for _, d in rep.adjacent_profile()]
    np.testing.assert_allclose(adj, 1.0, atol=1e-12)


def test_projected_regular_operator_is_cauchy(rng):
    # Y needs decaying matrix elements: a plain Gaussian Y keeps S^k Y f(S) unbounded
    spec = make_spectrum("shifted_integer", (1.0,), 60)
    w = np.exp(-spec.diagonal)
    Y = random_complex(rng, 60) * w[:, None] * w[None, :]
    seq = {L: Y * (spec.mask(L)[:, None] & spec.mask(L)[None, :]) for L in range(41)}
    rep = cauchy_profile(seq, seminorm_grid(["exp_decay"], [1.0], [1]), spec)[0]
    assert rep.verdict == "cauchy"


def test_cauchy_verdict_inconclusive():
    cut = list(range(8))
    pairs = [(L, M, 10.0 ** -(L // 2)) for L, M in cutoff_pairs(cut)]
    verdict, _ = cauchy_verdict(cut, pairs, tol=1e-6, window=3)
    assert verdict == "inconclusive"


def test_cauchy_verdict_final_distance():
    cut = [0, 1, 2, 3, 4, 5]
    pairs = [(L, M, 0.5 ** M) for L, M in cutoff_pairs(cut)]
    _, final = cauchy_verdict(cut, pairs, tol=1.0, window=2)
    assert final == 0.5 ** 5


def test_too_few_cutoffs():
    with pytest.raises(TooFewCutoffs):
        profile([0, 1, 2], lambda L, M: 0.0, window=5)


def test_csv_rows_use_17_digits():
    rep = profile(list(range(8)), lambda L, M: 1 / 3, window=2)
    row = rep.csv_rows()[0]
    assert row[5] == format(1 / 3, ".17g")
    assert float(row[5]) == 1 / 3


def test_combine_reports_worst():
    good = profile(list(range(8)), lambda L, M: 0.0, window=2)
    bad = profile(list(range(8)), lambda L, M: 1.0, window=2)
    v = combine("P1.2", [good, bad], expect="cauchy")
    assert v.outcome == "not_cauchy" and v.asserted and not v.passed
    assert v.line().startswith("P1.2 not_cauchy witness=")
    assert "asserted=FAILED" in v.line()


def test_verdict_line_unasserted():
    line = Verdict("C1", "holds", (3, 4), 0.25).line()
    assert line == "C1 holds witness=3,4 worst=0.25"
