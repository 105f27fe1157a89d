import numpy as np
import pytest

from regdyn import dynamics as dy
from regdyn import models
from regdyn.errors import ParamError, RegimeUnachievable
from regdyn.hamiltonians import LatticeConfig, RotationPlan, overlap_matrix, rotated_family
from regdyn.seminorms import op_norm, seminorm_f, seminorm_fk
from regdyn.spectral import TestFunction, make_spectrum

F1 = TestFunction("exp_decay", 1.0)


def test_ladder_algebra():
    a = models.ladder(8)
    N = np.diag(np.arange(8.0))
    diff = a.T @ a - N
    np.testing.assert_allclose(diff, 0.0, atol=1e-14)
    comm = a @ a.T - a.T @ a
    # [a, a+] = I except the top corner, a truncation artifact
    np.testing.assert_allclose(comm[:-1, :-1], np.eye(7), atol=1e-14)
    assert comm[-1, -1] == pytest.approx(-7.0)


def test_bosonic_zero_hamiltonian_trivial():
    b = models.bosonic_example(10, "zero")
    X = b.observables["a"]
    np.testing.assert_allclose(dy.alpha_L(b.fam, 9, X, 2.0), X, atol=1e-15)


def test_bosonic_criteria():
    from regdyn.alpha_sets import commutator_criterion
    b = models.bosonic_example(12)
    for name, B in b.extras["criteria"].items():
        res = commutator_criterion(b.observables[name], B, b.spec)
        assert res.residual <= 1e-12 and res.passed, name


def test_fermion_lattice_criteria():
    from regdyn.alpha_sets import commutator_criterion
    b = models.fermion_lattice(4, LatticeConfig(4, (0.2,)), j0=1)
    for name, B in b.extras["criteria"].items():
        res = commutator_criterion(b.observables[name], B, b.spec)
        assert res.residual <= 1e-12 and res.passed, name


def test_fermion_lattice_bad_site():
    with pytest.raises(ParamError):
        models.fermion_lattice(3, j0=3)


def test_counterexample_increments():
    spec = make_spectrum("shifted_integer", (1.0,), 20)
    h = models.counterexample_h(spec, F1)
    np.testing.assert_allclose(h, np.exp(1.0 + np.arange(20)), rtol=1e-15)
    for L in range(1, 20):
        inc = np.zeros((20, 20))
        inc[L, L] = h[L]
        assert seminorm_fk(inc, F1, 0, spec) == pytest.approx(1.0, abs=1e-12)


def test_counterexample_squared():
    spec = make_spectrum("shifted_integer", (1.0,), 20)
    h = models.counterexample_h(spec, F1, squared=True)
    for L in (3, 10, 19):
        inc = np.zeros((20, 20))
        inc[L, L] = h[L]
        assert seminorm_fk(inc, F1, 0, spec) == pytest.approx(np.exp(1.0 + L), rel=1e-12)
        assert seminorm_f(inc, F1, spec) == pytest.approx(1.0, rel=1e-12)


def test_linear_h_contrast():
    spec = make_spectrum("shifted_integer", (1.0,), 60)
    fam = models.bosonic_example(60, "linear").fam
    d = [op_norm(np.diag(F1(spec.diagonal)) @ (fam.hamiltonian(L) - fam.hamiltonian(L - 1)))
         for L in (5, 20, 50)]
    assert d[0] > d[1] > d[2] and d[2] < 1e-20


def test_resolve_h_explicit():
    spec = make_spectrum("shifted_integer", (1.0,), 3)
    np.testing.assert_array_equal(models.resolve_h([1, 2, 3], spec), [1, 2, 3])
    with pytest.raises(ParamError):
        models.resolve_h([1, 2], spec)


def test_random_regular_operator_weights():
    spec = make_spectrum("shifted_integer", (1.0,), 40)
    X = models.random_regular_operator(spec, np.random.default_rng(0))
    s = spec.diagonal
    assert op_norm(s[:, None] ** 3 * X * s[None, :] ** 3) < 100


def test_zero_angle_overlap_identity():
    spec = make_spectrum("shifted_integer", (1.0,), 6)
    fam = rotated_family(spec, np.arange(6.0), RotationPlan.brickwall(6, 1, 0.3))
    ov0 = overlap_matrix(spec, rotated_family(spec, np.arange(6.0),
                                              RotationPlan.brickwall(6, 1, 0.0)))
    np.testing.assert_allclose(ov0, np.eye(6), atol=1e-15)
    assert overlap_matrix(spec, fam)[1, 0] > 0


def test_single_layer_band_profile():
    theta = np.pi / 6
    V = RotationPlan.brickwall(10, 1, theta).basis(10)
    ov = np.abs(V)
    for k in (0, 2, 4):
        assert ov[k, k] == pytest.approx(np.cos(theta))
        assert ov[k + 1, k] == pytest.approx(np.sin(theta))
        assert models.lower_width(ov[:, [k]]) == 0


def test_banded_regime_one_sided():
    b = models.rotated_example(40, "linear", 1, np.pi / 6, "banded_finite_R")
    assert b.extras["one_sided"] and b.extras["R"] <= 2


def test_l1_regime_translation_invariant():
    b = models.rotated_example(100, "linear", 0, 0.5, "l1_profile")
    assert b.extras["shift_invariant"] and b.extras["translation_defect"] <= 1e-9
    beta = b.extras["beta"]
    np.testing.assert_allclose(beta[:3], [0.5, 0.75, 0.375], atol=1e-12)


def test_bk_regime_slope():
    b = models.rotated_example(100, "linear", 1, 0.6, "Bk_summable",
                               spectrum=("power_law", (2.0,)))
    assert b.extras["column_decay"] and b.extras["B_slope"] < -1.1


def test_regime_unachievable():
    with pytest.raises(RegimeUnachievable) as exc:
        models.rotated_example(60, "linear", 1, np.pi / 6, "l1_profile")
    assert "shift_invariant" in exc.value.profile


def test_unknown_regime():
    with pytest.raises(ParamError):
        models.rotation_plan(10, "dense")


def test_banded_tail_bound_value():
    spec = make_spectrum("shifted_integer", (1.0,), 5)
    # k = 2..3, R = 1: (3^-2 + 4^-2) + (4^-2 + 5^-2)
    expect = 1 / 9 + 2 / 16 + 1 / 25
    assert models.banded_tail_bound(spec, 2, 1, 3, 1) == pytest.approx(expect, rel=1e-15)
