from math import comb

import numpy as np
import pytest

from oracles import car_operators
from regdyn.errors import SiteOutOfRange
from regdyn.lattice import FermionChain, fermion_chain, occupation_order


@pytest.mark.parametrize("sites", [1, 2, 3, 4, 5, 6])
def test_car_relations(sites):
    ch = fermion_chain(sites)
    I = np.eye(ch.dim)
    for p in range(sites):
        for q in range(sites):
            anti = ch.a[p] @ ch.adag[q] + ch.adag[q] @ ch.a[p]
            np.testing.assert_allclose(anti, I if p == q else 0 * I, atol=1e-14)
            aa = ch.a[p] @ ch.a[q] + ch.a[q] @ ch.a[p]
            assert np.abs(aa).max() <= 1e-14


@pytest.mark.parametrize("sites", [1, 2, 3, 4, 5, 6])
def test_matches_bitstring_oracle(sites):
    ch = fermion_chain(sites)
    for p, ref in enumerate(car_operators(sites)):
        np.testing.assert_allclose(ch.a[p], ref, atol=1e-14)


@pytest.mark.parametrize("sites", [2, 3, 5])
def test_degeneracies_binomial(sites):
    ch = fermion_chain(sites)
    assert ch.spec.degeneracy == tuple(comb(sites, n) for n in range(sites + 1))


def test_three_site_level_one():
    assert fermion_chain(3).spec.degeneracy[1] == 3


def test_scale_operator_is_one_plus_number():
    ch = fermion_chain(4)
    N = sum(ch.n)
    np.testing.assert_allclose(np.diag(ch.spec.diagonal), np.eye(16) + N, atol=1e-15)
    np.testing.assert_array_equal(ch.total_number, N)


def test_states_are_number_ordered():
    ch = fermion_chain(4)
    counts = ch.states().sum(axis=1)
    assert np.all(np.diff(counts) >= 0)
    np.testing.assert_array_equal(counts, ch.spec.diagonal - 1)


def test_occupation_order_is_permutation():
    order = occupation_order(5)
    assert sorted(order) == list(range(32))


def test_site_bounds():
    with pytest.raises(SiteOutOfRange):
        FermionChain(0)
    with pytest.raises(SiteOutOfRange):
        fermion_chain(3).check_site(3)


def test_dense_operators_read_only():
    ch = fermion_chain(2)
    with pytest.raises(ValueError):
        ch.a[0][0, 0] = 1.0
