"""Spinless fermions on a finite chain via Jordan-Wigner strings.

The occupation basis is reordered by total particle number so that
S = 1 + N_total is diagonal with its degenerate levels contiguous, as the
``Spectrum`` layout requires. Within a level states keep bitstring order,
where site 0 is the most significant bit.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from math import comb

import numpy as np
from scipy import sparse

from .errors import SiteOutOfRange
from .spectral import Spectrum, make_spectrum

MAX_SITES = 12

_Z = sparse.csr_matrix(np.diag([1.0, -1.0]))
_LOWER = sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))  # |0><1| empties a site
_ID = sparse.identity(2, format="csr")


def _chain_op(sites, p):
    op = sparse.identity(1, format="csr")
    for q in range(sites):
        op = sparse.kron(op, _Z if q < p else _LOWER if q == p else _ID, format="csr")
    return op


def occupation_order(sites) -> np.ndarray:
    """Permutation sorting bitstring indices by particle number."""
    idx = np.arange(2 ** sites)
    counts = np.array([bin(i).count("1") for i in idx])
    return np.lexsort((idx, counts))


def _dense(ops):
    out = [op.toarray() for op in ops]
    for x in out:
        x.setflags(write=False)
    return out


class FermionChain:
    """Annihilation, creation and number operators of a chain, number-ordered.

    Sparse forms live in ``*_sparse``; the dense lists are built on first use.
    """

    def __init__(self, sites):
        if not 1 <= sites <= MAX_SITES:
            raise SiteOutOfRange(f"sites must be in 1..{MAX_SITES}, got {sites}")
        self.sites = sites
        self.dim = 2 ** sites
        self.order = occupation_order(sites)
        perm = sparse.csr_matrix(
            (np.ones(self.dim), (np.arange(self.dim), self.order)), shape=(self.dim, self.dim))
        self.a_sparse = [(perm @ _chain_op(sites, p) @ perm.T).tocsr() for p in range(sites)]
        self.adag_sparse = [x.T.tocsr() for x in self.a_sparse]
        self.n_sparse = [(ad @ a).tocsr() for ad, a in zip(self.adag_sparse, self.a_sparse)]
        self.spec: Spectrum = make_spectrum(
            "shifted_integer", (1.0,), sites + 1, degeneracy_rule=lambda l: comb(sites, l))

    @cached_property
    def a(self):
        return _dense(self.a_sparse)

    @cached_property
    def adag(self):
        return _dense(self.adag_sparse)

    @cached_property
    def n(self):
        return _dense(self.n_sparse)

    def check_site(self, p):
        if not 0 <= p < self.sites:
            raise SiteOutOfRange(f"site {p} outside 0..{self.sites - 1}")

    @property
    def total_number(self) -> np.ndarray:
        return np.diag(self.spec.diagonal - 1.0)

    def states(self) -> np.ndarray:
        """Occupation bitstrings (rows) in the working basis order."""
        return (self.order[:, None] >> np.arange(self.sites - 1, -1, -1)) & 1


@lru_cache(maxsize=None)
def fermion_chain(sites) -> FermionChain:
    return FermionChain(sites)
