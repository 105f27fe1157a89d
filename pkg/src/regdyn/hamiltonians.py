"""Cutoff-indexed Hamiltonian families H_L and their propagators."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import sparse

from .errors import DimMismatch, LevelOutOfRange, NotHermitian, ParamError, WrongKind
from .lattice import FermionChain, fermion_chain
from .spectral import Spectrum

KINDS = ("diagonal", "rotated", "lattice")
H_RULES = ("zero", "poly", "linear", "exp", "exp_squared", "bounded")
HERMITIAN_TOL = 1e-12


def make_h(rule, spec: Spectrum, param=None, count=None) -> np.ndarray:
    """Preset coefficient sequences h_l.

    ``exp`` is 1/f0(s_l) for f0 = exp(-param x), ``exp_squared`` its square,
    ``poly`` is l**param, ``bounded`` is param * l / (1 + l).
    ``count`` defaults to the level count of ``spec``.
    """
    count = spec.level_count if count is None else count
    l = np.arange(count, dtype=float)
    if count <= spec.level_count:
        s = spec.values[:count]
    else:
        s = spec.diagonal[:count]
    if rule == "zero":
        return np.zeros(count)
    if rule == "linear":
        return l.copy()
    if rule == "poly":
        return l ** (1.0 if param is None else param)
    if rule == "exp":
        return np.exp((1.0 if param is None else param) * s)
    if rule == "exp_squared":
        return np.exp(2.0 * (1.0 if param is None else param) * s)
    if rule == "bounded":
        return (1.0 if param is None else param) * l / (1.0 + l)
    raise ParamError(f"unknown h rule {rule!r}; expected one of {H_RULES}")


# ---------------------------------------------------------------- rotations

def _circulant_blaschke(dim, a):
    """Unitary circulant whose symbol is the Blaschke factor (z - a)/(1 - a z).

    Columns carry the one-sided geometric profile -a, (1-a^2), (1-a^2) a, ...
    below the diagonal (cyclically), aliased at order a^dim.
    """
    z = np.exp(-2j * np.pi * np.arange(dim) / dim)
    v = np.fft.ifft((z - a) / (1.0 - a * z)).real
    idx = (np.arange(dim)[:, None] - np.arange(dim)[None, :]) % dim
    return v[idx]


@dataclass(frozen=True)
class RotationPlan:
    """Orthonormal basis psi_k = V e_k built from Givens rotations.

    ``layers`` is a sequence of layers, each a sequence of disjoint
    ``(i, j, theta)`` rotations applied in order. Afterwards the rows are
    cyclically shifted by ``shift`` (psi components move from phi_l to
    phi_{l+shift}) and, if ``circulant`` is set, multiplied by the
    Blaschke circulant with that parameter.
    """

    layers: tuple = ()
    shift: int = 0
    circulant: float | None = None

    @classmethod
    def brickwall(cls, dim, layers, angle_rule, shift=0):
        """Layer m rotates pairs (2p + m%2, 2p + m%2 + 1) by angle_rule(m, first index)."""
        rule = angle_rule if callable(angle_rule) else (lambda m, i, _t=float(angle_rule): _t)
        out = []
        for m in range(layers):
            out.append(tuple((i, i + 1, float(rule(m, i))) for i in range(m % 2, dim - 1, 2)))
        return cls(tuple(out), shift)

    @classmethod
    def blaschke(cls, a):
        if not -1.0 < a < 1.0:
            raise ParamError("Blaschke parameter must satisfy |a| < 1")
        return cls((), 0, float(a))

    def basis(self, dim) -> np.ndarray:
        V = np.eye(dim)
        for layer in self.layers:
            used = set()
            for i, j, theta in layer:
                if i in used or j in used or not (0 <= i < dim and 0 <= j < dim):
                    raise ParamError(f"rotation ({i}, {j}) overlaps its layer or leaves 0..{dim - 1}")
                used.update((i, j))
                c, s = np.cos(theta), np.sin(theta)
                ri, rj = V[i].copy(), V[j].copy()
                V[i] = c * ri - s * rj
                V[j] = s * ri + c * rj
        if self.shift:
            V = np.roll(V, self.shift, axis=0)
        if self.circulant is not None:
            V = _circulant_blaschke(dim, self.circulant) @ V
        return V

    @property
    def band(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class LatticeConfig:
    """Couplings of the chain Hamiltonian.

    H_L = sum_{p<=L} mu_p N_p
          + sum_{p<L} [-J (a_p^+ a_{p+1} + h.c.) + V N_p N_{p+1} + D (a_p a_{p+1} + h.c.)]
    The pairing term D breaks particle-number conservation, so [H_L, S] != 0.
    """

    sites: int
    fields: tuple = ()
    hopping: float = 1.0
    interaction: float = 0.0
    pairing: float = 0.0

    def field(self, p) -> float:
        if not self.fields:
            return 0.0
        return float(self.fields[p % len(self.fields)])


# ------------------------------------------------------------------ family

@dataclass(frozen=True)
class HamiltonianFamily:
    """Rule L -> H_L on a fixed ambient space shared with the scale operator."""

    kind: str
    spec: Spectrum
    h: np.ndarray | None = None
    rotation: RotationPlan | None = None
    lattice_cfg: LatticeConfig | None = None
    basis: np.ndarray | None = field(default=None, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.spec.ambient_dim

    @property
    def max_cutoff(self) -> int:
        if self.kind == "diagonal":
            return self.spec.level_count - 1
        if self.kind == "rotated":
            return self.dim - 1
        return self.lattice_cfg.sites - 1

    def check_cutoff(self, L):
        if not 0 <= L <= self.max_cutoff:
            raise LevelOutOfRange(f"cutoff {L} outside 0..{self.max_cutoff}")

    @property
    def chain(self) -> FermionChain:
        return fermion_chain(self.lattice_cfg.sites)

    def coefficients(self, L) -> np.ndarray:
        """Eigenvalue vector of H_L in its own basis (diagonal and rotated kinds)."""
        self.check_cutoff(L)
        if self.kind == "diagonal":
            return np.where(self.spec.levels <= L, self.h[self.spec.levels], 0.0)
        if self.kind == "rotated":
            return np.where(np.arange(self.dim) <= L, self.h, 0.0)
        raise WrongKind("lattice Hamiltonians have no preset eigenbasis")

    def _lattice_sparse(self, L):
        cfg, ch = self.lattice_cfg, self.chain
        H = sparse.csr_matrix((self.dim, self.dim))
        for p in range(L + 1):
            H = H + cfg.field(p) * ch.n_sparse[p]
        for p in range(L):
            hop = ch.adag_sparse[p] @ ch.a_sparse[p + 1]
            H = H - cfg.hopping * (hop + hop.T)
            if cfg.interaction:
                H = H + cfg.interaction * (ch.n_sparse[p] @ ch.n_sparse[p + 1])
            if cfg.pairing:
                pair = ch.a_sparse[p] @ ch.a_sparse[p + 1]
                H = H + cfg.pairing * (pair + pair.T)
        return H

    def hamiltonian(self, L) -> np.ndarray:
        self.check_cutoff(L)
        if self.kind == "diagonal":
            return np.diag(self.coefficients(L))
        if self.kind == "rotated":
            V = self.basis
            return (V * self.coefficients(L)) @ V.conj().T
        return self._lattice_sparse(L).toarray()

    def eigensystem(self, L):
        """(w, V) with H_L = V diag(w) V*; V is None for the reference basis.

        Memoized per L. Writers take a lock; readers of a populated entry do not.
        """
        try:
            return self._cache[L]
        except KeyError:
            pass
        if self.kind == "diagonal":
            out = (self.coefficients(L), None)
        elif self.kind == "rotated":
            out = (self.coefficients(L), self.basis)
        else:
            w, V = np.linalg.eigh(self.hamiltonian(L))
            out = (w, V)
        with self._lock:
            self._cache.setdefault(L, out)
        return self._cache[L]

    def propagator(self, L, t) -> np.ndarray:
        """e^{i H_L t}."""
        w, V = self.eigensystem(L)
        phase = np.exp(1j * t * w)
        if V is None:
            return np.diag(phase)
        return (V * phase) @ V.conj().T


def diagonal_family(spec: Spectrum, h) -> HamiltonianFamily:
    """H_L = sum_{l<=L} h_l P_l, commuting with S and with each other."""
    h = _coeffs(h, spec.level_count)
    return HamiltonianFamily("diagonal", spec, h)


def rotated_family(spec: Spectrum, h, plan: RotationPlan) -> HamiltonianFamily:
    """H_L = sum_{k<=L} h_k Pi_k with Pi_k = |psi_k><psi_k| from ``plan``."""
    h = _coeffs(h, spec.ambient_dim)
    V = plan.basis(spec.ambient_dim)
    V.setflags(write=False)
    if np.array_equal(V, np.eye(spec.ambient_dim)) and spec.ambient_dim == spec.level_count:
        # identity rotation: reuse the diagonal code path exactly
        return HamiltonianFamily("diagonal", spec, h, rotation=plan)
    return HamiltonianFamily("rotated", spec, h, rotation=plan, basis=V)


def lattice_family(cfg: LatticeConfig) -> HamiltonianFamily:
    chain = fermion_chain(cfg.sites)
    return HamiltonianFamily("lattice", chain.spec, lattice_cfg=cfg)


def _coeffs(h, count):
    if callable(h):
        h = [h(l) for l in range(count)]
    h = np.array(h, dtype=float)
    if h.shape != (count,):
        raise DimMismatch(f"expected {count} coefficients, got shape {h.shape}")
    h.setflags(write=False)
    return h


# ------------------------------------------------------------ free helpers

def check_hermitian(H, tol=HERMITIAN_TOL):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {H.shape}")
    scale = max(np.max(np.abs(H), initial=0.0), 1.0)
    if np.max(np.abs(H - H.conj().T), initial=0.0) > tol * scale:
        raise NotHermitian("matrix is not Hermitian to tolerance")
    return H


def propagator(H, t) -> np.ndarray:
    """e^{i H t} via Hermitian eigendecomposition."""
    H = check_hermitian(H)
    d = np.diagonal(H)
    if np.count_nonzero(H - np.diag(d)) == 0:
        return np.diag(np.exp(1j * t * d.real))
    w, V = np.linalg.eigh(H)
    return (V * np.exp(1j * t * w)) @ V.conj().T


def overlap_matrix(spec: Spectrum, fam: HamiltonianFamily) -> np.ndarray:
    """Entries ||P_l Pi_k|| (rows l = levels of S, columns k = rotated index)."""
    if fam.rotation is None:
        raise WrongKind("overlap_matrix needs a rotated family")
    V = fam.basis if fam.basis is not None else np.eye(spec.ambient_dim)
    sq = np.abs(V) ** 2
    per_level = np.zeros((spec.level_count, V.shape[1]))
    np.add.at(per_level, spec.levels, sq)
    return np.sqrt(per_level)


def commutator(A, B, k=1) -> np.ndarray:
    """k-fold nested [A, [A, ... [A, B]]]; k=1 is AB - BA."""
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape or A.ndim != 2:
        raise DimMismatch(f"shapes {A.shape} and {B.shape} do not match")
    if k < 1:
        raise ParamError("k must be >= 1")
    C = B
    for _ in range(k):
        C = A @ C - C @ A
    return C


def hamiltonian(fam: HamiltonianFamily, L) -> np.ndarray:
    return fam.hamiltonian(L)
