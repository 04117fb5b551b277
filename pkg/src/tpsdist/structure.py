"""Tensor factorizations and distinguished operator subalgebras.

A factorization H = H_1 (x) ... (x) H_M singles out the local algebras
A_i = B(H_i) (x) 1. Their linear span W = sum_i A_i (algebras share only the
identity) is the geometric object the distance Phi is built from: Phi compares
the orthogonal projector onto W with the projector onto U W U^dag.

Three families of algebra sets are supported:

* ``sites`` : one algebra per chosen tensor factor (the full TPS uses all of
  them; a single factor of a bipartition is the M = 1 case),
* ``max_abelian`` : the diagonal operators in a fixed orthonormal basis, the
  largest commutative algebra, with no tensor factorization behind it.

All operator bases are orthonormal under the Hilbert-Schmidt inner product
<A, B> = Tr(A^dag B).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import TOL
from .linalg import _mat, embed_local, partial_trace


@dataclass(frozen=True)
class TensorFactorization:
    """An ordered factorization of H into factors of dimension dims[i] >= 2."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(q) for q in self.dims)
        if len(dims) == 0:
            raise ValueError("factorization needs at least one factor")
        if any(q < 2 for q in dims):
            raise ValueError(f"every factor dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return int(np.prod(self.dims))

    @property
    def num_sites(self) -> int:
        return len(self.dims)


def gell_mann_basis(q: int) -> np.ndarray:
    """Orthonormal Hermitian traceless basis of the q x q matrices.

    Returns an array of shape (q^2 - 1, q, q): the generalized Gell-Mann
    matrices rescaled so Tr(B_a B_b) = delta_ab. Ordering: symmetric
    off-diagonal pairs, then antisymmetric, then the q - 1 diagonal ones.
    Together with 1/sqrt(q) they form an orthonormal basis of all matrices.
    """
    if q < 2:
        raise ValueError(f"need q >= 2, got {q}")
    out = np.zeros((q * q - 1, q, q), dtype=complex)
    n = 0
    s = 1.0 / np.sqrt(2.0)
    for j in range(q):
        for k in range(j + 1, q):
            out[n, j, k] = s
            out[n, k, j] = s
            n += 1
    for j in range(q):
        for k in range(j + 1, q):
            out[n, j, k] = -1j * s
            out[n, k, j] = 1j * s
            n += 1
    for l in range(1, q):
        c = 1.0 / np.sqrt(l * (l + 1))
        for j in range(l):
            out[n, j, j] = c
        out[n, l, l] = -l * c
        n += 1
    return out


@dataclass(frozen=True)
class LocalBasis:
    """Orthonormal basis of a site algebra, embedded in the full space.

    ``elements`` has shape (q_site^2 - 1, d, d) and holds the traceless part
    P^a; all algebras share the remaining basis element ``identity`` = 1/sqrt(d).
    Each P^a acts as the identity on every other site and has unit
    Hilbert-Schmidt norm in B(H).
    """

    site: int
    elements: np.ndarray
    identity: np.ndarray

    def __post_init__(self):
        self.elements.setflags(write=False)
        self.identity.setflags(write=False)

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)


def local_basis(fact: TensorFactorization, site: int) -> LocalBasis:
    """Orthonormal traceless basis of A_site embedded in the full space.

    Elements are sqrt(q_site/d) B_a placed on ``site`` with identity elsewhere,
    so <P^a, P^b> = delta_ab in B(H). Dense in d; intended for oracles and
    small-system checks.
    """
    dims = fact.dims
    q = dims[site]
    d = fact.d
    scale = np.sqrt(q / d)
    small = gell_mann_basis(q)
    elements = np.stack([scale * embed_local(b, site, dims) for b in small])
    return LocalBasis(site, elements, np.eye(d, dtype=complex) / np.sqrt(d))


@dataclass(frozen=True)
class AlgebraSet:
    """A distinguished set of subalgebras A_1..A_M of B(H).

    ``kind`` is ``sites`` (algebras attached to tensor factors listed in
    ``sites``) or ``max_abelian`` (diagonal algebra of ``basis``). Use the
    constructors ``full_tps``, ``site_subset``, ``bipartite_algebra`` and
    ``max_abelian`` rather than instantiating directly.
    """

    kind: str
    fact: TensorFactorization
    sites: tuple[int, ...] = ()
    basis: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "sites":
            sites = tuple(int(s) for s in self.sites)
            if len(sites) == 0:
                raise ValueError("need at least one algebra")
            if len(set(sites)) != len(sites):
                raise ValueError(f"duplicate sites in {sites}")
            if any(s < 0 or s >= self.fact.num_sites for s in sites):
                raise ValueError(f"sites {sites} out of range for "
                                 f"{self.fact.num_sites} factors")
            object.__setattr__(self, "sites", sites)
        elif self.kind == "max_abelian":
            b = np.array(_mat(self.basis), dtype=complex)
            d = self.fact.d
            if b.shape != (d, d):
                raise ValueError(f"basis must be {d} x {d}, got {b.shape}")
            dev = np.max(np.abs(b @ b.conj().T - np.eye(d)))
            if dev >= TOL.unitary_construction:
                raise ValueError(f"basis columns not orthonormal: dev {dev:.3e}")
            b.setflags(write=False)
            object.__setattr__(self, "basis", b)
            object.__setattr__(self, "sites", ())
        else:
            raise ValueError(f"unknown algebra kind {self.kind!r}")

    @property
    def d(self) -> int:
        return self.fact.d

    @property
    def num_algebras(self) -> int:
        return len(self.sites) if self.kind == "sites" else 1

    def block_dims(self) -> tuple[int, ...]:
        """Effective local dimension q_i of each algebra (sites kind only)."""
        if self.kind != "sites":
            raise ValueError(f"{self.kind} algebras carry no tensor factor")
        return tuple(self.fact.dims[s] for s in self.sites)

    @property
    def dim_w_traceless(self) -> int:
        """dim(W / C1) = sum_i (q_i^2 - 1), or d - 1 for the abelian case."""
        if self.kind == "sites":
            return int(sum(q * q - 1 for q in self.block_dims()))
        return self.d - 1

    def label(self) -> str:
        if self.kind == "sites":
            dims = ",".join(str(q) for q in self.fact.dims)
            if len(self.sites) == self.fact.num_sites:
                return f"tps[{dims}]"
            at = ",".join(str(s) for s in self.sites)
            return f"sites[{dims}]@({at})"
        return f"max_abelian(d={self.d})"

    def project_algebra(self, x, k: int) -> np.ndarray:
        """Orthogonal projection of x onto the k-th algebra (0-based).

        For a factor algebra: P(x) = Tr_ibar(x) (x) (q_i/d) 1_ibar, the unique
        element of A_i closest to x in Hilbert-Schmidt norm. For the abelian
        algebra (k = 0): the diagonal part of x in the distinguished basis.
        """
        xm = _mat(x)
        d = self.d
        if xm.shape != (d, d):
            raise ValueError(f"operator shape {xm.shape} != ({d}, {d})")
        if self.kind == "sites":
            site = self.sites[k]
            dims = self.fact.dims
            q = dims[site]
            red = partial_trace(xm, dims, site)
            return (q / d) * embed_local(red, site, dims)
        if k != 0:
            raise IndexError("abelian set has a single algebra")
        b = self.basis
        diag = np.diag(b.conj().T @ xm @ b)
        return (b * diag) @ b.conj().T

    def project_w(self, x) -> np.ndarray:
        """Orthogonal projection of x onto W = A_1 + ... + A_M.

        The algebras intersect only in C1, so
        P_W = sum_i P_{A_i} - (M - 1) Tr(.) 1/d.
        """
        xm = np.asarray(_mat(x), dtype=complex)
        if self.kind == "max_abelian":
            return self.project_algebra(xm, 0)
        out = np.zeros_like(xm)
        for k in range(self.num_algebras):
            out += self.project_algebra(xm, k)
        m = self.num_algebras
        if m > 1:
            tr = np.trace(xm)
            out -= (m - 1) * (tr / self.d) * np.eye(self.d)
        return out

    def w_basis(self) -> np.ndarray:
        """Orthonormal Hermitian basis of W' = W / C1, shape (dim_w', d, d).

        For the sites kind this is the union of the embedded local bases
        (cross-site elements are orthogonal because both are traceless); for
        the abelian algebra it is the diagonal Gell-Mann set rotated into the
        distinguished basis. Dense; meant for oracles, not the hot path.
        """
        if self.kind == "sites":
            blocks = [local_basis(self.fact, s).elements for s in self.sites]
            return np.concatenate(blocks, axis=0)
        d = self.d
        diag_part = gell_mann_basis(d)[-(d - 1):]
        b = self.basis
        return np.stack([b @ g @ b.conj().T for g in diag_part])


def full_tps(dims: Sequence[int]) -> AlgebraSet:
    """One algebra per tensor factor of H = H_1 (x) ... (x) H_M."""
    fact = TensorFactorization(tuple(dims))
    return AlgebraSet("sites", fact, tuple(range(fact.num_sites)))


def site_subset(dims: Sequence[int], sites: Sequence[int]) -> AlgebraSet:
    """Algebras attached to a subset of the tensor factors."""
    return AlgebraSet("sites", TensorFactorization(tuple(dims)), tuple(sites))


def bipartite_algebra(d1: int, d2: int) -> AlgebraSet:
    """The single algebra B(H_1) (x) 1 inside H_1 (x) H_2."""
    return site_subset((d1, d2), (0,))


def max_abelian(basis_or_dim) -> AlgebraSet:
    """Maximal abelian algebra: diagonal operators in an orthonormal basis.

    Pass either the dimension d (computational basis) or a d x d unitary whose
    columns are the basis states.
    """
    if np.isscalar(basis_or_dim):
        d = int(basis_or_dim)
        b = np.eye(d, dtype=complex)
    else:
        b = np.array(_mat(basis_or_dim), dtype=complex)
        d = b.shape[0]
    return AlgebraSet("max_abelian", TensorFactorization((d,)), basis=b)


def project_w(algebras: AlgebraSet, x) -> np.ndarray:
    """Orthogonal projection of an operator onto W = sum of the algebras."""
    return algebras.project_w(x)
