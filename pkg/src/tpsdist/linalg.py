"""Dense complex matrix kernel.

Tensor products, partial traces, local embeddings, Hermitian eigendecomposition,
propagators U_t = exp(+iHt), swap operators on the doubled space, Hilbert-Schmidt
inner products and site-permutation operators.

Everything is dense numpy; operators are immutable after construction and all
functions are pure, so they are safe to call from worker threads on shared
read-only inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import TOL


class SizeError(ValueError):
    """Requested operator exceeds a configured dense-size limit."""


class NumericError(RuntimeError):
    """A dense numeric routine failed to converge or verify."""


def _mat(x) -> np.ndarray:
    """Coerce a DenseOperator or array-like to an ndarray view."""
    if isinstance(x, DenseOperator):
        return x.matrix
    return np.asarray(x)


@dataclass(frozen=True)
class DenseOperator:
    """A d x d complex matrix with a validated tag.

    Tags: ``general`` (no constraint), ``hermitian`` (max|A - A^dag| < 1e-12 at
    construction), ``unitary`` (max|A A^dag - 1| < 1e-10 at construction).
    Use the classmethod constructors; they run the gates.
    """

    matrix: np.ndarray
    tag: str = "general"

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @classmethod
    def general(cls, m) -> "DenseOperator":
        return cls(np.array(_mat(m), dtype=complex), "general")

    @classmethod
    def hermitian(cls, m) -> "DenseOperator":
        a = np.array(_mat(m))
        # keep real symmetric input real: eigh on float64 is several times
        # faster than on complex128, which matters for the larger spin chains
        a = a.astype(float) if not np.iscomplexobj(a) else a.astype(complex)
        dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
        if dev >= TOL.hermitian_construction:
            raise ValueError(f"hermitian gate failed: max|A - A^dag| = {dev:.3e}")
        return cls(a, "hermitian")

    @classmethod
    def unitary(cls, m) -> "DenseOperator":
        a = np.array(_mat(m), dtype=complex)
        dev = np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0])))
        if dev >= TOL.unitary_construction:
            raise ValueError(f"unitary gate failed: max|A A^dag - 1| = {dev:.3e}")
        return cls(a, "unitary")


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a Hermitian operator.

    ``eigenvalues`` ascending, ``eigenvectors`` unitary with eigenvectors in
    columns. Reconstruction V diag(w) V^dag reproduces the input to < 1e-10
    (checked at construction by herm_eig).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def kron(a, b) -> np.ndarray:
    """Kronecker product with a configured size cap (default 4^8)."""
    am, bm = _mat(a), _mat(b)
    d = am.shape[0] * bm.shape[0]
    if d > TOL.kron_max_dim:
        raise SizeError(f"kron result dim {d} exceeds cap {TOL.kron_max_dim}")
    return np.kron(am, bm)


def kron_all(mats: Iterable) -> np.ndarray:
    out = None
    for m in mats:
        out = _mat(m).copy() if out is None else kron(out, m)
    if out is None:
        raise ValueError("kron_all of empty sequence")
    return out


def partial_trace(a, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out all tensor factors except those in ``keep`` (0-based indices).

    ``dims`` lists the factor dimensions q_0..q_{M-1} (row-major ordering, site 0
    is the most significant index). Trace is preserved: Tr(result) = Tr(a).
    """
    m = _mat(a)
    dims = list(dims)
    d = int(np.prod(dims))
    if m.shape != (d, d):
        raise ValueError(f"dims {dims} incompatible with operator shape {m.shape}")
    if isinstance(keep, int):
        keep = [keep]
    keep = sorted(keep)
    M = len(dims)
    if any(k < 0 or k >= M for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {M} factors")
    t = m.reshape(dims + dims)
    # trace out factors not kept, from the highest axis down so axis numbers stay valid
    traced = 0
    for site in reversed(range(M)):
        if site in keep:
            continue
        ncur = M - traced
        t = np.trace(t, axis1=site, axis2=site + ncur)
        traced += 1
    dkeep = int(np.prod([dims[k] for k in keep]))
    return t.reshape(dkeep, dkeep)


def embed_local(b, site: int, dims: Sequence[int]) -> np.ndarray:
    """1 x ... x b x ... x 1 with ``b`` acting on factor ``site`` (0-based).

    The dtype of ``b`` is preserved (real operators embed to real matrices).
    """
    dims = list(dims)
    if site < 0 or site >= len(dims):
        raise ValueError(f"site {site} out of range for {len(dims)} factors")
    bm = _mat(b)
    if bm.shape[0] != dims[site]:
        raise ValueError(f"operator dim {bm.shape[0]} != q_{site} = {dims[site]}")
    left = int(np.prod(dims[:site], dtype=int)) if site else 1
    right = int(np.prod(dims[site + 1:], dtype=int)) if site + 1 < len(dims) else 1
    return np.kron(np.kron(np.eye(left), bm), np.eye(right))


def herm_eig(h) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, with a reconstruction check."""
    m = _mat(h)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed to converge: {exc}") from exc
    recon = (v * w) @ v.conj().T
    resid = np.max(np.abs(recon - m))
    if resid >= TOL.eig_reconstruction:
        raise NumericError(f"eigendecomposition reconstruction residual {resid:.3e}")
    return EigenSystem(w, v)


def propagator_matrix(es: EigenSystem, t: float) -> np.ndarray:
    """U_t = V diag(exp(+i w t)) V^dag as a raw array (no unitarity re-check).

    Sign convention: U_t = exp(+iHt).
    """
    phases = np.exp(1j * es.eigenvalues * t)
    return (es.eigenvectors * phases) @ es.eigenvectors.conj().T


def propagator(es: EigenSystem, t: float) -> DenseOperator:
    """U_t = exp(+iHt) built from one reusable eigendecomposition."""
    return DenseOperator.unitary(propagator_matrix(es, t))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product <A, B> = Tr(A^dag B)."""
    am, bm = _mat(a), _mat(b)
    if am.shape != bm.shape:
        raise ValueError(f"shape mismatch {am.shape} vs {bm.shape}")
    return complex(np.sum(am.conj() * bm))


def hs_norm(a) -> float:
    return float(np.linalg.norm(_mat(a)))


def swap_pair(i: int, dims: Sequence[int]) -> np.ndarray:
    """Swap operator S_{ii'} on the doubled space H (x) H.

    Exchanges factor ``i`` of the first copy with factor ``i`` of the second
    copy, identity on everything else: |a>|b> -> |a_i<->b_i swapped>.
    S^2 = 1, S = S^dag, Tr(S_{ii'}) = d^2/q_i, Tr(S_{ii'}S_{jj'}) = d^2/(q_i q_j)
    for i != j. Oracle-only: dense (d^2) x (d^2) storage, capped at small d.
    """
    dims = list(dims)
    d = int(np.prod(dims))
    if d > TOL.swap_oracle_max_dim:
        raise SizeError(f"swap_pair doubled space ({d}^2) exceeds cap "
                        f"({TOL.swap_oracle_max_dim}^2)")
    if i < 0 or i >= len(dims):
        raise ValueError(f"site {i} out of range")
    q = dims[i]
    stride = int(np.prod(dims[i + 1:], dtype=int))
    s = np.zeros((d * d, d * d))
    for a in range(d):
        ai = (a // stride) % q
        abase = a - ai * stride
        for b in range(d):
            bi = (b // stride) % q
            bbase = b - bi * stride
            row = (abase + bi * stride) * d + (bbase + ai * stride)
            s[row, a * d + b] = 1.0
    return s.astype(complex)


def permutation_operator(perm: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Site-permutation unitary L with L|a_0...a_{M-1}> = |a_{perm(0)}...a_{perm(M-1)}>.

    ``perm[k]`` is the source slot whose label lands in output slot k; only
    permutations between equal-dimension sites are valid.
    """
    dims = list(dims)
    M = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(M)):
        raise ValueError(f"{perm} is not a permutation of 0..{M - 1}")
    for k in range(M):
        if dims[perm[k]] != dims[k]:
            raise ValueError(
                f"permutation moves a dim-{dims[perm[k]]} site into a dim-{dims[k]} slot")
    d = int(np.prod(dims))
    L = np.zeros((d, d))
    strides = np.cumprod([1] + dims[::-1][:-1])[::-1]  # row-major multi-index strides
    for col in range(d):
        a = [(col // strides[k]) % dims[k] for k in range(M)]
        row = sum(a[perm[k]] * strides[k] for k in range(M))
        L[row, col] = 1.0
    return L.astype(complex)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2.0


def frobenius_band(a, b, tol: float) -> bool:
    return bool(np.max(np.abs(_mat(a) - _mat(b))) < tol)
