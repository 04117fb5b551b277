"""Distance of a unitary channel from a set of distinguished algebras.

The distance is

    Phi(A, U) = ||P_W - P_{U W U^dag}||_HS^2 / (2 dim W'),

with W = A_1 + ... + A_M and W' its traceless part. Expanding the projectors
in orthonormal bases turns this into a correlator sum

    Phi = 1 - sum_{ij} ||C_ij||_F^2 / dim W',
    [C_ij]_{ab} = < U P_i^a U^dag , P_j^b >,

where the P_i^a are orthonormal traceless generators of A_i. Phi vanishes iff
conjugation by U maps the span W onto itself and reaches 1 iff every image
algebra is maximally independent of every A_j.

Three routes are implemented and cross-checked in the tests:

* ``phi_correlator``   : Gram contraction of the pair overlaps (production),
* ``phi_man``          : assembled from subsystem independence scores that are
                         computed by literal conjugation of basis elements,
* ``phi_projection``   : materializes both d^2 x d^2 projectors (oracle).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .config import TOL
from .linalg import SizeError, _mat, kron_all, partial_trace
from .structure import AlgebraSet, TensorFactorization, gell_mann_basis


@dataclass(frozen=True)
class PhiResult:
    """Value of Phi plus route diagnostics.

    ``pair_norms[i, j]`` holds ||C_ij||_F^2, the total squared overlap of the
    conjugated generators of algebra i with the generators of algebra j; the
    sum rule Phi = 1 - sum(pair_norms)/dim_w_traceless ties them together.
    """

    value: float
    route: str
    dim_w_traceless: int
    pair_norms: np.ndarray | None = None
    note: str = ""

    def as_dict(self) -> dict:
        out = {
            "value": self.value,
            "route": self.route,
            "dim_w_traceless": self.dim_w_traceless,
        }
        if self.pair_norms is not None:
            out["pair_norms"] = np.asarray(self.pair_norms).tolist()
        if self.note:
            out["note"] = self.note
        return out


def _require_sites(algebras: AlgebraSet, what: str) -> None:
    if algebras.kind != "sites":
        raise ValueError(f"{what} needs factor algebras, got {algebras.kind}")


def _check_shape(u: np.ndarray, d: int) -> None:
    if u.shape != (d, d):
        raise ValueError(f"unitary shape {u.shape} does not match d = {d}")


def pair_overlap_norm(algebras: AlgebraSet, u, i: int, j: int) -> float:
    """||C_ij||_F^2 by Gram contraction, without building any basis.

    Group the row index of U as (rest, m) with m the site-j component and the
    column index as (rest, r) with r the site-i component, flatten to
    A[(m, r), (x, y)], and let G = A A^dag. Summing the correlator over the
    full local bases (identity included) gives (q_i q_j / d^2) ||G||_F^2; the
    identity components contribute exactly 1 for any unitary, so

        ||C_ij||_F^2 = (q_i q_j / d^2) ||G||_F^2 - 1.

    Cost d^2 q_i q_j via one gemm on the smaller Gram side.
    """
    _require_sites(algebras, "pair overlaps")
    um = _mat(u)
    dims = algebras.fact.dims
    d = algebras.d
    _check_shape(um, d)
    si = algebras.sites[i]
    sj = algebras.sites[j]
    M = len(dims)
    ut = um.reshape(dims + dims)
    row_rest = [k for k in range(M) if k != sj]
    col_rest = [M + k for k in range(M) if k != si]
    a = ut.transpose([sj, M + si] + row_rest + col_rest)
    qi, qj = dims[si], dims[sj]
    a = a.reshape(qj * qi, (d // qj) * (d // qi))
    m, n = a.shape
    g = a @ a.conj().T if m <= n else a.conj().T @ a
    gnorm2 = float(np.sum(np.abs(g) ** 2))
    return (qi * qj / d**2) * gnorm2 - 1.0


def _reduced_images(algebras: AlgebraSet, u, i: int, j: int):
    """Yield (R_a, scale) for the literal route.

    For each orthonormal traceless generator P_i^a, conjugate X_a = U P U^dag
    explicitly and reduce onto site j: R_a = Tr_{jbar}(X_a). The site-j
    overlap sum follows from R_a alone because the embedded site-j basis
    probes only the reduced operator.
    """
    um = _mat(u)
    dims = algebras.fact.dims
    d = algebras.d
    si = algebras.sites[i]
    sj = algebras.sites[j]
    qi = dims[si]
    left = int(np.prod(dims[:si], dtype=int))
    right = int(np.prod(dims[si + 1:], dtype=int))
    u5 = um.reshape(d, left, qi, right)
    scale = np.sqrt(qi / d)
    for b in gell_mann_basis(qi):
        y = np.einsum("plnr,nm->plmr", u5, b).reshape(d, d)
        x = scale * (y @ um.conj().T)
        yield partial_trace(x, dims, sj)


def pair_overlap_norm_literal(algebras: AlgebraSet, u, i: int, j: int) -> float:
    """||C_ij||_F^2 by explicit conjugation of every generator of A_i.

    Independent of the Gram contraction: builds each image U P_i^a U^dag,
    reduces it onto site j and sums the overlaps in closed form,

        sum_b |<X, P_j^b>|^2 = (q_j / d) (||R||_F^2 - |Tr R|^2 / q_j),

    with R = Tr_{jbar}(X). Cost (q_i^2 - 1) d^3; meant for checks and for the
    independence-score route, not for time series at large d.
    """
    _require_sites(algebras, "pair overlaps")
    dims = algebras.fact.dims
    qj = dims[algebras.sites[j]]
    d = algebras.d
    total = 0.0
    for r in _reduced_images(algebras, u, i, j):
        rn2 = float(np.sum(np.abs(r) ** 2))
        tr2 = float(np.abs(np.trace(r)) ** 2)
        total += (qj / d) * (rn2 - tr2 / qj)
    return total


def correlator_matrix(algebras: AlgebraSet, u, i: int = 0, j: int = 0) -> np.ndarray:
    """The full correlator block [C_ij]_{ab} = <U P_i^a U^dag, P_j^b>.

    Real-valued for Hermitian generator bases. Rows follow the generator
    ordering of ``gell_mann_basis``. Dense oracle, cost (q_i^2 - 1) d^3.
    """
    if algebras.kind == "max_abelian":
        wb = algebras.w_basis()
        um = _mat(u)
        imgs = np.stack([um @ b @ um.conj().T for b in wb])
        # <A, B> = Tr(A B) for Hermitian A
        c = np.einsum("akl,blk->ab", imgs, wb)
        return c.real
    dims = algebras.fact.dims
    sj = algebras.sites[j]
    qj = dims[sj]
    gm_j = gell_mann_basis(qj)
    rows = []
    scale = np.sqrt(qj / algebras.d)
    for r in _reduced_images(algebras, u, i, j):
        rows.append(scale * np.einsum("bmn,nm->b", gm_j, r).real)
    return np.stack(rows)


def phi_correlator(algebras: AlgebraSet, u) -> PhiResult:
    """Phi via the correlator sum rule (production route).

    sites kind: Gram contraction per ordered algebra pair, total cost
    d^2 (sum_i q_i)^2. max_abelian: the sum collapses to the basis purity
    Q = sum_{ij} |<b_i|U|b_j>|^4 and Phi = (1 - Q/d) / (1 - 1/d).
    """
    um = _mat(u)
    d = algebras.d
    _check_shape(um, d)
    if algebras.kind == "max_abelian":
        m = algebras.basis.conj().T @ um @ algebras.basis
        q_purity = float(np.sum(np.abs(m) ** 4))
        value = (1.0 - q_purity / d) / (1.0 - 1.0 / d)
        norms = np.array([[q_purity - 1.0]])
        return PhiResult(value, "correlator", algebras.dim_w_traceless, norms)
    m = algebras.num_algebras
    if m == 1 and algebras.block_dims()[0] == d:
        note = "single algebra covers B(H); conjugation preserves it exactly"
        return PhiResult(0.0, "correlator", algebras.dim_w_traceless,
                         np.array([[float(d * d - 1)]]), note)
    norms = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            norms[i, j] = pair_overlap_norm(algebras, um, i, j)
    value = 1.0 - float(norms.sum()) / algebras.dim_w_traceless
    return PhiResult(value, "correlator", algebras.dim_w_traceless, norms)


def phi_man(algebras: AlgebraSet, u) -> PhiResult:
    """Phi assembled from subsystem independence scores (literal route).

    Each ordered pair contributes through the bridge
    S_ij = 1 - (1 + ||C_ij||^2)/q_i^2 computed by explicit conjugation, and

        Phi = sum_i w_i [1 - sum_j (1 - S_ij / (1 - 1/q_i^2))],
        w_i = (q_i^2 - 1) / dim W'.

    Raises for the abelian kind: independence scores compare factor algebras,
    and the diagonal projectors of an abelian algebra are neither factors nor
    orthogonal after removing their trace, so the assembly above does not
    apply to it.
    """
    _require_sites(algebras, "independence-score assembly")
    um = _mat(u)
    d = algebras.d
    _check_shape(um, d)
    m = algebras.num_algebras
    qs = algebras.block_dims()
    dim_w = algebras.dim_w_traceless
    norms = np.empty((m, m))
    value = 0.0
    for i in range(m):
        wi = (qs[i] ** 2 - 1) / dim_w
        inner = 0.0
        for j in range(m):
            norms[i, j] = pair_overlap_norm_literal(algebras, um, i, j)
            s_ij = 1.0 - (1.0 + norms[i, j]) / qs[i] ** 2
            inner += 1.0 - s_ij / (1.0 - 1.0 / qs[i] ** 2)
        value += wi * (1.0 - inner)
    return PhiResult(value, "man", dim_w, norms)


def phi_projection(algebras: AlgebraSet, u) -> PhiResult:
    """Phi from the materialized superoperator projectors (oracle route).

    Builds P_W and P_{U W U^dag} as d^2 x d^2 matrices from an orthonormal
    basis of W (traceless part plus identity) and evaluates the definition
    ||P_W - P_{UWU^dag}||_F^2 / (2 dim W') literally. Memory d^4; capped.
    """
    um = _mat(u)
    d = algebras.d
    _check_shape(um, d)
    if d > TOL.projection_oracle_max_dim:
        raise SizeError(f"projection oracle holds d^4 numbers; d = {d} exceeds "
                        f"cap {TOL.projection_oracle_max_dim}")
    wb = algebras.w_basis()
    imgs = np.stack([um @ b @ um.conj().T for b in wb])
    e0 = (np.eye(d) / np.sqrt(d)).reshape(-1)

    def projector(basis3: np.ndarray) -> np.ndarray:
        v = basis3.reshape(basis3.shape[0], d * d).T
        p = v @ v.conj().T
        p += np.outer(e0, e0.conj())
        return p

    p_w = projector(wb)
    p_uw = projector(imgs)
    dist2 = float(np.sum(np.abs(p_w - p_uw) ** 2))
    value = dist2 / (2.0 * algebras.dim_w_traceless)
    return PhiResult(value, "projection", algebras.dim_w_traceless)


def generalized_phi(algebras: AlgebraSet, u) -> PhiResult:
    """Phi(A, U) for any supported algebra set.

    A single algebra on one side of a bipartition is scored as the operator
    entanglement of the cut normalized by its maximum 1 - 1/min(d1, d2)^2,
    so the value can reach 1 regardless of which side carries the algebra.
    Every other kind (full factorization, site subsets, the maximal abelian
    algebra) goes through the correlator sum rule unchanged.
    """
    um = _mat(u)
    if (algebras.kind == "sites" and algebras.num_algebras == 1
            and algebras.fact.num_sites == 2):
        d = algebras.d
        _check_shape(um, d)
        qs = algebras.block_dims()[0]
        ent = 1.0 - (1.0 + pair_overlap_norm(algebras, um, 0, 0)) / qs**2
        dmin = min(algebras.fact.dims)
        value = ent / (1.0 - 1.0 / dmin**2)
        note = f"operator entanglement {ent:.12g} normalized by its maximum"
        return PhiResult(value, "correlator", algebras.dim_w_traceless,
                         note=note)
    return phi_correlator(algebras, um)


def _pair_max_residual(ut, dims, d, si: int, sj: int) -> float:
    """Saturation residual of one ordered pair; ut is U reshaped to dims+dims."""
    M = len(dims)
    row_rest = [k for k in range(M) if k != si]
    col_rest = [M + k for k in range(M) if k != sj]
    v = ut.transpose([si] + row_rest + [M + sj] + col_rest)
    qi, qj = dims[si], dims[sj]
    v = v.reshape(qi, d // qi, qj, d // qj)
    t = np.einsum("axby,dxcy->abdc", v, v.conj())
    target = (d / (qi * qj)) * np.einsum(
        "ad,bc->abdc", np.eye(qi), np.eye(qj))
    return float(np.max(np.abs(t - target)))


def check_max_condition(u, fact, basis: Sequence | None = None) -> np.ndarray:
    """Saturation residuals for every ordered pair of factors.

    Phi is maximal if there is a product basis in which, for every pair (i, j),

        sum_{x,y} v[a, x, b, y] conj(v[d, x, c, y])
            = (d / (q_i q_j)) delta_{ad} delta_{bc},

    where the row index of U is grouped as (a, x) with a the site-i component
    and the column index as (b, y) with b the site-j component. ``basis``
    optionally lists one unitary per site whose columns define that product
    basis (default: computational). Returns the (M, M) matrix of max absolute
    deviations; all entries vanishing is sufficient for Phi = 1. The criterion
    is one-sided: a nonzero residual in one basis rules nothing out.
    """
    if isinstance(fact, AlgebraSet):
        _require_sites(fact, "saturation check")
        sites = fact.sites
        fact = fact.fact
    elif isinstance(fact, TensorFactorization):
        sites = tuple(range(fact.num_sites))
    else:
        fact = TensorFactorization(tuple(fact))
        sites = tuple(range(fact.num_sites))
    um = np.asarray(_mat(u))
    dims = fact.dims
    d = fact.d
    _check_shape(um, d)
    if basis is not None:
        locs = [np.asarray(_mat(b)) for b in basis]
        if len(locs) != len(dims):
            raise ValueError(f"need one basis per site, got {len(locs)}")
        big = kron_all(locs)
        um = big.conj().T @ um @ big
    ut = um.reshape(dims + dims)
    m = len(sites)
    out = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            out[i, j] = _pair_max_residual(ut, dims, d, sites[i], sites[j])
    return out


class TwoUnitaryCheck(NamedTuple):
    ok: bool
    residual: float


def is_two_unitary(u, q: int, tol: float | None = None) -> TwoUnitaryCheck:
    """Check 2-unitarity of u on C^q (x) C^q.

    Besides u itself being unitary, both index regroupings

        M1[(k1, l1), (k2, l2)] = u[(k1, k2), (l1, l2)]
        M2[(k2, l1), (k1, l2)] = u[(k1, k2), (l1, l2)]

    must be unitary. SWAP passes the first and fails the second; the identity
    does the opposite. The residual is the worst deviation of M M^dag from 1
    over both regroupings (and u itself).
    """
    um = np.asarray(_mat(u))
    d = q * q
    _check_shape(um, d)
    if tol is None:
        tol = TOL.unitary_construction
    ut = um.reshape(q, q, q, q)
    eye = np.eye(d)
    resid = float(np.max(np.abs(um @ um.conj().T - eye)))
    for order in ((0, 2, 1, 3), (1, 2, 0, 3)):
        m = ut.transpose(order).reshape(d, d)
        resid = max(resid, float(np.max(np.abs(m @ m.conj().T - eye))))
    return TwoUnitaryCheck(resid < tol, resid)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def two_unitary_example(q: int) -> np.ndarray:
    """A 2-unitary permutation on C^q (x) C^q for prime q >= 3.

    U|i, j> = |i + j mod q, i + 2j mod q>. The linear map (i,j) -> (i+j, i+2j)
    is invertible over Z_q, and so are all four blocks of its matrix
    [[1, 1], [1, 2]], which is exactly the 2-unitarity condition for
    permutations of this form. No such permutation exists for q = 2, and the
    block-invertibility argument needs a field, so composite q is rejected.
    """
    if not _is_prime(q) or q < 3:
        raise ValueError(f"need a prime q >= 3, got {q}")
    d = q * q
    u = np.zeros((d, d))
    for i in range(q):
        for j in range(q):
            u[((i + j) % q) * q + (i + 2 * j) % q, i * q + j] = 1.0
    return u.astype(complex)
