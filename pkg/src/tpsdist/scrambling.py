"""Independence scores, operator entanglement and short-time scrambling.

The subsystem independence score of the conjugated algebra U A_i U^dag
against A_j is

    S_ij = 1 - (1 + ||C_ij||_F^2) / q_i^2,

zero iff the image still contains A_j-aligned structure at the maximum
possible level (e.g. S_ii = 0 at U = 1) and saturating its bound 1 - 1/q_i^2
iff the image is maximally independent of A_j. Sums of these scores reproduce
Phi for factor algebra sets, tie the bipartite distance to operator
entanglement, and give the entangling power in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    _mat,
    embed_local,
    kron,
    partial_trace,
    swap_pair,
)
from .geometry import pair_overlap_norm, pair_overlap_norm_literal
from .randomness import haar_unitary
from .structure import AlgebraSet, TensorFactorization, full_tps


@dataclass(frozen=True)
class ManValue:
    """Independence score of one ordered algebra pair.

    ``value`` = S(U A_i U^dag : A_j'), bounded by 0 <= value <= 1 - 1/q_i^2:
    zero iff conjugation leaves the algebra fully reconstructable from site j,
    maximal iff the image commutes with everything outside site j as much as
    a unitary image can.
    """

    i: int
    j: int
    value: float


def _site_algebras(algebras, what: str) -> AlgebraSet:
    """Coerce a factorization, dims sequence, or sites AlgebraSet."""
    if isinstance(algebras, AlgebraSet):
        if algebras.kind != "sites":
            raise ValueError(f"{what} compares factor algebras; "
                             f"got kind {algebras.kind!r}")
        return algebras
    if isinstance(algebras, TensorFactorization):
        return full_tps(algebras.dims)
    return full_tps(tuple(algebras))


def man(algebras, u, i: int, j: int, method: str = "gram") -> ManValue:
    """Independence score S(U A_i U^dag : A_j') for factor algebras.

    ``algebras`` may be an AlgebraSet of sites kind, a TensorFactorization,
    or a plain dims sequence. ``method`` selects how ||C_ij||^2 is obtained:
    ``gram`` (production, d^2 q_i q_j) or ``literal`` (explicit conjugation
    of every generator, (q_i^2 - 1) d^3).
    """
    aset = _site_algebras(algebras, "independence scores")
    if method == "gram":
        norm2 = pair_overlap_norm(aset, u, i, j)
    elif method == "literal":
        norm2 = pair_overlap_norm_literal(aset, u, i, j)
    else:
        raise ValueError(f"unknown method {method!r}")
    qi = aset.block_dims()[i]
    return ManValue(i, j, 1.0 - (1.0 + norm2) / qi**2)


def man_swap_oracle(algebras, u, i: int, j: int) -> float:
    """S_ij evaluated on the doubled space (dense oracle).

    S_ij = 1 - (q_j / q_i) Tr[(U (x) U) S_ii' (U (x) U)^dag S_jj'] / d^2,
    with S_ii' the swap of factor i across the two copies. Storage d^4.
    """
    aset = _site_algebras(algebras, "independence scores")
    um = _mat(u)
    dims = aset.fact.dims
    d = aset.d
    si, sj = aset.sites[i], aset.sites[j]
    qi, qj = dims[si], dims[sj]
    s_i = swap_pair(si, dims)
    s_j = swap_pair(sj, dims)
    uu = kron(um, um)
    conj = uu @ s_i @ uu.conj().T
    val = float(np.trace(conj @ s_j).real)
    return 1.0 - (qj / qi) * val / d**2


def man_commutator_mc(algebras, u, i: int, j: int, n_samples: int,
                      rng: np.random.Generator) -> tuple[float, float]:
    """Statistical oracle for S_ij from its commutator definition.

    S_ij = (1/2d) E ||[U X U^dag, Y]||_F^2 over Haar unitaries X in A_i and
    Y in A_j' (the commutant of A_j, everything outside site j). Returns
    (estimate, stderr). Dense d x d work per sample; small systems only.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples for a standard error")
    aset = _site_algebras(algebras, "independence scores")
    um = _mat(u)
    dims = list(aset.fact.dims)
    d = aset.d
    si, sj = aset.sites[i], aset.sites[j]
    vals = np.empty(n_samples)
    for s in range(n_samples):
        x = embed_local(haar_unitary(dims[si], rng), si, dims)
        xe = um @ x @ um.conj().T
        w = haar_unitary(d // dims[sj], rng)
        y = _embed_complement(_mat(w), sj, dims)
        c = xe @ y - y @ xe
        vals[s] = float(np.sum(np.abs(c) ** 2)) / (2.0 * d)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))


def operator_entanglement(u, d1: int, d2: int) -> float:
    """Operator entanglement E(U) of a unitary on H_1 (x) H_2.

    Realign R[(k1, l1), (k2, l2)] = u[(k1, k2), (l1, l2)]; the singular values
    s_k of R are the operator Schmidt coefficients and

        E(U) = 1 - sum_k s_k^4 / d^2 = 1 - ||R R^dag||_F^2 / d^2.

    E(1) = 0, E(SWAP) = 1 - 1/q^2 on equal factors, and E is symmetric in the
    two factors. Cost d^2 min(d1, d2)^2 via the smaller Gram side.
    """
    um = _mat(u)
    d = d1 * d2
    if um.shape != (d, d):
        raise ValueError(f"unitary shape {um.shape} does not match {d1}x{d2}")
    r = um.reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
    g = r @ r.conj().T if d1 <= d2 else r.conj().T @ r
    return 1.0 - float(np.sum(np.abs(g) ** 2)) / d**2


def operator_entanglement_swap_oracle(u, d1: int, d2: int) -> float:
    """E(U) from the doubled-space swap trace (dense oracle, storage d^4)."""
    return man_swap_oracle(full_tps((d1, d2)), u, 0, 0)


def phi_bipartite(u, d1: int, d2: int, method: str = "gram") -> float:
    """Phi of the two-factor set {A_1, A_2} from source-1 scores only.

    The doubled-space identities S_22 = S_11 and ||C_21|| = ||C_12|| collapse
    the four correlator blocks onto the first row, leaving

        Phi = [(d1^2 + d2^2) S_11 + 2 d1^2 S_12 - 2 (d1^2 - 1)]
              / (d1^2 + d2^2 - 2),

    with S_11 = S(U A_1 U^dag : A_1) and S_12 = S(U A_1 U^dag : A_2).
    Vanishes at U = 1 and at SWAP (the set of algebras is preserved), and
    agrees with the correlator route on the full two-factor set.
    """
    alg = full_tps((d1, d2))
    s11 = man(alg, u, 0, 0, method=method).value
    s12 = man(alg, u, 0, 1, method=method).value
    denom = d1**2 + d2**2 - 2
    return ((d1**2 + d2**2) * s11 + 2 * d1**2 * s12 - 2 * (d1**2 - 1)) / denom


def _factor_exchange(d1: int, d2: int) -> np.ndarray:
    """Relabeling H_1 (x) H_2 -> H_2 (x) H_1: |k1, k2> -> |k2, k1>."""
    d = d1 * d2
    return np.eye(d).reshape(d1, d2, d).transpose(1, 0, 2).reshape(d, d)


def entangling_power(u, d1: int, d2: int, method: str = "gram") -> float:
    """Normalized entangling power of u on H_1 (x) H_2.

    Average linear entropy generated on Haar product states, scaled to
    [0, 1] by its ceiling (1 - 1/d1)/(1 + 1/d2):

        e_p = d1^2/(d1^2 - 1) [ S_11 + (d1^2/d) S_12 ] - d1^2/d,

    with the same source-1 scores as ``phi_bipartite``. e_p(1) = 0 and
    e_p(SWAP) = 0; on equal factors e_p = [E(U) + E(US) - E(S)] / E(S).
    Factors are relabeled internally so the smaller one comes first.
    """
    if d1 > d2:
        p = _factor_exchange(d1, d2)
        return entangling_power(p @ _mat(u) @ p.T, d2, d1, method=method)
    d = d1 * d2
    alg = full_tps((d1, d2))
    s11 = man(alg, u, 0, 0, method=method).value
    s12 = man(alg, u, 0, 1, method=method).value
    c = d1**2 / (d1**2 - 1)
    return c * (s11 + (d1**2 / d) * s12) - d1**2 / d


def entangling_power_mc(u, d1: int, d2: int, n_samples: int,
                        rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo estimate of the entangling power from its definition.

    Draws Haar product states |psi_1>|psi_2>, evolves, and averages the
    linear entropy of the first reduced state; returns (estimate, stderr)
    after dividing by the ceiling (1 - 1/d1)/(1 + 1/d2).
    """
    if d1 > d2:
        p = _factor_exchange(d1, d2)
        return entangling_power_mc(p @ _mat(u) @ p.T, d2, d1,
                                   n_samples, rng)
    um = _mat(u)
    vals = np.empty(n_samples)
    for s in range(n_samples):
        p1 = rng.standard_normal(d1) + 1j * rng.standard_normal(d1)
        p2 = rng.standard_normal(d2) + 1j * rng.standard_normal(d2)
        psi = np.kron(p1 / np.linalg.norm(p1), p2 / np.linalg.norm(p2))
        out = (um @ psi).reshape(d1, d2)
        rho1 = out @ out.conj().T
        vals[s] = 1.0 - float(np.sum(np.abs(rho1) ** 2))
    ceiling = (1.0 - 1.0 / d1) / (1.0 + 1.0 / d2)
    vals /= ceiling
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))


def _dims_list(fact) -> list[int]:
    if isinstance(fact, AlgebraSet):
        fact = fact.fact
    if isinstance(fact, TensorFactorization):
        return list(fact.dims)
    return [int(q) for q in fact]


def reduced_map(fact, u, i: int, j: int, rho) -> np.ndarray:
    """The site i -> site j reduced channel of conjugation by u.

    Lambda(rho) = Tr_{jbar}[ U (rho_i (x) (q_i/d) 1_{ibar}) U^dag ]: feed rho
    into factor i with everything else maximally mixed, evolve, keep factor j.
    Trace is preserved. Dense d x d intermediate.
    """
    dims = _dims_list(fact)
    um = _mat(u)
    d = int(np.prod(dims))
    qi = dims[i]
    rm = np.asarray(_mat(rho), dtype=complex)
    if rm.shape != (qi, qi):
        raise ValueError(f"input state shape {rm.shape} != ({qi}, {qi})")
    if abs(np.trace(rm) - 1.0) > 1e-10:
        raise ValueError(f"input state trace {np.trace(rm):.6g} != 1")
    if np.max(np.abs(rm - rm.conj().T)) > 1e-10:
        raise ValueError("input state is not Hermitian")
    lowest = float(np.linalg.eigvalsh(rm)[0])
    if lowest < -1e-10:
        raise ValueError(f"input state has negative eigenvalue {lowest:.3e}")
    state = (qi / d) * embed_local(rm, i, dims)
    out = um @ state @ um.conj().T
    return partial_trace(out, dims, j)


def phi_entropy_mc(fact, u, n_samples: int,
                   rng: np.random.Generator) -> tuple[float, float]:
    """Phi of the full TPS from sampled reduced-channel entropies.

    For equal local dimensions q,

        Phi = (q/(q-1)) (1/M) sum_{ij} E_psi S_lin(Lambda^{(i->j)}(psi))
              - (M - 1),

    with psi Haar on factor i. Each sample draws one psi per source factor
    and evaluates every target via one slab contraction U (|psi>_i (x) 1);
    returns (estimate, stderr). Statistical cross-check of the exact routes.
    """
    dims = _dims_list(fact)
    q = dims[0]
    if any(x != q for x in dims):
        raise ValueError(f"entropy route needs equal local dims, got {dims}")
    um = _mat(u)
    d = int(np.prod(dims))
    m = len(dims)
    vals = np.empty(n_samples)
    for s in range(n_samples):
        inner = 0.0
        for i in range(m):
            psi = rng.standard_normal(q) + 1j * rng.standard_normal(q)
            psi /= np.linalg.norm(psi)
            left = q**i
            right = q ** (m - 1 - i)
            u5 = um.reshape(d, left, q, right)
            slab = np.einsum("plnr,n->plr", u5, psi).reshape(d, d // q)
            for j in range(m):
                lj = q**j
                rj = q ** (m - 1 - j)
                s3 = slab.reshape(lj, q, rj, d // q)
                red = (q / d) * np.einsum("amby,anby->mn", s3, s3.conj())
                inner += 1.0 - float(np.sum(np.abs(red) ** 2))
        vals[s] = (q / (q - 1.0)) * inner / m - (m - 1.0)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))


def scrambling_rate(h, fact, i: int) -> float:
    """Initial growth rate 1/tau_s(i) of the distance under exp(+iHt).

    Subtract from H its best approximation inside A_i + A_i' + C1 (the parts
    that move nothing at site i) and measure what is left:

        1/tau_s(i) = || H - P_{A_i}H - P_{A_i'}H + Tr(H) 1/d ||_HS / sqrt(d),

    with P_{A_i}H = Tr_{ibar}(H) (x) (q_i/d) 1 and P_{A_i'}H the mirror
    projection (1_i/q_i) (x) Tr_i(H). The three subtracted projections are
    mutually consistent by inclusion-exclusion over the shared identity.
    """
    dims = _dims_list(fact)
    hm = np.asarray(_mat(h), dtype=complex)
    d = int(np.prod(dims))
    if hm.shape != (d, d):
        raise ValueError(f"hamiltonian shape {hm.shape} != ({d}, {d})")
    qi = dims[i]
    h_qi = partial_trace(hm, dims, i)
    p_alg = (qi / d) * embed_local(h_qi, i, dims)
    rest_sites = [k for k in range(len(dims)) if k != i]
    h_rest = partial_trace(hm, dims, rest_sites)
    p_comm = _embed_complement(h_rest, i, dims) / qi
    tr = np.trace(hm)
    delta = hm - p_alg - p_comm + (tr / d) * np.eye(d)
    return float(np.linalg.norm(delta)) / np.sqrt(d)


def _embed_complement(rest: np.ndarray, i: int, dims: list[int]) -> np.ndarray:
    """1_{q_i} at site i tensored with an operator on all other factors."""
    left = int(np.prod(dims[:i], dtype=int))
    right = int(np.prod(dims[i + 1:], dtype=int))
    qi = dims[i]
    d = left * qi * right
    r4 = rest.reshape(left, right, left, right)
    full = np.einsum("lrms,ab->larmbs", r4, np.eye(qi))
    return full.reshape(d, d)


def short_time_coefficient(h, algebras: AlgebraSet) -> float:
    """Leading coefficient c2 in Phi(t) = c2 t^2 + O(t^4) for U_t = exp(+iHt).

    c2 = 2 sum_i q_i^2 / tau_s(i)^2 / dim W'. Phi(t) is even in t, so the
    residual after subtracting c2 t^2 scales as t^4.
    """
    if algebras.kind != "sites":
        raise ValueError("short-time coefficient needs factor algebras")
    dims = list(algebras.fact.dims)
    total = 0.0
    for k, site in enumerate(algebras.sites):
        rate = scrambling_rate(h, dims, site)
        total += algebras.block_dims()[k] ** 2 * rate**2
    return 2.0 * total / algebras.dim_w_traceless
