"""Spin-chain Hamiltonian builders with seeded disorder.

Three families, all with open boundary conditions:

* ``tfim``: Ising chain of N qubits, H = -sum_j sz_j sz_{j+1}
  - sum_j (h sz_j + g_j sx_j).  Named coupling points cover a clean
  integrable chain, a nonintegrable one, and two disordered ones
  (Anderson-like at h = 0, interacting at h = 0.5).
* ``temperley_lieb``: qutrit chain, H = sum_j J_j e_{j,j+1} where each
  bond term is three times the projector onto the maximally entangled
  pair state (1/sqrt(3)) sum_a |aa>.
* ``tjz``: constrained fermions with Ising-type spin coupling.  Built
  on the full 4^N fermionic Fock space through a Jordan-Wigner mapping
  (mode order: site-0 up, site-0 down, site-1 up, ...), then compressed
  onto the 3^N no-double-occupancy subspace with local basis
  (|empty>, |up>, |down>).  S^z_j means n_up - n_down without a 1/2.

Builders are pure and return dense Hermitian matrices wrapped in
``DenseOperator``; disorder draws come from caller-supplied generators
so realizations can be forked deterministically.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .config import TOL
from .linalg import DenseOperator, SizeError, embed_local
from .randomness import SeededGenerator
from .structure import TensorFactorization

FAMILIES = ("tfim", "temperley_lieb", "tjz")
TFIM_REGIMES = ("nonintegrable", "integrable", "anderson", "mbl")

# Which coupling keys each family accepts, and whether the value is a
# scalar or a per-site / per-bond list.  This doubles as the schema for
# the flat key-value config format.
COUPLING_SCHEMA: dict[str, dict[str, str]] = {
    "tfim": {"h": "scalar", "g": "list", "zz_coupling": "scalar"},
    "temperley_lieb": {"J": "list"},
    "tjz": {"t": "list", "Jz": "list", "hz": "list", "gz": "list"},
}

_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def _as_float_list(values, length: int, name: str) -> list[float]:
    out = [float(v) for v in np.atleast_1d(values)]
    if len(out) == 1 and length > 1:
        out = out * length
    if len(out) != length:
        raise ValueError(f"{name} needs {length} entries, got {len(out)}")
    return out


def _embed_bond(op: np.ndarray, bond: int, dims: Sequence[int]) -> np.ndarray:
    """Embed a two-site operator acting on (bond, bond+1) into the chain."""
    dims = list(dims)
    left = int(np.prod(dims[:bond], dtype=int)) if bond else 1
    right = int(np.prod(dims[bond + 2:], dtype=int)) if bond + 2 < len(dims) else 1
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


@dataclass(frozen=True)
class ModelConfig:
    """Serializable description of a model instance.

    ``couplings`` holds explicit values (see COUPLING_SCHEMA); when it is
    None the values are resolved at build time from ``regime`` (tfim) or
    drawn uniformly (temperley_lieb, tjz) using ``disorder_seed``.
    """

    family: str
    n_sites: int
    regime: str | None = None
    couplings: Mapping[str, object] | None = None
    disorder_seed: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if self.n_sites < 2:
            raise ValueError("need at least 2 sites")
        if self.regime is not None:
            if self.family != "tfim":
                raise ValueError("regime presets only apply to the tfim family")
            if self.regime not in TFIM_REGIMES:
                raise ValueError(f"unknown regime {self.regime!r}, expected one of {TFIM_REGIMES}")
        if self.couplings is not None:
            schema = COUPLING_SCHEMA[self.family]
            unknown = set(self.couplings) - set(schema)
            if unknown:
                raise ValueError(f"unknown coupling keys for {self.family}: {sorted(unknown)}")

    def to_mapping(self) -> dict[str, str]:
        """Flatten to a human-editable key-value mapping (all strings)."""
        out = {"family": self.family, "n_sites": str(self.n_sites)}
        if self.regime is not None:
            out["regime"] = self.regime
        if self.disorder_seed is not None:
            out["disorder_seed"] = str(self.disorder_seed)
        if self.couplings is not None:
            schema = COUPLING_SCHEMA[self.family]
            for key, value in self.couplings.items():
                if schema[key] == "scalar":
                    out[key] = repr(float(value))
                else:
                    out[key] = ",".join(repr(float(v)) for v in np.atleast_1d(value))
        return out

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "ModelConfig":
        data = dict(mapping)
        family = str(data.pop("family"))
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}, expected one of {FAMILIES}")
        n_sites = int(data.pop("n_sites"))
        regime = data.pop("regime", None)
        seed = data.pop("disorder_seed", None)
        seed = int(seed) if seed is not None else None
        schema = COUPLING_SCHEMA[family]
        couplings: dict[str, object] = {}
        for key in list(data):
            if key not in schema:
                raise ValueError(f"unknown config key {key!r} for family {family}")
            raw = data.pop(key)
            if schema[key] == "scalar":
                couplings[key] = float(raw)
            elif isinstance(raw, str):
                couplings[key] = [float(tok) for tok in raw.split(",") if tok.strip()]
            else:
                couplings[key] = [float(v) for v in np.atleast_1d(raw)]
        return cls(family, n_sites, regime=regime,
                   couplings=couplings or None, disorder_seed=seed)


@dataclass(frozen=True)
class BuiltModel:
    """A constructed Hamiltonian plus the bookkeeping needed to rerun it."""

    family: str
    hamiltonian: DenseOperator
    fact: TensorFactorization
    couplings: dict[str, object]
    label: str
    leakage: float | None = None

    @property
    def n_sites(self) -> int:
        return self.fact.num_sites

    @property
    def dim(self) -> int:
        return self.fact.d


def tfim_regime_couplings(regime: str, n_sites: int, rng=None) -> dict[str, object]:
    """Coupling values for the four named Ising-chain parameter points.

    The two disordered regimes draw g_i uniformly from [-10, 10] and need
    a generator.
    """
    if regime == "nonintegrable":
        return {"h": 0.5, "g": [1.05] * n_sites}
    if regime == "integrable":
        return {"h": 0.0, "g": [1.0] * n_sites}
    if regime in ("anderson", "mbl"):
        if rng is None:
            raise ValueError(f"regime {regime!r} draws disorder and needs a generator")
        g = [float(v) for v in rng.uniform(-10.0, 10.0, size=n_sites)]
        return {"h": 0.0 if regime == "anderson" else 0.5, "g": g}
    raise ValueError(f"unknown regime {regime!r}, expected one of {TFIM_REGIMES}")


def sample_disorder(family: str, n_sites: int, rng) -> dict[str, object]:
    """Draw one disorder realization for the given family.

    tfim: transverse fields g_i uniform on [-10, 10].
    temperley_lieb: bond strengths J_j uniform on [0, 1].
    tjz: all four coupling lists uniform on [0, 1].
    """
    if family == "tfim":
        return {"g": [float(v) for v in rng.uniform(-10.0, 10.0, size=n_sites)]}
    if family == "temperley_lieb":
        return {"J": [float(v) for v in rng.uniform(0.0, 1.0, size=n_sites - 1)]}
    if family == "tjz":
        return {
            "t": [float(v) for v in rng.uniform(0.0, 1.0, size=n_sites - 1)],
            "Jz": [float(v) for v in rng.uniform(0.0, 1.0, size=n_sites - 1)],
            "hz": [float(v) for v in rng.uniform(0.0, 1.0, size=n_sites)],
            "gz": [float(v) for v in rng.uniform(0.0, 1.0, size=n_sites)],
        }
    raise ValueError(f"unknown family {family!r}, expected one of {FAMILIES}")


def disorder_repetitions(n_sites: int) -> int:
    """Number of disorder realizations to average, floor(200 / N), at least 1."""
    return max(1, 200 // int(n_sites))


def build_tfim(n_sites: int, h: float, g, zz_coupling: float = 1.0) -> BuiltModel:
    """Ising chain H = -zz_coupling * sum sz.sz - sum (h sz_j + g_j sx_j).

    ``zz_coupling`` scales the whole nearest-neighbor term; setting it to 0
    leaves a strictly single-site Hamiltonian (useful as a null case where
    the distance to the site tensor product structure stays at zero).
    """
    n = int(n_sites)
    if n < 2:
        raise ValueError("need at least 2 sites")
    gs = _as_float_list(g, n, "g")
    h = float(h)
    zz = float(zz_coupling)
    dims = [2] * n
    d = 2 ** n
    zz_bond = np.kron(_PAULI_Z, _PAULI_Z)
    hm = np.zeros((d, d))
    for bond in range(n - 1):
        hm -= zz * _embed_bond(zz_bond, bond, dims)
    for site in range(n):
        hm -= h * embed_local(_PAULI_Z, site, dims)
        hm -= gs[site] * embed_local(_PAULI_X, site, dims)
    couplings = {"h": h, "g": gs, "zz_coupling": zz}
    return BuiltModel("tfim", DenseOperator.hermitian(hm),
                      TensorFactorization(dims), couplings, f"tfim_N{n}")


def build_temperley_lieb(n_sites: int, J) -> BuiltModel:
    """Qutrit chain H = sum_j J_j e_{j,j+1} with e = 3 |psi><psi| per bond,
    |psi> the normalized sum over |aa>.  Each e is idempotent up to the
    factor 3 (e^2 = 3e) and has unit-rank support on the 9-dim bond space.
    """
    n = int(n_sites)
    if n < 2:
        raise ValueError("need at least 2 sites")
    js = _as_float_list(J, n - 1, "J")
    dims = [3] * n
    d = 3 ** n
    pair = np.zeros(9)
    pair[[0, 4, 8]] = 1.0 / np.sqrt(3.0)
    e_bond = 3.0 * np.outer(pair, pair)
    hm = np.zeros((d, d))
    for bond in range(n - 1):
        hm += js[bond] * _embed_bond(e_bond, bond, dims)
    couplings = {"J": js}
    return BuiltModel("temperley_lieb", DenseOperator.hermitian(hm),
                      TensorFactorization(dims), couplings, f"temperley_lieb_N{n}")


def _annihilators(n_modes: int) -> list[sparse.csr_matrix]:
    """Jordan-Wigner annihilation operators on 2^n_modes, mode 0 most significant."""
    a = sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    z = sparse.csr_matrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
    eye2 = sparse.identity(2, format="csr")
    ops = []
    for m in range(n_modes):
        acc = None
        for factor in [z] * m + [a] + [eye2] * (n_modes - m - 1):
            acc = factor if acc is None else sparse.kron(acc, factor, format="csr")
        ops.append(acc.tocsr())
    return ops


def _constrained_indices(n_sites: int) -> np.ndarray:
    """Fock-space indices of the no-double-occupancy states, ordered by the
    3^N product basis with local states (|empty>, |up>, |down>) and site 0
    most significant."""
    # (up bit, down bit) per local state
    bits = [(0, 0), (1, 0), (0, 1)]
    idx = np.empty(3 ** n_sites, dtype=np.int64)
    for k in range(3 ** n_sites):
        rem, digits = k, []
        for _ in range(n_sites):
            digits.append(rem % 3)
            rem //= 3
        digits.reverse()
        f = 0
        for dgt in digits:
            up, dn = bits[dgt]
            f = (f << 2) | (up << 1) | dn
        idx[k] = f
    return idx


def build_tjz(n_sites: int, t, Jz, hz, gz) -> BuiltModel:
    """Constrained-fermion chain on the 3^N no-double-occupancy space.

    H = sum_j [ -t_j sum_s (c_{j,s} c^+_{j+1,s} + h.c.)
                + Jz_j Sz_j Sz_{j+1} ] + sum_j (hz_j Sz_j + gz_j Sz_j^2)

    with Sz_j = n_{j,up} - n_{j,down}.  The matrix is assembled on the full
    4^N Fock space with Jordan-Wigner strings (modes ordered site-0 up,
    site-0 down, site-1 up, ...), then both rows and columns are restricted
    to the 3^N constrained basis.  The weight the hopping term sends out of
    that subspace is reported as ``leakage`` (Frobenius norm of the
    off-block column slice), not silently dropped.
    """
    n = int(n_sites)
    if n < 2:
        raise ValueError("need at least 2 sites")
    if n > TOL.tjz_max_sites:
        raise SizeError(f"tjz chain with {n} sites exceeds the {TOL.tjz_max_sites}-site cap")
    ts = _as_float_list(t, n - 1, "t")
    jzs = _as_float_list(Jz, n - 1, "Jz")
    hzs = _as_float_list(hz, n, "hz")
    gzs = _as_float_list(gz, n, "gz")

    n_modes = 2 * n
    dim_fock = 4 ** n
    cs = _annihilators(n_modes)

    hop = sparse.csr_matrix((dim_fock, dim_fock))
    for j in range(n - 1):
        for s in (0, 1):
            m1, m2 = 2 * j + s, 2 * (j + 1) + s
            term = cs[m1] @ cs[m2].getH()
            hop = hop - ts[j] * (term + term.getH())

    # occupation of mode m, as a diagonal over the Fock basis
    basis = np.arange(dim_fock, dtype=np.int64)
    occ = [((basis >> (n_modes - 1 - m)) & 1).astype(float) for m in range(n_modes)]
    sz = [occ[2 * j] - occ[2 * j + 1] for j in range(n)]
    diag = np.zeros(dim_fock)
    for j in range(n - 1):
        diag += jzs[j] * sz[j] * sz[j + 1]
    for j in range(n):
        diag += hzs[j] * sz[j] + gzs[j] * sz[j] ** 2
    h_fock = (hop + sparse.diags(diag)).tocsc()

    idx = _constrained_indices(n)
    cols = h_fock[:, idx].tocsr()
    h3 = cols[idx, :].toarray()
    col_weight = float(cols.multiply(cols).sum())
    leak_sq = max(col_weight - float(np.sum(h3 * h3)), 0.0)
    couplings = {"t": ts, "Jz": jzs, "hz": hzs, "gz": gzs}
    return BuiltModel("tjz", DenseOperator.hermitian(h3),
                      TensorFactorization([3] * n), couplings, f"tjz_N{n}",
                      leakage=float(np.sqrt(leak_sq)))


def build_model(config: ModelConfig, rng=None) -> BuiltModel:
    """Build from a ModelConfig, resolving regime presets and disorder draws.

    Explicit ``config.couplings`` win over everything.  Otherwise tfim
    resolves its regime preset, and the other families draw one disorder
    realization.  When a draw is needed and no generator is passed, one is
    forked from ``config.disorder_seed``.
    """
    def need_rng():
        nonlocal rng
        if rng is None:
            if config.disorder_seed is None:
                raise ValueError("disordered couplings need disorder_seed or an explicit generator")
            rng = SeededGenerator(config.disorder_seed).stream(0)
        return rng

    family, n = config.family, config.n_sites
    couplings = dict(config.couplings) if config.couplings is not None else None
    if family == "tfim":
        if couplings is None:
            if config.regime is None:
                raise ValueError("tfim needs either explicit couplings or a regime")
            gen = need_rng() if config.regime in ("anderson", "mbl") else None
            couplings = tfim_regime_couplings(config.regime, n, gen)
        couplings.setdefault("h", 0.0)
        couplings.setdefault("zz_coupling", 1.0)
        if "g" not in couplings:
            raise ValueError("tfim couplings need the transverse fields g")
        built = build_tfim(n, couplings["h"], couplings["g"], couplings["zz_coupling"])
    elif family == "temperley_lieb":
        if couplings is None:
            couplings = sample_disorder(family, n, need_rng())
        built = build_temperley_lieb(n, couplings["J"])
    else:
        if couplings is None:
            couplings = sample_disorder(family, n, need_rng())
        for key in COUPLING_SCHEMA["tjz"]:
            if key not in couplings:
                raise ValueError(f"tjz couplings need {key}")
        built = build_tjz(n, couplings["t"], couplings["Jz"], couplings["hz"], couplings["gz"])
    label = built.label if config.regime is None else f"{family}_{config.regime}_N{n}"
    return dataclasses.replace(built, label=label)
