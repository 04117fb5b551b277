"""Central numerical tolerances and size limits.

Every construction gate, comparison tolerance and oracle size cap used by the
library lives here, so the tests and the library always agree on what "equal"
means in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # construction gates
    hermitian_construction: float = 1e-12
    unitary_construction: float = 1e-10
    eig_reconstruction: float = 1e-10
    # generic comparison tolerance for identities checked by verify suites
    comparison: float = 1e-9
    # size caps
    kron_max_dim: int = 4 ** 8          # largest full-space dimension we build
    projection_oracle_max_dim: int = 64  # phi_projection builds d^2 x d^2 matrices
    swap_oracle_max_dim: int = 64        # doubled-space operators are (d^2)^2 dense
    resonance_oracle_max_dim: int = 256  # exact long-time average via gap resonances
    tjz_max_sites: int = 7               # 4^N Fock intermediate
    # dynamics
    gap_group_tol: float = 1e-10         # energy gaps closer than this are resonant
    convergence_tol: float = 0.02        # half-window mismatch flagged above this


TOL = Tolerances()

# Environment variable consulted by the CLI for its default output directory.
OUTPUT_DIR_ENV = "TPSDIST_OUTDIR"
