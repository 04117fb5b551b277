"""Distance of unitary channels from a tensor product structure.

The central quantity is Phi(A, U): how far a unitary U moves a distinguished
set of observable subalgebras A = {A_1, ..., A_M} from itself, normalized so
that Phi = 0 iff U preserves every A_i and Phi = 1 at the maximum. Three
independent computational routes (correlator, algebra-overlap, explicit
superoperator projection) are provided along with lattice models, Haar
baselines and time-series pipelines.
"""

from .config import TOL, Tolerances
from .linalg import (
    DenseOperator,
    EigenSystem,
    NumericError,
    SizeError,
    embed_local,
    herm_eig,
    hs_inner,
    hs_norm,
    kron,
    kron_all,
    partial_trace,
    permutation_operator,
    propagator,
    propagator_matrix,
    swap_pair,
)
from .structure import (
    AlgebraSet,
    LocalBasis,
    TensorFactorization,
    bipartite_algebra,
    full_tps,
    gell_mann_basis,
    local_basis,
    max_abelian,
    project_w,
    site_subset,
)
from .geometry import (
    PhiResult,
    check_max_condition,
    correlator_matrix,
    generalized_phi,
    is_two_unitary,
    phi_correlator,
    phi_man,
    phi_projection,
    two_unitary_example,
)
from .scrambling import (
    ManValue,
    entangling_power,
    entangling_power_mc,
    man,
    man_commutator_mc,
    man_swap_oracle,
    operator_entanglement,
    operator_entanglement_swap_oracle,
    phi_bipartite,
    phi_entropy_mc,
    reduced_map,
    scrambling_rate,
    short_time_coefficient,
)
from .randomness import (
    SeededGenerator,
    haar_state,
    haar_unitary,
    typical_phi,
    typical_phi_clustered,
    typical_phi_qubit,
    typical_phi_qubit_max,
)
from .models import (
    BuiltModel,
    ModelConfig,
    build_model,
    build_tfim,
    build_temperley_lieb,
    build_tjz,
    disorder_repetitions,
    sample_disorder,
    tfim_regime_couplings,
)
from .dynamics import (
    ExperimentRecord,
    LongTimeAverage,
    default_time_grid,
    fig1_pipeline,
    fig2_pipeline,
    fig3_pipeline,
    long_time_average,
    phi_time_series,
    resonance_average,
    window_average,
    write_record,
    write_table,
)

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Tolerances",
    "DenseOperator",
    "EigenSystem",
    "NumericError",
    "SizeError",
    "embed_local",
    "herm_eig",
    "hs_inner",
    "hs_norm",
    "kron",
    "kron_all",
    "partial_trace",
    "permutation_operator",
    "propagator",
    "propagator_matrix",
    "swap_pair",
    "AlgebraSet",
    "LocalBasis",
    "TensorFactorization",
    "bipartite_algebra",
    "full_tps",
    "gell_mann_basis",
    "local_basis",
    "max_abelian",
    "project_w",
    "site_subset",
    "PhiResult",
    "check_max_condition",
    "correlator_matrix",
    "generalized_phi",
    "is_two_unitary",
    "phi_correlator",
    "phi_man",
    "phi_projection",
    "two_unitary_example",
    "ManValue",
    "entangling_power",
    "entangling_power_mc",
    "man",
    "man_commutator_mc",
    "man_swap_oracle",
    "operator_entanglement",
    "operator_entanglement_swap_oracle",
    "phi_bipartite",
    "phi_entropy_mc",
    "reduced_map",
    "scrambling_rate",
    "short_time_coefficient",
    "SeededGenerator",
    "haar_state",
    "haar_unitary",
    "typical_phi",
    "typical_phi_clustered",
    "typical_phi_qubit",
    "typical_phi_qubit_max",
    "BuiltModel",
    "ModelConfig",
    "build_model",
    "build_tfim",
    "build_temperley_lieb",
    "build_tjz",
    "disorder_repetitions",
    "sample_disorder",
    "tfim_regime_couplings",
    "ExperimentRecord",
    "LongTimeAverage",
    "default_time_grid",
    "fig1_pipeline",
    "fig2_pipeline",
    "fig3_pipeline",
    "long_time_average",
    "phi_time_series",
    "resonance_average",
    "window_average",
    "write_record",
    "write_table",
    "__version__",
]
