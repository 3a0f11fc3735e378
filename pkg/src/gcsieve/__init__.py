"""Coherent-state and pointer-state numerics for Lie-algebraic Markovian open systems."""

from .policy import POLICY, NumericPolicy, displacement_guard
from .opsalg import (
    check_operator, check_pure_state, check_density_matrix,
    mat_exp, kron, kron_all, hermitian_eigen, common_kernel,
    expect, quasivariance, dag, comm,
)
from .liealg import (
    LieRepresentation, WclCertificate,
    spin_rep, boson_rep, squeeze_rep, collective_spin_rep,
    wcl_check, orthonormalize_basis, closure_residual, rep_from_config,
)
from .gcs import GcsManifold, gcs_manifold, displace, sample_gcs, gcs_distance
from .uncertainty import (
    QfiMatrix, qfi_matrix, invariant_uncertainty, invariant_uncertainty_batch,
    gcs_uncertainty_bound, verify_uncertainty_bound,
)
from .lindblad import (
    LindbladModel, PurityTrace, make_model, model_from_config,
    dissipator, liouvillian, evolve, purity, purity_rate,
    average_purity_loss, heisenberg_lindblads, purity_trace, steady_state,
)
from .sieve import (
    Objective, SieveReport, Minimizer, sieve_search, gradient_of_objective,
    time_resolved_sieve, extract_squeezing, objective_value, compile_objective,
)
from .structure import (
    IrrepDecomposition, Block, decompose, dfs_extract, ns_identify,
    verify_dfs, min_uncertainty_over_subspace,
)

__version__ = "0.1.0"
