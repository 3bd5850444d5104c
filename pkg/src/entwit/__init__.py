"""Witnessed multipartite entanglement measures and their structural checks.

Computes the best separable approximation, the generalized robustness, and
the interpolating spectral-box family of witnessed entanglement measures
by cutting-plane optimization with a product-state oracle, and verifies
the block form of optimal witnesses, the overlap/robustness bound, and the
Schmidt-rank collapse construction numerically.
"""

from .linalg import (hermitian_eig, hermitianize, is_hermitian, is_psd, kron,
                     kron_all, min_eigpair, partial_trace, partial_transpose)
from .partitions import PartitionSpec, diameter, enumerate_partitions, parse_partition, refines
from .states import (DensityMatrix, EnsembleSample, SchmidtData, entropy_of_entanglement,
                     ghz, load_state, maximally_mixed, pure_dm, random_density,
                     random_ensemble, random_pure, save_state, schmidt, w_state,
                     wghz_family)
from .sep_oracle import (OracleResult, ProductState, certify_witness,
                         max_state_overlap, min_over_k_separable,
                         min_product_expectation)
from .witness_solver import (MeasureResult, SubproblemError, Witness, bsa,
                             compute_e_mn, negativity, robustness,
                             solve_witness_subproblem)
from .analysis import (TheoremReport, lemma1_check, schmidt_rank_deficient_combo,
                       subspace_entanglement_scan, witness_support_form_check)

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "EnsembleSample", "MeasureResult", "OracleResult",
    "PartitionSpec", "ProductState", "SchmidtData", "SubproblemError",
    "TheoremReport", "Witness", "bsa", "certify_witness", "compute_e_mn",
    "diameter", "entropy_of_entanglement", "enumerate_partitions", "ghz",
    "hermitian_eig", "hermitianize", "is_hermitian", "is_psd", "kron",
    "kron_all", "lemma1_check", "load_state", "max_state_overlap",
    "maximally_mixed", "min_eigpair", "min_over_k_separable",
    "min_product_expectation", "negativity", "parse_partition",
    "partial_trace", "partial_transpose", "pure_dm", "random_density",
    "random_ensemble", "random_pure", "refines", "robustness", "save_state",
    "schmidt", "schmidt_rank_deficient_combo", "solve_witness_subproblem",
    "subspace_entanglement_scan", "w_state", "wghz_family",
    "witness_support_form_check",
]
