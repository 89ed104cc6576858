"""Randomized block Krylov estimation of extreme eigenvalues.

Estimates the largest or smallest eigenvalue of a symmetric matrix (or the
spectral norm of a rectangular one) from a handful of matrix products with a
random test block, together with computable a priori bounds on the relative
error and a reproducible experiment harness.
"""

from .bounds import (
    BoundReport,
    DepthRow,
    DepthThresholds,
    Partition,
    PartitionBounds,
    best_bound,
    depth_thresholds,
    expect_bound_gap,
    expect_bound_gapfree,
    prob_bound_gap,
    prob_bound_gapfree,
)
from .chebyshev import attenuation_delta, cheb_T, cheb_U, phi_poly, psi_poly
from .engine import (
    DepthSweep,
    EigEstimate,
    KrylovBasis,
    build_krylov_basis,
    estimate_max_eig,
    estimate_max_eig_from_block,
    estimate_min_eig,
    estimate_spectral_norm_sq,
    gaussian_test_matrix,
    max_eig_sweep,
    rayleigh_compress,
)
from .ensembles import (
    EnsembleSpec,
    ensure_spectrum,
    gapped_goe_spectrum,
    gapped_power_law_spectrum,
    goe_spectrum,
    laplacian_spectra,
    make_spectrum,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    InvariantViolation,
    TrialRecord,
    build_config,
    run_bound_check,
    run_burn_in,
    run_experiment,
    run_sample_paths,
    run_srank_profile,
)
from .operators import (
    DenseOperator,
    DiagonalOperator,
    GramOperator,
    MatrixOperator,
    NegatedOperator,
    gram_auto,
    load_matrix_market,
)
from .spectrum import (
    SpectralFeatures,
    Spectrum,
    affine_map,
    load_spectrum,
    relative_error,
    save_spectrum,
    spectral_features,
    spectral_gap,
    stable_rank,
)

__version__ = "0.1.0"
