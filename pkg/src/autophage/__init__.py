"""Tools for measures that equal the convolution of their own contracted images.

The core objects are characteristic-function models (Gaussian, symmetric
stable, word products, empirical clouds), contraction pairs acting on
them, and three ways to pin the fixed-point property down numerically:
grid residuals of the functional equation, tail-decay certificates with
density reconstruction, and exact total-variation checks on p-adic
quotient groups.
"""

from .charfn import (
    CharFnModel,
    Empirical,
    FullnessReport,
    Gaussian,
    GridSpec,
    SymStable,
    WordProduct,
    atom_mass_estimate,
    autophage_residual,
    default_points,
    eval_cf,
    fullness_check,
    semistable_residual,
    sphere_directions,
)
from .decay import (
    BoundCheck,
    DecayProfile,
    decay_profile,
    decay_rate,
    estimate_constant,
    integrability_estimate,
    inverse_adjoint_norms,
    solve_exponent,
    solve_exponent_many,
    verify_bound,
)
from .density import (
    BoundaryAliasingError,
    DensityReport,
    GridDensity,
    MassDefectError,
    NegativeRingingError,
    density_diagnostics,
    invert_to_density,
)
from .gaussian import (
    GaussianSpec,
    covariance_residual,
    gaussian_cofactor,
    stationary_covariance_space,
)
from .linops import (
    CommutationError,
    ContractionSystem,
    LinearMap,
    OperatorWord,
    SystemReport,
    commutation_tolerance,
    commutator_norm,
    enumerate_words,
    max_word_norm,
    operator_norm,
    pair_commutes,
    power_until_strict,
    spectral_radius,
    validate_system,
)
from .padic import (
    PAdicQuotient,
    QuotientMeasure,
    RadialMeasure,
    UnitModulusReport,
    apply_scaling,
    autophage_residual_padic,
    convolve,
    default_stable_exponent,
    padic_norm,
    padic_stable,
    padic_stable_radial,
    resolution_anchored_constant,
    scaling_resolution_loss,
    transform,
    tv_distance,
    unit_modulus_subgroup,
)
from .sampler import (
    InfinitesimalityProfile,
    SampleBatch,
    SeedDistribution,
    empirical_cf,
    infinitesimality_profile,
    tree_sample,
)

__version__ = "0.1.0"

__all__ = [
    "CharFnModel",
    "Empirical",
    "FullnessReport",
    "Gaussian",
    "GridSpec",
    "SymStable",
    "WordProduct",
    "atom_mass_estimate",
    "autophage_residual",
    "default_points",
    "eval_cf",
    "fullness_check",
    "semistable_residual",
    "sphere_directions",
    "BoundCheck",
    "DecayProfile",
    "decay_profile",
    "decay_rate",
    "estimate_constant",
    "integrability_estimate",
    "inverse_adjoint_norms",
    "solve_exponent",
    "solve_exponent_many",
    "verify_bound",
    "BoundaryAliasingError",
    "DensityReport",
    "GridDensity",
    "MassDefectError",
    "NegativeRingingError",
    "density_diagnostics",
    "invert_to_density",
    "GaussianSpec",
    "covariance_residual",
    "gaussian_cofactor",
    "stationary_covariance_space",
    "CommutationError",
    "ContractionSystem",
    "LinearMap",
    "OperatorWord",
    "SystemReport",
    "commutation_tolerance",
    "commutator_norm",
    "enumerate_words",
    "max_word_norm",
    "operator_norm",
    "pair_commutes",
    "power_until_strict",
    "spectral_radius",
    "validate_system",
    "PAdicQuotient",
    "QuotientMeasure",
    "RadialMeasure",
    "UnitModulusReport",
    "apply_scaling",
    "autophage_residual_padic",
    "convolve",
    "default_stable_exponent",
    "padic_norm",
    "padic_stable",
    "padic_stable_radial",
    "resolution_anchored_constant",
    "scaling_resolution_loss",
    "transform",
    "tv_distance",
    "unit_modulus_subgroup",
    "InfinitesimalityProfile",
    "SampleBatch",
    "SeedDistribution",
    "empirical_cf",
    "infinitesimality_profile",
    "tree_sample",
    "__version__",
]
