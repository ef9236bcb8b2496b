"""Exponential Bernstein operators on the unit hypercube.

Classical tensor-product Bernstein operators and their exponential
generalization, which reproduces e^(mu*sum(x)) and e^(2*mu*sum(x)) exactly,
interpolates at the hypercube corners, and converges uniformly with a
computable sup-norm error bound in terms of the modulus of continuity.
"""

from .analysis import (
    ConvergenceRecord,
    ConvergenceReport,
    ModulusEstimate,
    convergence_report,
    fit_rate,
    grid_modulus_source,
    korovkin_witness,
    modulus,
    modulus_subadditivity_check,
    quantitative_bound,
    tail_mass_bound_check,
    warp_gap_threshold,
)
from .basis import (
    BasisWeights,
    OperatorParams,
    bernstein_basis,
    bernstein_basis_matrix,
    bernstein_basis_row,
    exp_weight_matrix,
    exp_weights,
    first_moment,
    warp,
    warp_gap_closed,
    warp_gap_grid,
)
from .corpus import Corpus, CorpusEntry, builtin_corpus
from .estimators import ExponentialBernstein, as_scalar_field
from .tensor import (
    CLASSICAL,
    EXPONENTIAL,
    Grid,
    ScalarField,
    bernstein_apply_nd,
    centered_exp_sq_nd,
    closed_form_e0_nd,
    closed_form_exp3_nd,
    closed_form_exp4_nd,
    evaluate_on_grid,
    exp_bernstein_apply_nd,
    exp_bernstein_via_classical_nd,
    exp_power_product,
    sup_error,
)
from .univariate import (
    Function1D,
    bernstein_apply,
    centered_exp_sq,
    closed_form_e0,
    closed_form_exp3,
    closed_form_exp4,
    exp_bernstein_apply,
    exp_bernstein_via_classical,
    exp_power_function,
    voronovskaja_e0_check,
    voronovskaja_e0_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "BasisWeights",
    "CLASSICAL",
    "ConvergenceRecord",
    "ConvergenceReport",
    "Corpus",
    "CorpusEntry",
    "EXPONENTIAL",
    "ExponentialBernstein",
    "Function1D",
    "Grid",
    "ModulusEstimate",
    "OperatorParams",
    "ScalarField",
    "as_scalar_field",
    "bernstein_apply",
    "bernstein_apply_nd",
    "bernstein_basis",
    "bernstein_basis_matrix",
    "bernstein_basis_row",
    "builtin_corpus",
    "centered_exp_sq",
    "centered_exp_sq_nd",
    "closed_form_e0",
    "closed_form_e0_nd",
    "closed_form_exp3",
    "closed_form_exp3_nd",
    "closed_form_exp4",
    "closed_form_exp4_nd",
    "convergence_report",
    "evaluate_on_grid",
    "exp_bernstein_apply",
    "exp_bernstein_apply_nd",
    "exp_bernstein_via_classical",
    "exp_bernstein_via_classical_nd",
    "exp_power_function",
    "exp_power_product",
    "exp_weight_matrix",
    "exp_weights",
    "first_moment",
    "fit_rate",
    "grid_modulus_source",
    "korovkin_witness",
    "modulus",
    "modulus_subadditivity_check",
    "quantitative_bound",
    "sup_error",
    "tail_mass_bound_check",
    "voronovskaja_e0_check",
    "voronovskaja_e0_threshold",
    "warp",
    "warp_gap_closed",
    "warp_gap_grid",
    "warp_gap_threshold",
]
