//! Commutators, norm estimators, error-bound preconstants and the numerical
//! checks of the assumptions behind the vector-norm bounds.

mod assumption;
mod bounds;
pub mod commutators;
mod norms;
mod representation;
mod truncation;

pub use assumption::{
    apply_commutator, apply_double_commutator, check_exchange_bound, estimate_assumption_constants, exchange_xi_cap,
    sample_family, standard_sample_family, AssumptionConstants, ExchangeReport,
};
pub use bounds::{
    global_operator_bound, local_operator_bound, local_preconstants, vector_bound_report, vector_bound_step_cap,
    BoundInputs, BoundsReport, Preconstants, VectorBoundReport,
};
pub use norms::{
    commutator, estimate_operator_norm, nested_commutator, one_inf_norm_bound, operator_norm, operator_norm_exact,
    OperatorNorms, EXACT_NORM_MAX_N, MAX_POWER_ITERATIONS, OPERATOR_NORM_TOL,
};
pub use representation::{
    error_representation_convergence, verify_error_representation_g1, RepresentationCheck, REPRESENTATION_MAX_N,
    REPRESENTATION_REFERENCE_TOL,
};
pub use truncation::{fd_truncation_error, SmoothProfile, TruncationReport};
