//! The algebraic system characterizing admissible three-region fan subsolutions.

mod constraints;
mod exact;
mod reduced;
mod search;

pub use constraints::{
    evaluate_constraints, evaluate_constraints_with_tol, ConstraintReport, NamedValue, Verdict, DEFAULT_TOL,
    EQUALITY_NAMES, SLACK_NAMES,
};
pub use exact::{admissible_c1_interval, explicit_family, find_exact_solution, C1Interval, ExplicitFamily};
pub use reduced::{compression_data, reduced_residuals, ReducedResiduals};
pub use search::{search_feasible, FixedData, SearchOptions, SearchOutcome};
