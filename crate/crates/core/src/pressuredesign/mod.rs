//! Parameters, pressure law and candidate for the `v± = (±1, 0)` family, where the
//! pressure is designed rather than fixed.
mod construct;
mod params;

pub use construct::{
    assemble_s6_candidate, construct_pressure, extremal_functionals, functionals, DesignOptions, DesignedPressure,
};
pub use params::{
    check_inequality_chain, find_parameters, left_energy_slack, left_energy_slack_original, scalar_threshold,
    ChainInequality, ChainLevel, ChainReport, ParameterOptions, S6Parameters,
};
