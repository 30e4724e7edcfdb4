//! Fixtures shared by the pipeline benchmarks.

use eulerfan::convexint::StateSegment;
use eulerfan::riemann1d::ReducedState;
use eulerfan::weakform::{PiecewiseFan, TestFunction};
use eulerfan::FanSubsolutionCandidate;

/// Left and right states joined by a single 1-rarefaction for `p = ρ²`.
pub fn compression_states() -> (ReducedState, ReducedState) {
    (
        ReducedState::new(4.0, -1.0, 0.0).expect("valid state"),
        ReducedState::new(1.0, -0.25, 2.0 * 2f64.sqrt()).expect("valid state"),
    )
}

pub fn reference_segment() -> StateSegment {
    StateSegment::new([1.0, 0.0], [0.0, 1.0], 0.1, 1.0).expect("valid segment")
}

pub fn exact_fan() -> FanSubsolutionCandidate<f64> {
    eulerfan::fanalgebra::find_exact_solution().to_f64()
}

/// Fan built from the explicit solution together with `count` tests straddling its interfaces.
pub fn fan_with_tests(count: usize) -> (PiecewiseFan, Vec<TestFunction>) {
    let fan = PiecewiseFan::from_candidate(exact_fan()).expect("valid fan");
    let tests = TestFunction::straddling(fan.partition.speeds(), count, 7, true);
    (fan, tests)
}
