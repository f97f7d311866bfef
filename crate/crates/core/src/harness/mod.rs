//! Seeded problem generators, randomized verification suites, scaling
//! studies and closed-form oracles.

mod generate;
mod oracle;
mod scaling;
mod suite;

pub use generate::{
    clustered_spectrum, gen_problem, haar_unitary, random_partition, ProblemKind, ProblemSpec,
};
pub use oracle::{oracle_2x2_eig, Oracle2x2};
pub use scaling::{scaling_study, scaling_study_matrices, ScalingRow, ScalingTable, BOUNDED_SLOPE};
#[cfg(feature = "parallel")]
pub use suite::run_suite_parallel;
pub use suite::{
    run_suite, run_suite_sequential, trial_matrices, trial_problem, trial_seed, BoundTally,
    CheckFailure, CheckTally, Regime, SuiteConfig, SuiteReport, TrialFailure, Violation,
    CHECK_DOMINANCE, CHECK_ESIN, CHECK_GAP_PREDICTION, CHECK_GAUGE, CHECK_REDUCTION,
    DOMINANCE_TOLERANCE, ESIN_TOLERANCE, GAP_PREDICTION_TOLERANCE, GAUGE_TOLERANCE,
    REDUCTION_TOLERANCE,
};
