//! Experiment harness: ensembles, theorem checks, redundancy sweep and the
//! method comparison. Every result is a pure function of its configuration
//! and seed.

pub mod compare;
pub mod config;
pub mod ensemble;
pub mod report;
pub mod stats;
pub mod suite;
pub mod sweep;
pub mod theorems;

pub use compare::{compare_methods, CompareReport, CompareRow, CompareSummary, Protocol, Timing};
pub use config::{CompareConfig, ExperimentsConfig, ProjectionCheck, StationaryChecks, SweepConfig, TrainingChecks};
pub use ensemble::{gen_stationary_ensemble, natural_crops, natural_image, nonstationary_fixture, EnsembleKind, EnsembleSpec};
pub use report::{Measurement, TheoremReport, TheoremRow};
pub use stats::{Estimate, Status};
pub use suite::{run_theorem_suite, TheoremSuite};
pub use sweep::{sweep_redundancy, SweepPoint, SweepResult, SweepRow};
pub use theorems::{
    check_projection, check_theorem1, check_theorem2, check_theorem3, check_theorem4, check_theorem5,
    check_theorems_3_4_5, noisy_pairs, random_bank, soft_threshold_bank,
};
