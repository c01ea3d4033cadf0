//! Verification campaigns: region-conditioned Monte Carlo over optical
//! centers and path sweeps across the triangle toroids.
//!
//! Every campaign is a pure function of its inputs and seed. Trials run in
//! parallel, each with its own generator seeded from `seed ^ trial_index`,
//! and results are collected in trial order.

mod campaigns;
mod report;
mod sampling;
mod sweep;

use thiserror::Error;

use crate::geom::GeomError;
use crate::oracle::OracleError;
use crate::solver::SolveError;

pub use campaigns::{
    verify_crossing_theorems, verify_ground_truth, verify_lemma_suite, verify_oracle_equivalence,
    verify_outside_theorems, verify_sign_law, verify_theorem1, verify_theorem2, CrossingKind,
};
pub use report::{Outcome, SampleRecord, TheoremReport, TrialRecord};
pub use sampling::{
    random_triangle, sample_ball, sample_circumsphere, sample_outside_union, sample_toroid, synthesize_pose,
    trial_rng, TriangleKind,
};
pub use sweep::{
    counts_at, sweep_path, CountJump, CrossingEvent, Direction, PointCounts, SweepConfig, SweepResult, SweepRow,
    Verdict, DEFAULT_DELTA, MIN_STEPS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("sampling starved: {accepted} accepted after {attempts} attempts")]
    SamplingStarved { accepted: usize, attempts: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate path: {0}")]
    PathDegenerate(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
