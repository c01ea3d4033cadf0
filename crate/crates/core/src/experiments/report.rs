use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::geom::{ControlTriangle, Vec3};

/// Sample lists keep this many records per outcome.
const SAMPLES_PER_CATEGORY: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Consistent,
    Violation,
    Exceptional,
}

impl Outcome {
    fn key(self) -> &'static str {
        match self {
            Outcome::Consistent => "consistent",
            Outcome::Violation => "violation",
            Outcome::Exceptional => "exceptional",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub trial: u64,
    pub point: Option<[f64; 3]>,
    pub detail: String,
}

/// The result of one trial, before aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub outcome: Outcome,
    /// Counters this trial increments.
    pub tallies: Vec<String>,
    pub point: Option<Vec3>,
    pub detail: String,
}

impl TrialRecord {
    pub fn new(outcome: Outcome, point: Option<Vec3>, detail: impl Into<String>) -> Self {
        TrialRecord {
            outcome,
            tallies: Vec::new(),
            point,
            detail: detail.into(),
        }
    }

    pub fn tally(mut self, key: impl Into<String>) -> Self {
        self.tallies.push(key.into());
        self
    }
}

/// Aggregated campaign outcome.
///
/// `wall_time` is not serialized, so reports of repeated runs compare equal
/// byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub triangle_sides: Option<[f64; 3]>,
    pub trials: u64,
    pub consistent: u64,
    pub violations: u64,
    pub exceptional: u64,
    pub tallies: BTreeMap<String, u64>,
    /// First few trials of each outcome, in trial order.
    pub samples: BTreeMap<String, Vec<SampleRecord>>,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl TheoremReport {
    pub fn from_trials(
        theorem_id: &str,
        tri: Option<&ControlTriangle>,
        seed: u64,
        records: Vec<TrialRecord>,
        wall_time: Duration,
    ) -> Self {
        let mut report = TheoremReport {
            theorem_id: theorem_id.to_string(),
            triangle_sides: tri.map(|t| t.sides()),
            trials: records.len() as u64,
            consistent: 0,
            violations: 0,
            exceptional: 0,
            tallies: BTreeMap::new(),
            samples: BTreeMap::new(),
            seed,
            wall_time,
        };
        for (i, rec) in records.into_iter().enumerate() {
            match rec.outcome {
                Outcome::Consistent => report.consistent += 1,
                Outcome::Violation => report.violations += 1,
                Outcome::Exceptional => report.exceptional += 1,
            }
            for key in rec.tallies {
                *report.tallies.entry(key).or_insert(0) += 1;
            }
            let list = report.samples.entry(rec.outcome.key().to_string()).or_default();
            if list.len() < SAMPLES_PER_CATEGORY {
                list.push(SampleRecord {
                    trial: i as u64,
                    point: rec.point.map(|p| [p.x, p.y, p.z]),
                    detail: rec.detail,
                });
            }
        }
        report
    }

    /// Merges reports of the same campaign run on different targets.
    pub fn merge(theorem_id: &str, parts: Vec<TheoremReport>) -> Self {
        let mut out = TheoremReport {
            theorem_id: theorem_id.to_string(),
            triangle_sides: parts.first().and_then(|p| p.triangle_sides),
            trials: 0,
            consistent: 0,
            violations: 0,
            exceptional: 0,
            tallies: BTreeMap::new(),
            samples: BTreeMap::new(),
            seed: parts.first().map_or(0, |p| p.seed),
            wall_time: Duration::ZERO,
        };
        for p in parts {
            out.trials += p.trials;
            out.consistent += p.consistent;
            out.violations += p.violations;
            out.exceptional += p.exceptional;
            out.wall_time += p.wall_time;
            for (k, v) in p.tallies {
                *out.tallies.entry(format!("{}/{}", p.theorem_id, k)).or_insert(0) += v;
            }
            for (k, v) in p.samples {
                let list = out.samples.entry(k).or_default();
                for s in v {
                    if list.len() < SAMPLES_PER_CATEGORY {
                        list.push(SampleRecord {
                            detail: format!("{}: {}", p.theorem_id, s.detail),
                            ..s
                        });
                    }
                }
            }
        }
        out
    }

    pub fn tally(&self, key: &str) -> u64 {
        self.tallies.get(key).copied().unwrap_or(0)
    }

    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: trials={} consistent={} violations={} exceptional={}",
            self.theorem_id, self.trials, self.consistent, self.violations, self.exceptional
        )
    }
}
