//! Frequency and oracle checks of the library's guarantees.
//!
//! Each suite runs seeded trials and counts violations of one inequality or
//! equality. Trial `i` draws from `derive_seed(derive_seed(seed, 1), i)`; fixed
//! reference quantities (high-precision Monte Carlo tables) use `derive_seed(seed, 0)`.
//! Trials may run in parallel; aggregation is in trial order.

mod coverage;
mod geometry;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{derive_seed, map_indexed, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    EllipseExact,
    UnionExact,
    CrudeSandwich,
    ClusterDominance,
    KernelDominance,
    Lemma1,
    Prop2,
    Prop3,
    Prop4,
    Prop10,
    StochasticUnbiased,
    LearnerOracle,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::EllipseExact,
        Suite::UnionExact,
        Suite::CrudeSandwich,
        Suite::ClusterDominance,
        Suite::KernelDominance,
        Suite::Lemma1,
        Suite::Prop2,
        Suite::Prop3,
        Suite::Prop4,
        Suite::Prop10,
        Suite::StochasticUnbiased,
        Suite::LearnerOracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::EllipseExact => "ellipse_exact",
            Suite::UnionExact => "union_exact",
            Suite::CrudeSandwich => "crude_sandwich",
            Suite::ClusterDominance => "cluster_dominance",
            Suite::KernelDominance => "kernel_dominance",
            Suite::Lemma1 => "lemma1",
            Suite::Prop2 => "prop2",
            Suite::Prop3 => "prop3",
            Suite::Prop4 => "prop4",
            Suite::Prop10 => "prop10",
            Suite::StochasticUnbiased => "stochastic_unbiased",
            Suite::LearnerOracle => "learner_oracle",
        }
    }

    pub fn default_trials(&self) -> usize {
        match self {
            Suite::EllipseExact | Suite::UnionExact | Suite::KernelDominance => 100,
            Suite::CrudeSandwich => 100,
            Suite::ClusterDominance => 200,
            Suite::Lemma1 => 500,
            Suite::Prop2 | Suite::Prop3 | Suite::Prop4 => 200,
            Suite::Prop10 => 300,
            Suite::StochasticUnbiased => 2,
            Suite::LearnerOracle => 50,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_owned()))
    }
}

/// Outcome of a suite: how often the checked statement held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub suite: String,
    pub bound: String,
    pub trials: usize,
    pub violations: usize,
    /// `1 - violations / trials`.
    pub coverage: f64,
    /// Nominal probability of the statement (`1 - δ`, or 1 for deterministic identities).
    pub target: f64,
    /// Coverage needed to pass.
    pub required: f64,
    /// Mean of `bound - observed` (or `tolerance - |difference|`).
    pub mean_slack: f64,
    pub min_slack: f64,
    pub passed: bool,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// Shape of a suite before aggregation.
pub(crate) struct SuiteSpec {
    pub bound: &'static str,
    pub target: f64,
    pub required: f64,
    pub notes: Vec<String>,
}

impl SuiteSpec {
    pub fn exact(bound: &'static str) -> Self {
        SuiteSpec {
            bound,
            target: 1.0,
            required: 1.0,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Runs `trial(i, seed_i)` for every trial; each returns its slack (negative means violated).
pub(crate) fn run_trials<F>(
    suite: Suite,
    spec: SuiteSpec,
    trials: usize,
    seed: u64,
    exec: Execution,
    trial: F,
) -> Result<CoverageReport>
where
    F: Fn(usize, u64) -> Result<f64> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let base = derive_seed(seed, 1);
    let slacks = map_indexed(trials, exec, |i| trial(i, derive_seed(base, i as u64)))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let violations = slacks.iter().filter(|s| !(**s >= 0.0)).count();
    let coverage = 1.0 - violations as f64 / trials as f64;
    Ok(CoverageReport {
        suite: suite.name().to_owned(),
        bound: spec.bound.to_owned(),
        trials,
        violations,
        coverage,
        target: spec.target,
        required: spec.required,
        mean_slack: slacks.iter().sum::<f64>() / trials as f64,
        min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
        passed: coverage >= spec.required,
        seed,
        notes: spec.notes,
    })
}

/// Runs `suite` with `trials` trials (`None` selects the suite default).
pub fn run_suite(suite: Suite, trials: Option<usize>, seed: u64, exec: Execution) -> Result<CoverageReport> {
    let n = trials.unwrap_or_else(|| suite.default_trials());
    match suite {
        Suite::EllipseExact => geometry::ellipse_exact(n, seed, exec),
        Suite::UnionExact => geometry::union_exact(n, seed, exec),
        Suite::CrudeSandwich => geometry::crude_sandwich(n, seed, exec),
        Suite::ClusterDominance => geometry::cluster_dominance(n, seed, exec),
        Suite::KernelDominance => geometry::kernel_dominance(n, seed, exec),
        Suite::Lemma1 => coverage::lemma1(n, seed, exec),
        Suite::Prop2 => coverage::prop2(n, seed, exec),
        Suite::Prop3 => coverage::prop3(n, seed, exec),
        Suite::Prop4 => coverage::prop4(n, seed, exec),
        Suite::Prop10 => coverage::prop10(n, seed, exec),
        Suite::StochasticUnbiased => oracle::stochastic_unbiased(n, seed, exec),
        Suite::LearnerOracle => oracle::learner_oracle(n, seed, exec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(s.to_string(), s.name());
        }
        let err = "prop99".parse::<Suite>().unwrap_err();
        assert_eq!(err.code(), "unknown_suite");
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_suite(Suite::EllipseExact, Some(0), 1, Execution::Sequential).is_err());
    }

    #[test]
    fn aggregation_counts_negative_and_nan_slack() {
        let r = run_trials(Suite::EllipseExact, SuiteSpec::exact("x"), 4, 0, Execution::Sequential, |i, _| {
            Ok([1.0, -0.5, f64::NAN, 0.0][i])
        })
        .unwrap();
        assert_eq!(r.violations, 2);
        assert_eq!(r.coverage, 0.5);
        assert!(!r.passed);
    }
}
