//! Experiment configuration.
//!
//! Configs are JSON with an explicit `schema_version`; every object rejects
//! unknown keys. Relative paths inside a config resolve against the directory
//! holding the config file. All random streams derive from the top-level seed.

use std::fs;
use std::path::{Path, PathBuf};

use approx_sense::bounds::Quantity;
use approx_sense::learners::SearchDomain;
use approx_sense::model::{ApproxOperator, FeatureMap, InputLaw, LossSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

// Counters passed to `derive_seed(seed, _)`.
pub const TASK_STREAM: u64 = 0;
pub const DOMAIN_STREAM: u64 = 1;
pub const COMPLEXITY_STREAM: u64 = 2;
pub const TRUE_SENSITIVITY_STREAM: u64 = 3;
pub const OMEGA_STREAM: u64 = 4;
pub const RADEMACHER_STREAM: u64 = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    pub task: Option<TaskSpec>,
    pub operator: Option<ApproxOperator>,
    #[serde(default = "default_loss")]
    pub loss: LossSpec,
    /// Defaults to the identity on the input dimension.
    pub feature_map: Option<FeatureMap>,
    pub learner: Option<LearnerSpec>,
    /// The domain's own `seed` is replaced by one derived from the top-level seed.
    pub domain: Option<SearchDomain>,
    pub sensitivity: Option<SensitivitySpec>,
    #[serde(default)]
    pub bounds: Vec<BoundSpec>,
    pub trials: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub output_dir: Option<PathBuf>,
}

fn default_loss() -> LossSpec {
    LossSpec::absolute(1.0)
}

fn default_delta() -> f64 {
    0.05
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    Synthetic(SyntheticSpec),
    Csv(CsvSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Teacher weights in feature space.
    pub teacher: Vec<f64>,
    pub input_law: InputLaw,
    #[serde(default)]
    pub label_noise_sd: f64,
    pub m_labelled: usize,
    pub m_unlabelled: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSpec {
    pub labelled: PathBuf,
    /// Without it the labelled inputs double as the sensitivity sample.
    pub unlabelled: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case", deny_unknown_fields)]
pub enum LearnerSpec {
    ConstrainedErm {
        t: Option<f64>,
        #[serde(default = "one")]
        p: f64,
    },
    Srm {
        thresholds: Vec<f64>,
        weights: Option<Vec<f64>>,
        epsilon_u: f64,
        #[serde(default = "one")]
        p: f64,
        #[serde(default = "default_n_sigma")]
        n_sigma: usize,
    },
    SensitivityRegularized {
        regularizer: RegularizerSpec,
    },
    LambdaErm {
        lambda: f64,
        #[serde(default = "one")]
        p: f64,
    },
    AnalyticLambdaErm {
        lambda: f64,
        budget: f64,
    },
    LambdaGridSrm {
        lambdas: Vec<f64>,
        /// Defaults to `2^-k`.
        weights: Option<Vec<f64>>,
        #[serde(default = "one")]
        p: f64,
    },
}

fn default_n_sigma() -> usize {
    1000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleChoice {
    Unlabelled,
    Labelled,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegularizerSpec {
    Empirical {
        #[serde(default = "one")]
        p: f64,
        #[serde(default = "unlabelled")]
        sample: SampleChoice,
    },
    MonteCarloTrue {
        #[serde(default = "one")]
        p: f64,
        n_mc: usize,
    },
    Analytic {
        budget: f64,
    },
}

fn unlabelled() -> SampleChoice {
    SampleChoice::Unlabelled
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySpec {
    #[serde(default = "one")]
    pub p: f64,
    /// Weights of the hypothesis to evaluate.
    pub weights: Option<Vec<f64>>,
    /// Alternatively, a `train` output whose hypothesis is evaluated.
    pub train_output: Option<PathBuf>,
    /// Fresh draws for the true sensitivity (synthetic tasks only).
    pub n_mc: Option<usize>,
    /// Mean feature-norm budget for the analytic upper bound.
    pub budget: Option<f64>,
    /// Operator draws for stochastic operators.
    #[serde(default = "default_n_omega")]
    pub n_omega: usize,
}

fn default_n_omega() -> usize {
    64
}

/// A bound input: a number, an explicit quantity, or a JSON artifact written by
/// another subcommand (Rademacher estimate, sensitivity estimate or bound report).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Constituent {
    Value(f64),
    File {
        file: PathBuf,
    },
    Quantity(Quantity),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdEntry {
    pub t: f64,
    pub err_star: Constituent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelEntry {
    pub err_star: Constituent,
    pub rad: Constituent,
    pub w: f64,
}

/// Constituents are optional at parse time so a missing one can be named.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundSpec {
    UniformRestricted {
        emp_err: Option<Constituent>,
        rad_ht: Option<Constituent>,
        m: Option<usize>,
        delta: Option<f64>,
    },
    SrmUniform {
        emp_err: Option<Constituent>,
        rad_ht_k: Option<Constituent>,
        w_k: Option<f64>,
        m: Option<usize>,
        delta: Option<f64>,
    },
    Joint {
        min_approx_err: Option<Constituent>,
        err_f_star: Option<Constituent>,
        rad_ha: Option<Constituent>,
        t: Option<f64>,
        m: Option<usize>,
        delta: Option<f64>,
    },
    Regularized {
        err_star_t: Option<Vec<ThresholdEntry>>,
        rad_ha: Option<Constituent>,
        epsilon_u: Option<f64>,
        m: Option<usize>,
        delta: Option<f64>,
    },
    LambdaEquivalence {
        rad_ha: Option<Constituent>,
        lambda: Option<f64>,
        epsilon_u: Option<f64>,
        m: Option<usize>,
        delta: Option<f64>,
    },
    StochasticExpected {
        exp_emp_err: Option<Constituent>,
        exp_sensitivity: Option<Constituent>,
        exp_rad: Option<Constituent>,
        m: Option<usize>,
        delta: Option<f64>,
    },
    StochasticFixedOmega {
        emp_err: Option<Constituent>,
        sensitivity: Option<Constituent>,
        rad: Option<Constituent>,
        m: Option<usize>,
        delta: Option<f64>,
    },
    BalcanGuarantee {
        levels: Option<Vec<LevelEntry>>,
        m: Option<usize>,
        delta: Option<f64>,
    },
}

/// A parsed config together with the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| approx_sense::Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: ExperimentConfig = parse_json(&text, path)?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema {
                path: path.to_path_buf(),
                found: config.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig {
            config,
            dir,
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        resolve_against(&self.dir, p)
    }
}

pub fn resolve_against(dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

/// Deserializes with the failing field path and the line/column in the message.
pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let message = if field == "." {
            e.inner().to_string()
        } else {
            format!("field `{field}`: {}", e.inner())
        };
        CliError::Config {
            path: path.to_path_buf(),
            message,
        }
    })
}
