use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::features::Hypothesis;
use super::loss::LossSpec;
use super::sample::{LabelledSample, Matrix, UnlabelledSample};
use crate::error::{Error, Result};
use crate::par::{batched, derive_seed, stream_rng, Execution, Moments};

/// Batch length for Monte Carlo loops; fixed so results do not depend on thread count.
pub(crate) const MC_BATCH: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputLaw {
    /// Independent coordinates uniform on `[low, high)`.
    UniformBox { low: f64, high: f64 },
    IsotropicGaussian { sd: f64 },
    /// Equal-weight mixture of isotropic gaussians.
    GaussianMixture { means: Vec<Vec<f64>>, sd: f64 },
}

impl InputLaw {
    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            InputLaw::UniformBox { low, high } => {
                if !(low < high) || !low.is_finite() || !high.is_finite() {
                    return Err(Error::invalid("input_law", "uniform box needs finite low < high"));
                }
            }
            InputLaw::IsotropicGaussian { sd } => check_sd(*sd)?,
            InputLaw::GaussianMixture { means, sd } => {
                check_sd(*sd)?;
                if means.is_empty() {
                    return Err(Error::Empty("mixture means"));
                }
                if let Some(bad) = means.iter().find(|c| c.len() != dim) {
                    return Err(Error::DimensionMismatch {
                        context: "mixture mean",
                        expected: dim,
                        found: bad.len(),
                    });
                }
            }
        }
        Ok(())
    }

    fn draw_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        match self {
            InputLaw::UniformBox { low, high } => {
                for v in out.iter_mut() {
                    *v = rng.random_range(*low..*high);
                }
            }
            InputLaw::IsotropicGaussian { sd } => {
                for v in out.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *v = sd * z;
                }
            }
            InputLaw::GaussianMixture { means, sd } => {
                let c = &means[rng.random_range(0..means.len())];
                for (v, mu) in out.iter_mut().zip(c) {
                    let z: f64 = StandardNormal.sample(rng);
                    *v = mu + sd * z;
                }
            }
        }
    }
}

fn check_sd(sd: f64) -> Result<()> {
    if sd > 0.0 && sd.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("sd", format!("must be positive and finite, got {sd}")))
    }
}

/// Teacher-student data source: `y = teacher(x) + N(0, label_noise_sd²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticTask {
    pub teacher: Hypothesis,
    pub input_law: InputLaw,
    pub label_noise_sd: f64,
    pub seed: u64,
}

// Stream counters under the task seed.
const LABELLED_STREAM: u64 = 0;
const UNLABELLED_STREAM: u64 = 1;

impl SyntheticTask {
    pub fn new(teacher: Hypothesis, input_law: InputLaw, label_noise_sd: f64, seed: u64) -> Result<Self> {
        let task = SyntheticTask {
            teacher,
            input_law,
            label_noise_sd,
            seed,
        };
        task.validate()?;
        Ok(task)
    }

    pub fn validate(&self) -> Result<()> {
        self.teacher.feature_map().validate()?;
        self.input_law.validate(self.input_dim())?;
        if !(self.label_noise_sd >= 0.0 && self.label_noise_sd.is_finite()) {
            return Err(Error::invalid("label_noise_sd", "must be nonnegative and finite"));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.teacher.feature_map().input_dim()
    }

    /// Same law, different seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        SyntheticTask { seed, ..self.clone() }
    }

    /// `n` i.i.d. inputs drawn from a generator keyed by `seed`.
    pub fn draw_inputs(&self, n: usize, seed: u64) -> Matrix {
        self.draw_inputs_rng(&mut stream_rng(seed, 0), n)
    }

    pub(crate) fn draw_inputs_rng(&self, rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let d = self.input_dim();
        let mut data = vec![0.0; n * d];
        for row in data.chunks_exact_mut(d) {
            self.input_law.draw_into(rng, row);
        }
        Matrix::from_flat(n, d, data).expect("shape is consistent")
    }

    fn draw_pairs(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<(Matrix, Vec<f64>)> {
        let d = self.input_dim();
        let noise = if self.label_noise_sd > 0.0 {
            Some(Normal::new(0.0, self.label_noise_sd).map_err(|e| Error::invalid("label_noise_sd", e.to_string()))?)
        } else {
            None
        };
        let mut data = vec![0.0; n * d];
        let mut targets = Vec::with_capacity(n);
        let mut phi = Vec::new();
        for row in data.chunks_exact_mut(d) {
            self.input_law.draw_into(rng, row);
            self.teacher.feature_map().map_into(row, &mut phi)?;
            let mut y = self.teacher.predict_features(&phi);
            if let Some(n) = &noise {
                y += n.sample(rng);
            }
            targets.push(y);
        }
        Ok((Matrix::from_flat(n, d, data)?, targets))
    }

    pub fn generate_labelled(&self, m: usize) -> Result<LabelledSample> {
        crate::error::ensure_sample_size(m)?;
        self.validate()?;
        let mut rng = stream_rng(derive_seed(self.seed, LABELLED_STREAM), 0);
        let (inputs, targets) = self.draw_pairs(&mut rng, m)?;
        LabelledSample::new(inputs, targets, format!("synthetic:{}:labelled:{m}", self.seed))
    }

    pub fn generate_unlabelled(&self, m: usize) -> Result<UnlabelledSample> {
        crate::error::ensure_sample_size(m)?;
        self.validate()?;
        let inputs = self.draw_inputs(m, derive_seed(self.seed, UNLABELLED_STREAM));
        UnlabelledSample::new(inputs, format!("synthetic:{}:unlabelled:{m}", self.seed))
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub n: u64,
}

impl McEstimate {
    pub(crate) fn from_moments(m: &Moments) -> Self {
        McEstimate {
            value: m.mean,
            standard_error: m.standard_error(),
            n: m.n,
        }
    }
}

/// `(1/m) Σ loss(f(x_i), y_i)`.
pub fn empirical_error(h: &Hypothesis, s: &LabelledSample, spec: &LossSpec) -> Result<f64> {
    let phi = h.feature_map().feature_matrix(s.inputs())?;
    Ok(empirical_error_features(h.weights(), &phi, s.targets(), spec))
}

pub(crate) fn empirical_error_features(w: &[f64], phi: &Matrix, targets: &[f64], spec: &LossSpec) -> f64 {
    let total: f64 = phi
        .iter_rows()
        .zip(targets)
        .map(|(x, &y)| spec.value(crate::norms::dot(w, x), y))
        .sum();
    total / targets.len() as f64
}

/// Risk `err(f)` estimated on `n_mc` fresh labelled draws from `task`.
pub fn true_error_mc(
    h: &Hypothesis,
    task: &SyntheticTask,
    spec: &LossSpec,
    n_mc: usize,
    seed: u64,
) -> Result<McEstimate> {
    true_error_mc_with(h, task, spec, n_mc, seed, Execution::default())
}

pub fn true_error_mc_with(
    h: &Hypothesis,
    task: &SyntheticTask,
    spec: &LossSpec,
    n_mc: usize,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    if n_mc == 0 {
        return Err(Error::invalid("n_mc", "must be at least 1"));
    }
    task.validate()?;
    if h.feature_map().input_dim() != task.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "hypothesis vs task input",
            expected: task.input_dim(),
            found: h.feature_map().input_dim(),
        });
    }
    let parts = batched(n_mc, MC_BATCH, seed, exec, |rng, len| -> Result<Moments> {
        let (x, y) = task.draw_pairs(rng, len)?;
        let phi = h.feature_map().feature_matrix(&x)?;
        let mut m = Moments::default();
        for (row, &t) in phi.iter_rows().zip(&y) {
            m.push(spec.value(h.predict_features(row), t));
        }
        Ok(m)
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(McEstimate::from_moments(&Moments::merged(&parts)))
}
