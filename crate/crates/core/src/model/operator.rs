use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::Hypothesis;
use crate::error::{Error, Result};

/// Weight transform `Q` defining the approximation `Af_w = ⟨Q(w), Φ(·)⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ApproxOperator {
    /// Clamp to `[-clamp, clamp]`, then round to the nearest multiple of `step`
    /// (exact midpoints go to the even multiple).
    UniformQuantizer { step: f64, clamp: f64 },
    /// Keep the `keep` largest-magnitude coordinates; equal magnitudes favour the lower index.
    MagnitudePruner { keep: usize },
    /// Clamp, then round to one of the two adjacent multiples of `step`, going up
    /// with probability equal to the fractional position (unbiased).
    StochasticRounder { step: f64, clamp: f64 },
}

impl ApproxOperator {
    pub fn validate(&self) -> Result<()> {
        match self {
            ApproxOperator::UniformQuantizer { step, clamp } | ApproxOperator::StochasticRounder { step, clamp } => {
                if !(*step > 0.0 && step.is_finite()) {
                    return Err(Error::invalid("step", format!("must be positive, got {step}")));
                }
                if !(*clamp > 0.0) {
                    return Err(Error::invalid("clamp", format!("must be positive, got {clamp}")));
                }
                Ok(())
            }
            ApproxOperator::MagnitudePruner { .. } => Ok(()),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, ApproxOperator::StochasticRounder { .. })
    }

    /// `Q(w)`. Stochastic kinds require `noise_seed`; deterministic kinds ignore it.
    pub fn transform(&self, w: &[f64], noise_seed: Option<u64>) -> Result<Vec<f64>> {
        self.validate()?;
        match self {
            ApproxOperator::UniformQuantizer { step, clamp } => {
                Ok(w.iter().map(|&x| quantize(x, *step, *clamp)).collect())
            }
            ApproxOperator::MagnitudePruner { keep } => {
                if *keep > w.len() {
                    return Err(Error::invalid(
                        "keep",
                        format!("keep-count {keep} exceeds dimension {}", w.len()),
                    ));
                }
                Ok(prune(w, *keep))
            }
            ApproxOperator::StochasticRounder { step, clamp } => {
                let seed = noise_seed.ok_or(Error::StochasticOperator)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(w.iter()
                    .map(|&x| stochastic_round(x, *step, *clamp, rng.random::<f64>()))
                    .collect())
            }
        }
    }

    /// `Q(w)` for deterministic kinds.
    pub fn transform_deterministic(&self, w: &[f64]) -> Result<Vec<f64>> {
        if !self.is_deterministic() {
            return Err(Error::StochasticOperator);
        }
        self.transform(w, None)
    }

    /// `w - Q(w)`.
    pub fn residual(&self, w: &[f64], noise_seed: Option<u64>) -> Result<Vec<f64>> {
        let q = self.transform(w, noise_seed)?;
        Ok(w.iter().zip(&q).map(|(a, b)| a - b).collect())
    }

    pub fn apply(&self, h: &Hypothesis, noise_seed: Option<u64>) -> Result<Hypothesis> {
        let q = self.transform(h.weights(), noise_seed)?;
        h.with_weights(q)
    }
}

pub(crate) fn quantize(x: f64, step: f64, clamp: f64) -> f64 {
    (x.clamp(-clamp, clamp) / step).round_ties_even() * step
}

pub(crate) fn stochastic_round(x: f64, step: f64, clamp: f64, u: f64) -> f64 {
    let scaled = x.clamp(-clamp, clamp) / step;
    let lo = scaled.floor();
    let frac = scaled - lo;
    if u < frac {
        (lo + 1.0) * step
    } else {
        lo * step
    }
}

fn prune(w: &[f64], keep: usize) -> Vec<f64> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    // stable sort: equal magnitudes keep index order
    order.sort_by(|&a, &b| w[b].abs().total_cmp(&w[a].abs()));
    let mut out = vec![0.0; w.len()];
    for &i in &order[..keep] {
        out[i] = w[i];
    }
    out
}
