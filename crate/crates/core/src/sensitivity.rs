//! Approximation sensitivity `D^p(f) = E[|f(x) - Af(x)|^p]^{1/p}` and its estimators.
//!
//! For a generalized-linear `f_w` the pointwise gap is `⟨w - Q(w), Φ(x)⟩`, so
//! every estimator here works from the weight residual and the feature matrix.

use serde::{Deserialize, Serialize};

use crate::bounds::Term;
use crate::error::{ensure_delta, ensure_sample_size, Error, Result};
use crate::model::{ApproxOperator, Hypothesis, Matrix, SyntheticTask, UnlabelledSample, MC_BATCH};
use crate::norms::{dot, l2, power_mean};
use crate::par::{batched, derive_seed, map_indexed, Execution, Moments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Empirical,
    MonteCarloTrue,
    AnalyticUpper,
    ExpectedStochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityEstimate {
    pub p: f64,
    pub value: f64,
    pub kind: EstimateKind,
    /// Sample id, or the seed used for Monte Carlo draws.
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_error: Option<f64>,
}

/// `ε_u` with its constituent terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationBound {
    pub epsilon_u: f64,
    pub components: Vec<Term>,
    pub delta: f64,
    pub c: f64,
    pub m: usize,
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("must be a finite value >= 1, got {p}")))
    }
}

/// `|⟨r, Φ(x_k)⟩|` for each row of the feature matrix.
pub fn pointwise_gaps(residual: &[f64], phi: &Matrix) -> Vec<f64> {
    phi.iter_rows().map(|x| dot(residual, x).abs()).collect()
}

/// Empirical sensitivity from a precomputed residual and feature matrix.
pub fn empirical_from_features(residual: &[f64], phi: &Matrix, p: f64) -> f64 {
    power_mean(&pointwise_gaps(residual, phi), p)
}

fn deterministic_residual(h: &Hypothesis, op: &ApproxOperator) -> Result<Vec<f64>> {
    if !op.is_deterministic() {
        return Err(Error::StochasticOperator);
    }
    op.residual(h.weights(), None)
}

/// `D̂^p(f) = ((1/m) Σ |f(x_k) - Af(x_k)|^p)^{1/p}` on an unlabelled sample.
pub fn empirical_sensitivity(
    h: &Hypothesis,
    op: &ApproxOperator,
    s: &UnlabelledSample,
    p: f64,
) -> Result<SensitivityEstimate> {
    check_p(p)?;
    let r = deterministic_residual(h, op)?;
    let phi = h.feature_map().feature_matrix(s.inputs())?;
    Ok(SensitivityEstimate {
        p,
        value: empirical_from_features(&r, &phi, p),
        kind: EstimateKind::Empirical,
        provenance: s.source_id.clone(),
        standard_error: None,
    })
}

/// Monte Carlo estimate of the true sensitivity over fresh draws from the task's input law.
///
/// The standard error is propagated through `t ↦ t^{1/p}` by the delta method.
pub fn true_sensitivity_mc(
    h: &Hypothesis,
    op: &ApproxOperator,
    task: &SyntheticTask,
    p: f64,
    n_mc: usize,
    seed: u64,
) -> Result<SensitivityEstimate> {
    true_sensitivity_mc_with(h, op, task, p, n_mc, seed, Execution::default())
}

pub fn true_sensitivity_mc_with(
    h: &Hypothesis,
    op: &ApproxOperator,
    task: &SyntheticTask,
    p: f64,
    n_mc: usize,
    seed: u64,
    exec: Execution,
) -> Result<SensitivityEstimate> {
    check_p(p)?;
    if n_mc == 0 {
        return Err(Error::invalid("n_mc", "must be at least 1"));
    }
    let r = deterministic_residual(h, op)?;
    let fm = h.feature_map();
    if fm.input_dim() != task.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "hypothesis vs task input",
            expected: task.input_dim(),
            found: fm.input_dim(),
        });
    }
    let moments = batched(n_mc, MC_BATCH, seed, exec, |rng, len| -> Result<Moments> {
        let phi = fm.feature_matrix(&task.draw_inputs_rng(rng, len))?;
        let mut m = Moments::default();
        for row in phi.iter_rows() {
            m.push(dot(&r, row).abs().powf(p));
        }
        Ok(m)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mom = Moments::merged(&moments);
    let value = mom.mean.powf(1.0 / p);
    let se = if mom.mean > 0.0 {
        mom.standard_error() * mom.mean.powf(1.0 / p - 1.0) / p
    } else {
        0.0
    };
    Ok(SensitivityEstimate {
        p,
        value,
        kind: EstimateKind::MonteCarloTrue,
        provenance: format!("mc:seed={seed}:n={n_mc}"),
        standard_error: Some(se),
    })
}

fn deviation_confidence_checks(c: f64, m: usize, delta: f64) -> Result<()> {
    ensure_delta(delta)?;
    ensure_sample_size(m)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", format!("uniform sensitivity bound must be positive, got {c}")));
    }
    Ok(())
}

/// `ε_u = 2 R̂ + 3 C √(ln(2/δ) / 2m)`: uniform gap between true and empirical sensitivity.
pub fn sensitivity_deviation_bound(rad: f64, c: f64, m: usize, delta: f64) -> Result<DeviationBound> {
    deviation_confidence_checks(c, m, delta)?;
    if !(rad >= 0.0) {
        return Err(Error::invalid("rad", "must be nonnegative"));
    }
    let components = vec![
        Term::new("rademacher_term", 2.0 * rad),
        Term::new("confidence_term", 3.0 * c * ((2.0 / delta).ln() / (2.0 * m as f64)).sqrt()),
    ];
    Ok(DeviationBound {
        epsilon_u: components.iter().map(|t| t.value).sum(),
        components,
        delta,
        c,
        m,
    })
}

/// Fast-rate variant for classes with uniformly small second-moment sensitivity `t`:
/// `6 R̂ + t √(2 ln(1/δ) / m) + 6 C ln(1/δ) / m`.
pub fn fast_rate_deviation_bound(rad: f64, t: f64, c: f64, m: usize, delta: f64) -> Result<DeviationBound> {
    deviation_confidence_checks(c, m, delta)?;
    if !(rad >= 0.0) || !(t >= 0.0) {
        return Err(Error::invalid("rad", "rad and t must be nonnegative"));
    }
    let l = (1.0 / delta).ln();
    let mf = m as f64;
    let components = vec![
        Term::new("rademacher_term", 6.0 * rad),
        Term::new("variance_term", t * (2.0 * l / mf).sqrt()),
        Term::new("range_term", 6.0 * c * l / mf),
    ];
    Ok(DeviationBound {
        epsilon_u: components.iter().map(|t| t.value).sum(),
        components,
        delta,
        c,
        m,
    })
}

/// `‖w - Q(w)‖₂ · budget`, an upper bound on `D¹(f)` whenever `budget` bounds the mean feature norm.
pub fn analytic_sensitivity_upper(
    h: &Hypothesis,
    op: &ApproxOperator,
    input_norm_budget: f64,
) -> Result<SensitivityEstimate> {
    if !(input_norm_budget >= 0.0 && input_norm_budget.is_finite()) {
        return Err(Error::invalid("input_norm_budget", "must be nonnegative and finite"));
    }
    let r = deterministic_residual(h, op)?;
    Ok(SensitivityEstimate {
        p: 1.0,
        value: l2(&r) * input_norm_budget,
        kind: EstimateKind::AnalyticUpper,
        provenance: format!("budget={input_norm_budget}"),
        standard_error: None,
    })
}

fn check_stochastic(op: &ApproxOperator, n_omega: usize) -> Result<()> {
    if op.is_deterministic() {
        return Err(Error::DeterministicOperator);
    }
    if n_omega == 0 {
        return Err(Error::invalid("n_omega", "must be at least 1"));
    }
    Ok(())
}

/// `E_ω D̂^p_ω(f)` over `n_omega` operator draws; draw `i` uses noise seed `derive_seed(seed, i)`.
pub fn expected_sensitivity(
    h: &Hypothesis,
    op: &ApproxOperator,
    s: &UnlabelledSample,
    p: f64,
    n_omega: usize,
    seed: u64,
) -> Result<SensitivityEstimate> {
    check_p(p)?;
    check_stochastic(op, n_omega)?;
    let phi = h.feature_map().feature_matrix(s.inputs())?;
    let values = map_indexed(n_omega, Execution::default(), |i| -> Result<f64> {
        let r = op.residual(h.weights(), Some(derive_seed(seed, i as u64)))?;
        Ok(empirical_from_features(&r, &phi, p))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mom = Moments::from_values(&values);
    Ok(SensitivityEstimate {
        p,
        value: mom.mean,
        kind: EstimateKind::ExpectedStochastic,
        provenance: format!("{}:omega_seed={seed}:n={n_omega}", s.source_id),
        standard_error: Some(mom.standard_error()),
    })
}

/// Capacity `C(f)` on the right of the variance condition `E_ω‖A_ω f - f‖² ≤ (α C(f))²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityFn {
    ConstantOne,
    WeightNorm,
}

impl CapacityFn {
    pub fn eval(&self, h: &Hypothesis) -> f64 {
        match self {
            CapacityFn::ConstantOne => 1.0,
            CapacityFn::WeightNorm => l2(h.weights()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCheck {
    /// Estimate of `E_ω (1/m) Σ |A_ω f(x) - f(x)|²`.
    pub lhs: f64,
    pub standard_error: f64,
    pub capacity: f64,
    /// `(α C(f))²`.
    pub threshold: f64,
    pub holds: bool,
}

/// Checks the variance condition for each hypothesis. Deterministic operators are evaluated once.
pub fn variance_condition_check(
    op: &ApproxOperator,
    hypotheses: &[Hypothesis],
    s: &UnlabelledSample,
    alpha: f64,
    capacity: CapacityFn,
    n_omega: usize,
    seed: u64,
) -> Result<Vec<VarianceCheck>> {
    if !(alpha >= 0.0) {
        return Err(Error::invalid("alpha", "must be nonnegative"));
    }
    if n_omega == 0 {
        return Err(Error::invalid("n_omega", "must be at least 1"));
    }
    let draws = if op.is_deterministic() { 1 } else { n_omega };
    hypotheses
        .iter()
        .enumerate()
        .map(|(j, h)| {
            let phi = h.feature_map().feature_matrix(s.inputs())?;
            let hseed = derive_seed(seed, j as u64);
            let values = map_indexed(draws, Execution::default(), |i| -> Result<f64> {
                let r = op.residual(h.weights(), Some(derive_seed(hseed, i as u64)))?;
                let g = pointwise_gaps(&r, &phi);
                Ok(g.iter().map(|v| v * v).sum::<f64>() / g.len() as f64)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let mom = Moments::from_values(&values);
            let cap = capacity.eval(h);
            let threshold = (alpha * cap).powi(2);
            Ok(VarianceCheck {
                lhs: mom.mean,
                standard_error: mom.standard_error(),
                capacity: cap,
                threshold,
                holds: mom.mean <= threshold,
            })
        })
        .collect()
}

/// Realized uniform bound `C = sup ‖w - Q(w)‖₂ · max_k ‖Φ(x_k)‖₂`.
pub fn uniform_sensitivity_bound(sup_residual_norm: f64, phi: &Matrix) -> f64 {
    let max_feature = phi.iter_rows().map(l2).fold(0.0, f64::max);
    sup_residual_norm * max_feature
}
