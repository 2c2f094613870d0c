use serde::{Deserialize, Serialize};

use super::search::{optimize, SearchDomain};
use crate::error::{Error, Result};
use crate::geometry::mc_rademacher_rows;
use crate::model::{
    empirical_error_features, ApproxOperator, FeatureMap, Hypothesis, LabelledSample, LossSpec, Matrix, SyntheticTask,
    UnlabelledSample,
};
use crate::norms::{dot, l2};
use crate::par::Execution;
use crate::sensitivity::{check_p, empirical_from_features, true_sensitivity_mc_with};

/// Shared ingredients of every learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSetup {
    pub feature_map: FeatureMap,
    pub op: ApproxOperator,
    pub loss: LossSpec,
    pub domain: SearchDomain,
    pub exec: Execution,
}

impl LearnerSetup {
    pub fn new(feature_map: FeatureMap, op: ApproxOperator, loss: LossSpec, domain: SearchDomain) -> Self {
        LearnerSetup {
            feature_map,
            op,
            loss,
            domain,
            exec: Execution::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        self.feature_map.validate()?;
        self.op.validate()?;
        self.loss.validate()?;
        self.domain.validate()?;
        if !self.op.is_deterministic() {
            return Err(Error::StochasticOperator);
        }
        if self.domain.dim != self.feature_map.feature_dim() {
            return Err(Error::DimensionMismatch {
                context: "search domain vs feature dimension",
                expected: self.feature_map.feature_dim(),
                found: self.domain.dim,
            });
        }
        Ok(())
    }

    fn q(&self, w: &[f64]) -> Vec<f64> {
        self.op.transform_deterministic(w).expect("validated operator and dimension")
    }

    fn residual(&self, w: &[f64]) -> Vec<f64> {
        let q = self.q(w);
        w.iter().zip(&q).map(|(a, b)| a - b).collect()
    }
}

/// How a learner picked its hyperparameter, when it has one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selection {
    Threshold {
        t: Option<f64>,
        p: f64,
    },
    Srm {
        /// 1-based index of `t_k̂(f)` for the returned predictor.
        chosen_k: usize,
        threshold: f64,
        /// The returned predictor lies above the last threshold and was assigned `K`.
        clamped: bool,
        /// Candidates whose sensitivity equals `t_k + ε_u` for their assigned `k`.
        boundary_hits: Option<usize>,
        penalties: Vec<f64>,
    },
    Regularized {
        variant: String,
        rho: f64,
    },
    Lambda {
        lambda: f64,
    },
    LambdaGrid {
        chosen_index: usize,
        lambda: f64,
        candidates: Vec<LambdaCandidate>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCandidate {
    pub lambda: f64,
    pub weight: f64,
    pub weights: Vec<f64>,
    pub approx_error: f64,
    pub penalty: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerOutput {
    pub algorithm: String,
    pub hypothesis: Hypothesis,
    pub approx_hypothesis: Hypothesis,
    pub objective_value: f64,
    pub objective_trace: Vec<f64>,
    pub selection: Selection,
    pub feasible: bool,
    /// `êrr(A f̂)` on the labelled sample.
    pub approx_error: f64,
    /// `D̂(f̂)` on the sensitivity sample, when one was used.
    pub empirical_sensitivity: Option<f64>,
}

/// Precomputed feature matrices.
struct Data<'a> {
    setup: &'a LearnerSetup,
    phi_l: Matrix,
    targets: &'a [f64],
    phi_u: Option<Matrix>,
}

impl<'a> Data<'a> {
    fn new(setup: &'a LearnerSetup, labelled: &'a LabelledSample, unlabelled: Option<&UnlabelledSample>) -> Result<Self> {
        setup.validate()?;
        Ok(Data {
            setup,
            phi_l: setup.feature_map.feature_matrix(labelled.inputs())?,
            targets: labelled.targets(),
            phi_u: unlabelled
                .map(|u| setup.feature_map.feature_matrix(u.inputs()))
                .transpose()?,
        })
    }

    fn m(&self) -> usize {
        self.targets.len()
    }

    fn error(&self, w: &[f64]) -> f64 {
        empirical_error_features(w, &self.phi_l, self.targets, &self.setup.loss)
    }

    fn approx_error(&self, w: &[f64]) -> f64 {
        self.error(&self.setup.q(w))
    }

    fn sensitivity(&self, w: &[f64], p: f64) -> f64 {
        let phi = self.phi_u.as_ref().expect("sensitivity sample present");
        empirical_from_features(&self.setup.residual(w), phi, p)
    }

    fn finish(
        &self,
        algorithm: &str,
        w: Vec<f64>,
        value: f64,
        trace: Vec<f64>,
        selection: Selection,
        sens_p: Option<f64>,
    ) -> Result<LearnerOutput> {
        let hypothesis = Hypothesis::new(w, self.setup.feature_map.clone())?;
        let approx_hypothesis = self.setup.op.apply(&hypothesis, None)?;
        Ok(LearnerOutput {
            algorithm: algorithm.to_owned(),
            approx_error: self.approx_error(hypothesis.weights()),
            empirical_sensitivity: sens_p.map(|p| self.sensitivity(hypothesis.weights(), p)),
            hypothesis,
            approx_hypothesis,
            objective_value: value,
            objective_trace: trace,
            selection,
            feasible: true,
        })
    }
}

/// `argmin êrr(Af)` over `{f : D̂^p(f) < t}`; `t = None` removes the constraint.
/// An empty feasible set yields [`Error::Infeasible`] carrying the smallest `D̂` found.
pub fn constrained_erm(
    labelled: &LabelledSample,
    unlabelled: &UnlabelledSample,
    t: Option<f64>,
    p: f64,
    setup: &LearnerSetup,
) -> Result<LearnerOutput> {
    check_p(p)?;
    if let Some(t) = t {
        if !(t > 0.0) {
            return Err(Error::invalid("t", "threshold must be positive"));
        }
    }
    let data = Data::new(setup, labelled, Some(unlabelled))?;
    let feasible = |w: &[f64]| t.is_none_or(|t| data.sensitivity(w, p) < t);
    let res = optimize(|w| data.approx_error(w), &setup.domain, Some(&feasible), setup.exec);
    match res {
        Ok(r) => data.finish("constrained_erm", r.weights, r.value, r.trace, Selection::Threshold { t, p }, Some(p)),
        Err(Error::Infeasible { .. }) => {
            let min = optimize(|w| data.sensitivity(w, p), &setup.domain, None, setup.exec)?;
            Err(Error::Infeasible {
                min_constraint: Some(min.value),
            })
        }
        Err(e) => Err(e),
    }
}

/// Increasing thresholds `t_k` with prior weights `w_k` (`Σ w_k <= 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSchedule {
    pub thresholds: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ThresholdSchedule {
    /// `weights = None` selects `w_k = 2^{-k}`, `k = 1, 2, …`.
    pub fn new(thresholds: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        let weights = weights.unwrap_or_else(|| (1..=thresholds.len()).map(|k| 0.5f64.powi(k as i32)).collect());
        let s = ThresholdSchedule { thresholds, weights };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() {
            return Err(Error::Empty("threshold schedule"));
        }
        if self.weights.len() != self.thresholds.len() {
            return Err(Error::DimensionMismatch {
                context: "schedule weights",
                expected: self.thresholds.len(),
                found: self.weights.len(),
            });
        }
        if !(self.thresholds[0] > 0.0) || self.thresholds.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::invalid("thresholds", "must be positive and strictly increasing"));
        }
        check_weights(&self.weights)
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// 0-based `k̂ = min{k : d <= t_k + ε_u}`, clamped to the last index; the flag marks clamping.
    pub fn assign(&self, d: f64, epsilon_u: f64) -> (usize, bool) {
        match self.thresholds.iter().position(|&t| d <= t + epsilon_u) {
            Some(k) => (k, false),
            None => (self.thresholds.len() - 1, true),
        }
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
        return Err(Error::invalid("weights", "each weight must lie in (0, 1]"));
    }
    if w.iter().sum::<f64>() > 1.0 {
        return Err(Error::invalid("weights", "weights must sum to at most 1"));
    }
    Ok(())
}

/// `3 √(ln(1/w) / 2m)`.
pub fn weight_penalty(w: f64, m: usize) -> f64 {
    3.0 * ((1.0 / w).ln() / (2.0 * m as f64)).sqrt()
}

/// Empirical Rademacher complexity of the sensitivity-restricted class `Ĥ_τ`.
pub trait ClassComplexity: Sync {
    fn rademacher(&self, threshold: f64) -> Result<f64>;
}

/// Monte Carlo complexity of the grid hypotheses with `D̂ <= τ`, restricted to the labelled inputs.
pub struct GridRestrictedComplexity {
    predictions: Matrix,
    sensitivities: Vec<f64>,
    n_sigma: usize,
    seed: u64,
    exec: Execution,
}

impl GridRestrictedComplexity {
    pub fn new(
        setup: &LearnerSetup,
        labelled: &LabelledSample,
        unlabelled: &UnlabelledSample,
        p: f64,
        n_sigma: usize,
        seed: u64,
    ) -> Result<Self> {
        check_p(p)?;
        let data = Data::new(setup, labelled, Some(unlabelled))?;
        let cands = setup
            .domain
            .candidates()
            .ok_or_else(|| Error::invalid("domain", "restricted complexity needs an enumerable domain"))?;
        let mut preds = Vec::with_capacity(cands.len() * data.m());
        let mut sens = Vec::with_capacity(cands.len());
        for w in &cands {
            preds.extend(data.phi_l.iter_rows().map(|x| dot(w, x)));
            sens.push(data.sensitivity(w, p));
        }
        Ok(GridRestrictedComplexity {
            predictions: Matrix::from_flat(cands.len(), data.m(), preds)?,
            sensitivities: sens,
            n_sigma,
            seed,
            exec: setup.exec,
        })
    }
}

impl ClassComplexity for GridRestrictedComplexity {
    fn rademacher(&self, threshold: f64) -> Result<f64> {
        let rows: Vec<Vec<f64>> = self
            .sensitivities
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= threshold)
            .map(|(i, _)| self.predictions.row(i).to_vec())
            .collect();
        if rows.is_empty() {
            return Ok(0.0);
        }
        Ok(mc_rademacher_rows(&Matrix::from_rows(&rows)?, self.n_sigma, self.seed, self.exec)?.value)
    }
}

/// Structural risk minimization over sensitivity thresholds:
/// `argmin êrr(f) + 2ρ R̂(Ĥ_{t_k̂(f)+ε_u}) + 3√(ln(1/w_k̂(f)) / 2m)`.
#[allow(clippy::too_many_arguments)]
pub fn srm_learner(
    labelled: &LabelledSample,
    unlabelled: &UnlabelledSample,
    schedule: &ThresholdSchedule,
    epsilon_u: f64,
    p: f64,
    complexity: &dyn ClassComplexity,
    setup: &LearnerSetup,
) -> Result<LearnerOutput> {
    check_p(p)?;
    schedule.validate()?;
    if !(epsilon_u >= 0.0) {
        return Err(Error::invalid("epsilon_u", "must be nonnegative"));
    }
    let data = Data::new(setup, labelled, Some(unlabelled))?;
    let rho = setup.loss.rho();
    let m = data.m();
    let penalties = schedule
        .thresholds
        .iter()
        .zip(&schedule.weights)
        .map(|(&t, &w)| Ok(2.0 * rho * complexity.rademacher(t + epsilon_u)? + weight_penalty(w, m)))
        .collect::<Result<Vec<f64>>>()?;
    let objective = |w: &[f64]| {
        let (k, _) = schedule.assign(data.sensitivity(w, p), epsilon_u);
        data.error(w) + penalties[k]
    };
    let r = optimize(objective, &setup.domain, None, setup.exec)?;
    let d = data.sensitivity(&r.weights, p);
    let (k, clamped) = schedule.assign(d, epsilon_u);
    let boundary_hits = setup.domain.candidates().map(|cands| {
        cands
            .iter()
            .filter(|w| {
                let d = data.sensitivity(w, p);
                let (k, clamped) = schedule.assign(d, epsilon_u);
                !clamped && d == schedule.thresholds[k] + epsilon_u
            })
            .count()
    });
    let selection = Selection::Srm {
        chosen_k: k + 1,
        threshold: schedule.thresholds[k],
        clamped,
        boundary_hits,
        penalties,
    };
    data.finish("srm", r.weights, r.value, r.trace, selection, Some(p))
}

/// Sensitivity term of the regularized objective.
#[derive(Debug, Clone, Copy)]
pub enum SensitivityFn<'a> {
    /// Monte Carlo estimate of the true `D^p` with common random numbers across candidates.
    MonteCarloTrue {
        task: &'a SyntheticTask,
        p: f64,
        n_mc: usize,
        seed: u64,
    },
    /// `D̂^p` on a sample (which may be the labelled inputs themselves).
    Empirical { sample: &'a UnlabelledSample, p: f64 },
    /// `‖w - Q(w)‖₂ · budget`.
    Analytic { budget: f64 },
}

impl SensitivityFn<'_> {
    fn name(&self) -> &'static str {
        match self {
            SensitivityFn::MonteCarloTrue { .. } => "monte_carlo_true",
            SensitivityFn::Empirical { .. } => "empirical",
            SensitivityFn::Analytic { .. } => "analytic",
        }
    }
}

fn regularized(
    algorithm: &str,
    labelled: &LabelledSample,
    sens: SensitivityFn<'_>,
    weight: f64,
    selection: Selection,
    setup: &LearnerSetup,
) -> Result<LearnerOutput> {
    if !(weight >= 0.0 && weight.is_finite()) {
        return Err(Error::invalid("lambda", "regularization weight must be nonnegative"));
    }
    let (unl, p) = match sens {
        SensitivityFn::Empirical { sample, p } => (Some(sample), Some(p)),
        _ => (None, None),
    };
    if let Some(p) = p {
        check_p(p)?;
    }
    let data = Data::new(setup, labelled, unl)?;
    let penalty = |w: &[f64]| -> Result<f64> {
        Ok(match sens {
            SensitivityFn::Empirical { p, .. } => data.sensitivity(w, p),
            SensitivityFn::Analytic { budget } => l2(&setup.residual(w)) * budget,
            SensitivityFn::MonteCarloTrue { task, p, n_mc, seed } => {
                let h = Hypothesis::new(w.to_vec(), setup.feature_map.clone())?;
                true_sensitivity_mc_with(&h, &setup.op, task, p, n_mc, seed, Execution::Sequential)?.value
            }
        })
    };
    if let SensitivityFn::Analytic { budget } = sens {
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(Error::invalid("budget", "must be nonnegative"));
        }
    }
    // surface configuration errors (e.g. task dimension) before searching
    penalty(&vec![0.0; setup.domain.dim])?;
    let objective = |w: &[f64]| data.approx_error(w) + weight * penalty(w).unwrap_or(f64::NAN);
    let r = optimize(objective, &setup.domain, None, setup.exec)?;
    data.finish(algorithm, r.weights, r.value, r.trace, selection, p)
}

/// `argmin êrr(Af) + ρ S(f)` with `ρ` the loss's Lipschitz constant.
pub fn sensitivity_regularized_erm(
    labelled: &LabelledSample,
    sensitivity: SensitivityFn<'_>,
    setup: &LearnerSetup,
) -> Result<LearnerOutput> {
    let rho = setup.loss.rho();
    let selection = Selection::Regularized {
        variant: sensitivity.name().to_owned(),
        rho,
    };
    regularized("sensitivity_regularized_erm", labelled, sensitivity, rho, selection, setup)
}

/// `f̃_λ = argmin êrr(Af) + λ D̂^p(f)`.
pub fn lambda_erm(
    labelled: &LabelledSample,
    unlabelled: &UnlabelledSample,
    lambda: f64,
    p: f64,
    setup: &LearnerSetup,
) -> Result<LearnerOutput> {
    let sens = SensitivityFn::Empirical { sample: unlabelled, p };
    regularized("lambda_erm", labelled, sens, lambda, Selection::Lambda { lambda }, setup)
}

/// `f̄_λ = argmin êrr(Af) + λ ‖w - Q(w)‖₂ · budget`; needs no unlabelled data.
pub fn analytic_lambda_erm(
    labelled: &LabelledSample,
    lambda: f64,
    budget: f64,
    setup: &LearnerSetup,
) -> Result<LearnerOutput> {
    let sens = SensitivityFn::Analytic { budget };
    regularized("analytic_lambda_erm", labelled, sens, lambda, Selection::Lambda { lambda }, setup)
}

/// Runs [`lambda_erm`] for each `λ_k` and keeps the candidate minimizing
/// `êrr(A f̃_{λ_k}) + 3√(ln(1/w_k) / 2m)`; ties keep the lowest index.
pub fn lambda_grid_srm(
    labelled: &LabelledSample,
    unlabelled: &UnlabelledSample,
    lambdas: &[f64],
    weights: &[f64],
    p: f64,
    setup: &LearnerSetup,
) -> Result<LearnerOutput> {
    if lambdas.is_empty() {
        return Err(Error::Empty("lambda list"));
    }
    if weights.len() != lambdas.len() {
        return Err(Error::DimensionMismatch {
            context: "lambda weights",
            expected: lambdas.len(),
            found: weights.len(),
        });
    }
    check_weights(weights)?;
    let m = labelled.len();
    let mut outs = Vec::with_capacity(lambdas.len());
    let mut candidates = Vec::with_capacity(lambdas.len());
    for (&lambda, &w) in lambdas.iter().zip(weights) {
        let out = lambda_erm(labelled, unlabelled, lambda, p, setup)?;
        let penalty = weight_penalty(w, m);
        candidates.push(LambdaCandidate {
            lambda,
            weight: w,
            weights: out.hypothesis.weights().to_vec(),
            approx_error: out.approx_error,
            penalty,
            score: out.approx_error + penalty,
        });
        outs.push(out);
    }
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.score < candidates[best].score {
            best = i;
        }
    }
    let mut out = outs.swap_remove(best);
    out.algorithm = "lambda_grid_srm".to_owned();
    out.objective_value = candidates[best].score;
    out.selection = Selection::LambdaGrid {
        chosen_index: best,
        lambda: lambdas[best],
        candidates,
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InputLaw, LossKind};

    fn setup(points: usize) -> LearnerSetup {
        LearnerSetup::new(
            FeatureMap::Identity { dim: 2 },
            ApproxOperator::UniformQuantizer { step: 0.5, clamp: 1.0 },
            LossSpec::absolute(1.0),
            SearchDomain::grid(1.0, 2, points),
        )
    }

    fn data(noise: f64, teacher: Vec<f64>) -> (LabelledSample, UnlabelledSample, SyntheticTask) {
        let task = SyntheticTask::new(
            Hypothesis::linear(teacher),
            InputLaw::UniformBox { low: -1.0, high: 1.0 },
            noise,
            31,
        )
        .unwrap();
        (task.generate_labelled(40).unwrap(), task.generate_unlabelled(60).unwrap(), task)
    }

    #[test]
    fn unconstrained_equals_plain_approx_erm() {
        let (l, u, _) = data(0.1, vec![0.3, -0.6]);
        let s = setup(21);
        let a = constrained_erm(&l, &u, None, 1.0, &s).unwrap();
        let b = lambda_erm(&l, &u, 0.0, 1.0, &s).unwrap();
        assert_eq!(a.hypothesis, b.hypothesis);
        assert_eq!(a.approx_hypothesis, s.op.apply(&a.hypothesis, None).unwrap());
    }

    #[test]
    fn infeasible_threshold_reports_minimum() {
        let (l, u, _) = data(0.1, vec![0.3, -0.6]);
        // grid of 4 points per axis: ±1, ±1/3; only ±1 is on the quantizer grid
        let mut s = setup(4);
        s.domain = SearchDomain::grid(1.0, 2, 4);
        let out = constrained_erm(&l, &u, Some(1e-9), 1.0, &s).unwrap();
        assert!(out.empirical_sensitivity.unwrap() < 1e-9);
        let q = ApproxOperator::UniformQuantizer { step: 0.4, clamp: 1.0 };
        let s2 = LearnerSetup { op: q, ..s };
        match constrained_erm(&l, &u, Some(1e-9), 1.0, &s2) {
            Err(Error::Infeasible { min_constraint: Some(v) }) => assert!(v > 0.0),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn constraint_is_satisfied() {
        let (l, u, _) = data(0.1, vec![0.37, -0.61]);
        let s = setup(21);
        for t in [0.02, 0.05, 0.1, 0.3] {
            let out = constrained_erm(&l, &u, Some(t), 1.0, &s).unwrap();
            assert!(out.empirical_sensitivity.unwrap() < t);
        }
    }

    #[test]
    fn huge_rho_prefers_on_grid_weights() {
        let (l, u, _) = data(0.1, vec![0.37, -0.61]);
        let mut s = setup(21);
        s.loss = LossSpec::new(LossKind::ClippedAbsolute, 1e6).unwrap();
        let out = sensitivity_regularized_erm(&l, SensitivityFn::Empirical { sample: &u, p: 1.0 }, &s).unwrap();
        assert_eq!(out.hypothesis.weights(), out.approx_hypothesis.weights());
    }

    #[test]
    fn lambda_rho_equivalence() {
        let (l, u, _) = data(0.2, vec![0.37, -0.61]);
        let s = setup(21);
        let a = lambda_erm(&l, &u, 1.0, 1.0, &s).unwrap();
        let b = sensitivity_regularized_erm(&l, SensitivityFn::Empirical { sample: &u, p: 1.0 }, &s).unwrap();
        assert_eq!(a.hypothesis, b.hypothesis);
        assert_eq!(a.objective_value, b.objective_value);
    }

    #[test]
    fn on_grid_noiseless_teacher_recovered_by_analytic() {
        let (l, _, _) = data(0.0, vec![0.5, -1.0]);
        let out = analytic_lambda_erm(&l, 0.3, 2.0, &setup(21)).unwrap();
        assert_eq!(out.objective_value, 0.0);
        assert_eq!(out.hypothesis.weights(), &[0.5, -1.0]);
    }

    #[test]
    fn monte_carlo_variant_runs_and_records_name() {
        let (l, _, task) = data(0.1, vec![0.3, -0.6]);
        let s = setup(5);
        let sens = SensitivityFn::MonteCarloTrue { task: &task, p: 1.0, n_mc: 2000, seed: 3 };
        let out = sensitivity_regularized_erm(&l, sens, &s).unwrap();
        assert!(matches!(&out.selection, Selection::Regularized { variant, .. } if variant == "monte_carlo_true"));
    }

    #[test]
    fn schedule_defaults_and_assignment() {
        let s = ThresholdSchedule::new(vec![0.1, 0.2, 0.4], None).unwrap();
        assert_eq!(s.weights, vec![0.5, 0.25, 0.125]);
        assert_eq!(s.assign(0.15, 0.0), (1, false));
        assert_eq!(s.assign(0.2, 0.0), (1, false));
        assert_eq!(s.assign(0.9, 0.0), (2, true));
        assert_eq!(s.assign(0.45, 0.05), (2, false));
        assert!(ThresholdSchedule::new(vec![0.2, 0.1], None).is_err());
        assert!(ThresholdSchedule::new(vec![0.1, 0.2], Some(vec![0.7, 0.7])).is_err());
        assert!(ThresholdSchedule::new(vec![], None).is_err());
    }

    #[test]
    fn weight_penalty_example() {
        assert!((weight_penalty(0.125, 50) - 0.432_608_1).abs() < 1e-7);
        assert_eq!(weight_penalty(1.0, 50), 0.0);
    }

    #[test]
    fn srm_single_threshold_matches_plain_erm_of_full_predictor() {
        let (l, u, _) = data(0.1, vec![0.3, -0.6]);
        let s = setup(11);
        let sched = ThresholdSchedule::new(vec![10.0], None).unwrap();
        let cx = GridRestrictedComplexity::new(&s, &l, &u, 1.0, 500, 1).unwrap();
        let out = srm_learner(&l, &u, &sched, 0.0, 1.0, &cx, &s).unwrap();
        // every candidate gets k = 1: objective is êrr(f) plus a constant
        let plain = optimize(
            |w| crate::model::empirical_error(&Hypothesis::linear(w.to_vec()), &l, &s.loss).unwrap(),
            &s.domain,
            None,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(out.hypothesis.weights(), plain.weights.as_slice());
        assert!(matches!(out.selection, Selection::Srm { chosen_k: 1, clamped: false, .. }));
    }

    #[test]
    fn lambda_grid_examples() {
        let (l, u, _) = data(0.1, vec![0.3, -0.6]);
        let s = setup(11);
        let single = lambda_grid_srm(&l, &u, &[0.5], &[0.5], 1.0, &s).unwrap();
        let direct = lambda_erm(&l, &u, 0.5, 1.0, &s).unwrap();
        assert_eq!(single.hypothesis, direct.hypothesis);
        let tied = lambda_grid_srm(&l, &u, &[0.0, 0.0, 0.0], &[0.25, 0.25, 0.25], 1.0, &s).unwrap();
        assert!(matches!(tied.selection, Selection::LambdaGrid { chosen_index: 0, .. }));
        assert!(lambda_grid_srm(&l, &u, &[], &[], 1.0, &s).is_err());
    }

    #[test]
    fn stochastic_operator_rejected() {
        let (l, u, _) = data(0.1, vec![0.3, -0.6]);
        let mut s = setup(5);
        s.op = ApproxOperator::StochasticRounder { step: 0.5, clamp: 1.0 };
        assert!(matches!(lambda_erm(&l, &u, 1.0, 1.0, &s), Err(Error::StochasticOperator)));
    }
}
