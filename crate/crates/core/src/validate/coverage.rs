//! Frequency tests of the high-probability statements.
//!
//! "True" errors and sensitivities of every hypothesis in a finite grid class are
//! read from one fixed 10^5-draw Monte Carlo sample per suite (common random
//! numbers). Empirical Rademacher complexities for samples beyond the enumeration
//! cap are Monte Carlo estimates over sign vectors.

use super::{run_trials, CoverageReport, Suite, SuiteSpec};
use crate::bounds::{joint_bounds, lambda_equivalence_bound, regularized_bound, JointErrors, Quantity, ThresholdError};
use crate::error::{Error, Result};
use crate::geometry::{mc_rademacher_pointset, mc_rademacher_rows, sensitivity_pointset};
use crate::learners::{lambda_erm, LearnerSetup, SearchDomain};
use crate::model::{
    empirical_error, ApproxOperator, Hypothesis, InputLaw, LabelledSample, LossSpec, Matrix, SyntheticTask,
    UnlabelledSample,
};
use crate::norms::{dot, l2};
use crate::par::{derive_seed, Execution};
use crate::sensitivity::{
    empirical_sensitivity, fast_rate_deviation_bound, sensitivity_deviation_bound, uniform_sensitivity_bound,
};

const N_TRUE: usize = 100_000;
const N_SIGMA: usize = 1000;

/// A finite grid class with its reference quantities.
struct GridClass {
    task: SyntheticTask,
    op: ApproxOperator,
    loss: LossSpec,
    domain: SearchDomain,
    hyps: Vec<Hypothesis>,
    approx: Vec<Hypothesis>,
    /// `err(f)`, `err(Af)` and `D^p(f)` for each hypothesis.
    err: Vec<f64>,
    err_approx: Vec<f64>,
    sens: Vec<f64>,
    sup_residual: f64,
}

impl GridClass {
    fn new(
        task: SyntheticTask,
        op: ApproxOperator,
        domain: SearchDomain,
        p: f64,
        with_errors: bool,
        seed: u64,
    ) -> Result<Self> {
        let loss = LossSpec::absolute(1.0);
        let cands = domain.candidates().ok_or_else(|| Error::invalid("domain", "grid class needs a grid"))?;
        let hyps: Vec<Hypothesis> = cands.into_iter().map(Hypothesis::linear).collect();
        let approx = hyps.iter().map(|h| op.apply(h, None)).collect::<Result<Vec<_>>>()?;
        let reference = task.reseeded(derive_seed(seed, 0)).generate_labelled(N_TRUE)?;
        let unl = reference.to_unlabelled();
        let (mut err, mut err_approx) = (Vec::new(), Vec::new());
        if with_errors {
            for (h, a) in hyps.iter().zip(&approx) {
                err.push(empirical_error(h, &reference, &loss)?);
                err_approx.push(empirical_error(a, &reference, &loss)?);
            }
        }
        let sens = hyps
            .iter()
            .map(|h| Ok(empirical_sensitivity(h, &op, &unl, p)?.value))
            .collect::<Result<Vec<_>>>()?;
        let sup_residual = hyps
            .iter()
            .map(|h| Ok(l2(&op.residual(h.weights(), None)?)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(GridClass { task, op, loss, domain, hyps, approx, err, err_approx, sens, sup_residual })
    }

    /// `êrr(Af)` for each hypothesis.
    fn empirical_approx_errors(&self, s: &LabelledSample) -> Result<Vec<f64>> {
        self.approx.iter().map(|a| empirical_error(a, s, &self.loss)).collect()
    }

    /// MC estimate of `R̂_S(H_A)`: rows are the approximated predictors on the sample.
    fn rad_approx_class(&self, s: &LabelledSample, seed: u64) -> Result<Quantity> {
        let m = s.len();
        let mut data = Vec::with_capacity(self.approx.len() * m);
        for a in &self.approx {
            data.extend(s.inputs().iter_rows().map(|x| dot(a.weights(), x)));
        }
        let rows = Matrix::from_flat(self.approx.len(), m, data)?;
        Ok((&mc_rademacher_rows(&rows, N_SIGMA, seed, Execution::Sequential)?).into())
    }

    /// `(ε, sup_f |D¹(f) - D̂¹(f)|)` on a fresh unlabelled sample, with `ε` from `bound(R̂, C, m)`.
    fn deviation<B>(&self, u: &UnlabelledSample, seed: u64, bound: B) -> Result<(f64, f64)>
    where
        B: Fn(f64, f64, usize) -> Result<f64>,
    {
        let ps = sensitivity_pointset(&self.hyps, &self.op, u)?;
        let rad = mc_rademacher_pointset(&ps, N_SIGMA, seed, Execution::Sequential)?.value;
        let c = uniform_sensitivity_bound(self.sup_residual, u.inputs());
        let eps = bound(rad, c, u.len())?;
        let m = u.len() as f64;
        let dev = ps
            .points()
            .iter_rows()
            .zip(&self.sens)
            .map(|(row, d)| (d - row.iter().sum::<f64>() / m).abs())
            .fold(0.0, f64::max);
        Ok((eps, dev))
    }
}

/// Lowest index minimizing `key` among indices passing `keep`.
fn argmin_where(n: usize, keep: impl Fn(usize) -> bool, key: impl Fn(usize) -> f64) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in (0..n).filter(|&i| keep(i)) {
        if best.is_none_or(|b| key(i) < key(b)) {
            best = Some(i);
        }
    }
    best
}

fn box_task(teacher: Vec<f64>, noise: f64) -> Result<SyntheticTask> {
    SyntheticTask::new(Hypothesis::linear(teacher), InputLaw::UniformBox { low: -1.0, high: 1.0 }, noise, 0)
}

fn coverage_spec(bound: &'static str, delta: f64, required: f64) -> SuiteSpec {
    SuiteSpec {
        bound,
        target: 1.0 - delta,
        required,
        notes: Vec::new(),
    }
    .note(format!("reference quantities from a fixed {N_TRUE}-draw Monte Carlo sample"))
}

fn deviation_suite(suite: Suite, trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    const M: usize = 100;
    const DELTA: f64 = 0.1;
    const T: f64 = 0.1;
    let fast = suite == Suite::Prop10;
    // the fast-rate class uses an off-grid 12-point axis and a fine quantizer so every D² <= t
    let (points, step, p) = if fast { (12, 0.2, 2.0) } else { (11, 0.5, 1.0) };
    let op = ApproxOperator::UniformQuantizer { step, clamp: 1.0 };
    let class = GridClass::new(box_task(vec![0.0, 0.0], 0.0)?, op, SearchDomain::grid(1.0, 2, points), p, false, seed)?;
    let mut spec;
    let class = if fast {
        let max_d2 = class.sens.iter().copied().fold(0.0, f64::max);
        if max_d2 > T {
            return Err(Error::invalid("t", format!("class is not uniformly below t: max D² = {max_d2}")));
        }
        spec = coverage_spec("fast_rate_deviation_bound", DELTA, 1.0 - DELTA)
            .note(format!("max true D² over the class {max_d2} <= t = {T}"));
        // deviations are measured in D¹
        let ref_unl = class.task.reseeded(derive_seed(seed, 0)).generate_unlabelled(N_TRUE)?;
        let sens = class
            .hyps
            .iter()
            .map(|h| Ok(empirical_sensitivity(h, &class.op, &ref_unl, 1.0)?.value))
            .collect::<Result<Vec<_>>>()?;
        GridClass { sens, ..class }
    } else {
        spec = coverage_spec("sensitivity_deviation_bound", DELTA, 1.0 - DELTA);
        class
    };
    spec = spec
        .note(format!("d = 2, {points}x{points} grid on [-1, 1]^2, quantizer step {step}, m = {M}, delta = {DELTA}"))
        .note(format!("empirical Rademacher complexity of the sensitivity class by Monte Carlo ({N_SIGMA} sign draws)"))
        .note("C = sup ||w - Q(w)||_2 times the largest input norm in the sample");
    run_trials(suite, spec, trials, seed, exec, |_, s| {
        let u = class.task.reseeded(s).generate_unlabelled(M)?;
        let (eps, dev) = class.deviation(&u, derive_seed(s, 2), |rad, c, m| {
            Ok(if fast {
                fast_rate_deviation_bound(rad, T, c, m, DELTA)?.epsilon_u
            } else {
                sensitivity_deviation_bound(rad, c, m, DELTA)?.epsilon_u
            })
        })?;
        Ok(eps - dev)
    })
}

pub(super) fn lemma1(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    deviation_suite(Suite::Lemma1, trials, seed, exec)
}

pub(super) fn prop10(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    deviation_suite(Suite::Prop10, trials, seed, exec)
}

const P23_M: usize = 50;
const P23_DELTA: f64 = 0.05;
const P23_T: f64 = 0.1;

fn prop23_class(seed: u64) -> Result<GridClass> {
    let teacher = vec![1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0, 1.0, -1.0];
    let task = SyntheticTask::new(Hypothesis::linear(teacher), InputLaw::IsotropicGaussian { sd: 0.5 }, 0.1, 0)?;
    let op = ApproxOperator::UniformQuantizer { step: 0.5, clamp: 1.0 };
    GridClass::new(task, op, SearchDomain::grid(1.0, 5, 4), 1.0, true, seed)
}

fn prop23_notes(spec: SuiteSpec) -> SuiteSpec {
    spec.note(format!(
        "d = 5, 4-point axis on [-1, 1], quantizer step 0.5 clamp 1, gaussian inputs sd 0.5, label noise 0.1, m = {P23_M}, delta = {P23_DELTA}"
    ))
    .note(format!("empirical Rademacher complexity of the approximated class by Monte Carlo ({N_SIGMA} sign draws)"))
}

pub(super) fn prop2(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    let class = prop23_class(seed)?;
    let n = class.hyps.len();
    let feasible = |i: usize| class.sens[i] <= P23_T;
    let star = argmin_where(n, feasible, |i| class.err[i]).ok_or(Error::Infeasible { min_constraint: None })?;
    let g_star = argmin_where(n, feasible, |i| class.err_approx[i]).expect("nonempty");
    let errs = JointErrors {
        min_approx_err: class.err_approx[star].min(class.err_approx[g_star]).into(),
        err_f_star: class.err[star].into(),
    };
    let spec = prop23_notes(coverage_spec("joint_approx_predictor", P23_DELTA, 1.0 - 2.0 * P23_DELTA))
        .note(format!("t = {P23_T}; the constrained learner uses the true D¹"));
    run_trials(Suite::Prop2, spec, trials, seed, exec, |_, s| {
        let sample = class.task.reseeded(s).generate_labelled(P23_M)?;
        let emp = class.empirical_approx_errors(&sample)?;
        let chosen = argmin_where(n, feasible, |i| emp[i]).expect("nonempty");
        let rad = class.rad_approx_class(&sample, derive_seed(s, 2))?;
        let [_, af, _] = joint_bounds(errs, rad, class.loss.rho(), P23_T, P23_M, P23_DELTA)?;
        Ok(af.value - class.err_approx[chosen])
    })
}

pub(super) fn prop3(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    let class = prop23_class(seed)?;
    let n = class.hyps.len();
    let rho = class.loss.rho();
    // inf over t restricted to the attained sensitivities, where err(f_t*) jumps
    let grid: Vec<ThresholdError> = class
        .sens
        .iter()
        .map(|&t| {
            let best = argmin_where(n, |i| class.sens[i] <= t, |i| class.err[i]).expect("t is attained");
            ThresholdError { t, err_star: class.err[best].into() }
        })
        .collect();
    let spec = prop23_notes(coverage_spec("regularized_known_sensitivity", P23_DELTA, 1.0 - 2.0 * P23_DELTA))
        .note("learner minimizes err_S(Af) + rho D¹(f) with the true D¹; infimum over the attained sensitivities");
    run_trials(Suite::Prop3, spec, trials, seed, exec, |_, s| {
        let sample = class.task.reseeded(s).generate_labelled(P23_M)?;
        let emp = class.empirical_approx_errors(&sample)?;
        let chosen = argmin_where(n, |_| true, |i| emp[i] + rho * class.sens[i]).expect("nonempty");
        let rad = class.rad_approx_class(&sample, derive_seed(s, 2))?;
        let bound = regularized_bound(&grid, rho, rad, P23_M, P23_DELTA, None)?;
        Ok(bound.value - class.err_approx[chosen])
    })
}

pub(super) fn prop4(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    const M: usize = 50;
    const M_U: usize = 100;
    const DELTA: f64 = 0.05;
    const LAMBDA: f64 = 0.5;
    let op = ApproxOperator::UniformQuantizer { step: 0.5, clamp: 1.0 };
    let class = GridClass::new(box_task(vec![0.3, -0.7], 0.1)?, op, SearchDomain::grid(1.0, 2, 11), 1.0, true, seed)?;
    let n = class.hyps.len();
    let mut setup = LearnerSetup::new(
        crate::model::FeatureMap::Identity { dim: 2 },
        class.op.clone(),
        class.loss,
        class.domain.clone(),
    );
    setup.exec = Execution::Sequential;
    let spec = coverage_spec("lambda_equivalence", DELTA, 1.0 - DELTA)
        .note(format!("d = 2, 11x11 grid on [-1, 1]^2, quantizer step 0.5, m = {M}, m_u = {M_U}, lambda = {LAMBDA}, delta = {DELTA}"))
        .note("t = D¹ of the lambda-regularized predictor; the constrained learner uses the true D¹")
        .note(format!("epsilon_u from the deviation bound at delta/4 with a Monte Carlo ({N_SIGMA} sign draws) complexity"));
    run_trials(Suite::Prop4, spec, trials, seed, exec, |_, s| {
        let task = class.task.reseeded(s);
        let sample = task.generate_labelled(M)?;
        let unl = task.generate_unlabelled(M_U)?;
        let tilde = lambda_erm(&sample, &unl, LAMBDA, 1.0, &setup)?;
        let j = class
            .hyps
            .iter()
            .position(|h| h.weights() == tilde.hypothesis.weights())
            .expect("learner returns a grid point");
        let t = class.sens[j];
        let emp = class.empirical_approx_errors(&sample)?;
        let hat = argmin_where(n, |i| class.sens[i] <= t, |i| emp[i]).expect("f_tilde is feasible");
        let (eps, _) = class.deviation(&unl, derive_seed(s, 4), |rad, c, m| {
            Ok(sensitivity_deviation_bound(rad, c, m, DELTA / 4.0)?.epsilon_u)
        })?;
        let rad = class.rad_approx_class(&sample, derive_seed(s, 2))?;
        let bound = lambda_equivalence_bound(class.loss.rho(), rad, M, DELTA, LAMBDA, Some(eps))?;
        Ok(bound.value - (class.err_approx[j] - class.err_approx[hat]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_prefers_lowest_index() {
        let v = [3.0, 1.0, 1.0, 0.5];
        assert_eq!(argmin_where(4, |i| i < 3, |i| v[i]), Some(1));
        assert_eq!(argmin_where(4, |_| false, |i| v[i]), None);
    }

    #[test]
    fn short_runs_are_deterministic() {
        let a = lemma1(3, 9, Execution::Parallel).unwrap();
        let b = lemma1(3, 9, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 3);
    }
}
