//! Learners against exhaustive search on small grids.

use approx_sense::learners::{
    analytic_lambda_erm, constrained_erm, lambda_erm, sensitivity_regularized_erm, LearnerSetup, SearchDomain,
    SearchMode, SensitivityFn,
};
use approx_sense::model::{
    empirical_error, ApproxOperator, FeatureMap, Hypothesis, InputLaw, LabelledSample, LossSpec, SyntheticTask,
    UnlabelledSample,
};
use approx_sense::norms::l2;
use approx_sense::sensitivity::empirical_sensitivity;
use approx_sense::Execution;

fn problem(seed: u64) -> (LabelledSample, UnlabelledSample) {
    let task = SyntheticTask::new(
        Hypothesis::linear(vec![0.37, -0.58]),
        InputLaw::UniformBox { low: -1.0, high: 1.0 },
        0.15,
        seed,
    )
    .unwrap();
    (task.generate_labelled(60).unwrap(), task.generate_unlabelled(80).unwrap())
}

fn setup(points: usize, exec: Execution) -> LearnerSetup {
    let mut s = LearnerSetup::new(
        FeatureMap::Identity { dim: 2 },
        ApproxOperator::UniformQuantizer { step: 0.5, clamp: 1.0 },
        LossSpec::absolute(1.0),
        SearchDomain::grid(1.0, 2, points),
    );
    s.exec = exec;
    s
}

fn grid(n: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..n).map(|j| (2.0 * j as f64 - (n - 1) as f64) / (n - 1) as f64).collect();
    axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect()
}

/// Lowest-index minimizer of `f` among points passing `keep`.
fn brute(points: &[Vec<f64>], keep: impl Fn(&[f64]) -> bool, f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    let mut best: Option<(usize, f64)> = None;
    for (i, w) in points.iter().enumerate().filter(|(_, w)| keep(w)) {
        let v = f(w);
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    let (i, v) = best.expect("feasible point");
    (points[i].clone(), v)
}

fn approx_err(s: &LearnerSetup, w: &[f64], l: &LabelledSample) -> f64 {
    let a = s.op.apply(&Hypothesis::linear(w.to_vec()), None).unwrap();
    empirical_error(&a, l, &s.loss).unwrap()
}

fn dhat(s: &LearnerSetup, w: &[f64], u: &UnlabelledSample, p: f64) -> f64 {
    empirical_sensitivity(&Hypothesis::linear(w.to_vec()), &s.op, u, p).unwrap().value
}

#[test]
fn constrained_matches_exhaustive_on_21_by_21_grid() {
    let (l, u) = problem(3);
    let s = setup(21, Execution::default());
    let g = grid(21);
    for t in [0.01, 0.05, 0.1, 0.2] {
        let out = constrained_erm(&l, &u, Some(t), 1.0, &s).unwrap();
        let (w, v) = brute(&g, |w| dhat(&s, w, &u, 1.0) < t, |w| approx_err(&s, w, &l));
        assert_eq!(out.hypothesis.weights(), w.as_slice(), "t = {t}");
        assert_eq!(out.objective_value, v);
    }
}

#[test]
fn regularized_variants_match_exhaustive() {
    let (l, u) = problem(4);
    let s = setup(15, Execution::default());
    let g = grid(15);
    let out = sensitivity_regularized_erm(&l, SensitivityFn::Empirical { sample: &u, p: 1.0 }, &s).unwrap();
    let (w, v) = brute(&g, |_| true, |w| approx_err(&s, w, &l) + dhat(&s, w, &u, 1.0));
    assert_eq!((out.hypothesis.weights(), out.objective_value), (w.as_slice(), v));

    let out = analytic_lambda_erm(&l, 0.8, 1.5, &s).unwrap();
    let residual = |w: &[f64]| l2(&s.op.residual(w, None).unwrap());
    let (w, v) = brute(&g, |_| true, |w| approx_err(&s, w, &l) + 0.8 * (residual(w) * 1.5));
    assert_eq!((out.hypothesis.weights(), out.objective_value), (w.as_slice(), v));
}

#[test]
fn sensitivity_is_nonincreasing_along_lambda_path() {
    let (l, u) = problem(5);
    let s = setup(21, Execution::default());
    let mut last = f64::INFINITY;
    for k in 0..25 {
        let lambda = 0.1 * k as f64;
        let out = lambda_erm(&l, &u, lambda, 1.0, &s).unwrap();
        let d = out.empirical_sensitivity.unwrap();
        assert!(d <= last + 1e-12, "lambda {lambda}: {d} > {last}");
        last = d;
    }
}

#[test]
fn learners_are_schedule_independent() {
    let (l, u) = problem(6);
    for mode in [
        SearchMode::Grid { points_per_axis: 13 },
        SearchMode::Random { n_samples: 500 },
        SearchMode::CoordinateDescent { restarts: 3, iterations: 5, line_points: 21 },
    ] {
        let mut a = setup(13, Execution::Sequential);
        a.domain.mode = mode.clone();
        a.domain.seed = 77;
        let b = LearnerSetup { exec: Execution::Parallel, ..a.clone() };
        let x = lambda_erm(&l, &u, 0.4, 2.0, &a).unwrap();
        let y = lambda_erm(&l, &u, 0.4, 2.0, &b).unwrap();
        assert_eq!(x, y, "{mode:?}");
    }
}

#[test]
fn coordinate_descent_trace_is_nonincreasing() {
    let (l, u) = problem(7);
    let mut s = setup(13, Execution::default());
    s.domain.mode = SearchMode::CoordinateDescent { restarts: 1, iterations: 8, line_points: 41 };
    let out = lambda_erm(&l, &u, 0.3, 1.0, &s).unwrap();
    assert!(out.objective_trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", out.objective_trace);
    assert_eq!(*out.objective_trace.last().unwrap(), out.objective_value);
}
