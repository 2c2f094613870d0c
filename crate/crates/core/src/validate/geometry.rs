//! Closed forms against exhaustive sign enumeration, and certified bounds against oracles.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{run_trials, CoverageReport, Suite, SuiteSpec};
use crate::error::Result;
use crate::geometry::{
    cluster_bound, crude_bounds, enumerate_sign_patterns, exact_rademacher_rows, kernel_sensitivity_class_bound,
    mc_rademacher_pointset, random_orthogonal, rotated_union_bound, sensitivity_pointset, union_ellipse_bound,
    ClusterComponent, RotatedEllipse, ellipse_rademacher,
};
use crate::model::{ApproxOperator, Hypothesis, Matrix, UnlabelledSample};
use crate::norms::{dual_direction, l1, p_norm};
use crate::par::{batched, derive_seed, stream_rng, Execution, Moments};

const EQ_TOL: f64 = 1e-9;
const PS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

fn semi_axes(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(0.1..3.0)).collect()
}

/// `sup_{x ∈ E_p(μ)} ⟨σ, x⟩`, attained at `x = μ ∘ u` with `u` the dual direction of `σ ∘ μ`.
/// Returns `None` if the maximizer leaves the ellipse.
fn ellipse_support(sigma: &[f64], mu: &[f64], p: f64) -> Option<f64> {
    let a: Vec<f64> = sigma.iter().zip(mu).map(|(s, m)| s * m).collect();
    let (u, _) = dual_direction(&a, p);
    if p_norm(&u, p) > 1.0 + 1e-12 {
        return None;
    }
    Some(a.iter().zip(&u).map(|(a, u)| a * u).sum())
}

/// Mean over sign patterns of the support of `∪_i E_p(μ_i)`; NaN flags an infeasible maximizer.
fn enumerate_union(mus: &[Vec<f64>], p: f64, m: usize) -> Result<f64> {
    let mean = enumerate_sign_patterns(m, Execution::Sequential, |sigma| {
        mus.iter()
            .map(|mu| ellipse_support(sigma, mu, p).unwrap_or(f64::NAN))
            .fold(f64::NEG_INFINITY, f64::max)
    })?;
    Ok(mean / m as f64)
}

pub(super) fn ellipse_exact(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    let spec = SuiteSpec::exact("ellipse_rademacher").note(format!("tolerance {EQ_TOL:e}; m <= 12"));
    run_trials(Suite::EllipseExact, spec, trials, seed, exec, |i, s| {
        let mut rng = stream_rng(s, 0);
        let m = rng.random_range(1..=12);
        let p = PS[i % PS.len()];
        let mu = semi_axes(&mut rng, m);
        let exact = enumerate_union(std::slice::from_ref(&mu), p, m)?;
        let closed = ellipse_rademacher(&mu, p, m)?.value;
        Ok(EQ_TOL - (exact - closed).abs())
    })
}

pub(super) fn union_exact(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    let spec = SuiteSpec::exact("union_ellipse_bound").note(format!("tolerance {EQ_TOL:e}; m <= 12, at most 5 ellipses"));
    run_trials(Suite::UnionExact, spec, trials, seed, exec, |i, s| {
        let mut rng = stream_rng(s, 0);
        let m = rng.random_range(1..=12);
        let k = rng.random_range(1..=5);
        let p = PS[i % PS.len()];
        let mus: Vec<Vec<f64>> = (0..k).map(|_| semi_axes(&mut rng, m)).collect();
        let exact = enumerate_union(&mus, p, m)?;
        let closed = union_ellipse_bound(&mus, p, m)?.value;
        let comps: Vec<RotatedEllipse> = mus.iter().cloned().map(RotatedEllipse::axis_aligned).collect();
        let rotated = rotated_union_bound(&comps, p, m)?.value;
        Ok(EQ_TOL - (exact - closed).abs().max((exact - rotated).abs()))
    })
}

/// Exact complexity of `{x >= 0 : ‖x‖_p <= r}`: per sign vector with `k` positive entries the
/// supremum is `r k^{1/p'}`.
fn orthant_ball_exact(r: f64, p: f64, m: usize) -> Result<f64> {
    let mean = enumerate_sign_patterns(m, Execution::Sequential, |sigma| {
        let k = sigma.iter().filter(|&&s| s > 0.0).count() as f64;
        if k == 0.0 {
            0.0
        } else {
            r * k.powf(1.0 - 1.0 / p)
        }
    })?;
    Ok(mean / m as f64)
}

pub(super) fn crude_sandwich(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    let anchor = (2.0 + 2.0 * std::f64::consts::SQRT_2) / 8.0;
    let spec = SuiteSpec::exact("crude_bounds")
        .note("class of nonnegative vectors with empirical p-sensitivity at most R, i.e. the orthant ball of radius R m^(1/p)")
        .note(format!("trial 0 is the anchor p = 2, m = 2, R = 1 with exact value {anchor}"));
    run_trials(Suite::CrudeSandwich, spec, trials, seed, exec, |i, s| {
        let mut rng = stream_rng(s, 0);
        let (p, m, r) = if i == 0 {
            (2.0, 2, 1.0)
        } else {
            ([1.0, 2.0][i % 2], rng.random_range(1..=10), rng.random_range(0.1..3.0))
        };
        let exact = orthant_ball_exact(r * (m as f64).powf(1.0 / p), p, m)?;
        let (lo, hi) = crude_bounds(r, p)?;
        let mut slack = (exact - lo).min(hi - exact);
        if i == 0 {
            slack = slack.min(1e-12 - (exact - anchor).abs());
        }
        Ok(slack)
    })
}

fn random_component(rng: &mut ChaCha8Rng, m: usize, centered: bool) -> ClusterComponent {
    let v = if rng.random_bool(0.25) {
        RotatedEllipse::axis_aligned(vec![1.0; m]).v
    } else {
        random_orthogonal(m, rng).to_rows()
    };
    let center = if centered {
        vec![0.0; m]
    } else {
        (0..m).map(|_| rng.random_range(-2.0..2.0)).collect()
    };
    ClusterComponent {
        center,
        v,
        mu: (0..m).map(|_| rng.random_range(0.1..2.0)).collect(),
    }
}

/// A point of `c + VΛ B_p`: random direction on the unit `p`-sphere, random radius.
fn point_in(rng: &mut ChaCha8Rng, c: &ClusterComponent, p: f64) -> Result<Vec<f64>> {
    let m = c.mu.len();
    let g: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = p_norm(&g, p).max(f64::MIN_POSITIVE);
    let radius: f64 = if rng.random_bool(0.3) { 1.0 } else { rng.random() };
    let u: Vec<f64> = g.iter().map(|x| x / norm * radius).collect();
    let shape = RotatedEllipse { v: c.v.clone(), mu: c.mu.clone() }.scaled()?;
    Ok(shape.mul_vec(&u).iter().zip(&c.center).map(|(a, b)| a + b).collect())
}

pub(super) fn cluster_dominance(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    let spec = SuiteSpec::exact("cluster_bound")
        .note("exact enumeration of finite point sets drawn inside clustered models, m <= 10")
        .note("each trial also requires the bound to equal the rotated-union value when every center is zero");
    run_trials(Suite::ClusterDominance, spec, trials, seed, exec, |i, s| {
        let mut rng = stream_rng(s, 0);
        let m = rng.random_range(2..=10);
        let l = rng.random_range(1..=4);
        let p = PS[i % PS.len()];
        let comps: Vec<ClusterComponent> = (0..l).map(|_| random_component(&mut rng, m, false)).collect();
        let n_points = rng.random_range(1..=30);
        let mut rows = Vec::with_capacity(n_points);
        for _ in 0..n_points {
            let c = &comps[rng.random_range(0..l)];
            rows.push(point_in(&mut rng, c, p)?);
        }
        let exact = exact_rademacher_rows(&Matrix::from_rows(&rows)?, Execution::Sequential)?.value;
        let bound = cluster_bound(&comps, p, m)?.value;
        let centered: Vec<ClusterComponent> = comps
            .iter()
            .map(|c| ClusterComponent { center: vec![0.0; m], ..c.clone() })
            .collect();
        let shapes: Vec<RotatedEllipse> = comps
            .iter()
            .map(|c| RotatedEllipse { v: c.v.clone(), mu: c.mu.clone() })
            .collect();
        let reduces = cluster_bound(&centered, p, m)?.value == rotated_union_bound(&shapes, p, m)?.value;
        Ok(if reduces { bound - exact } else { -1.0 })
    })
}

/// MC of `(1/m) E_σ sup_{‖r‖_∞ <= Δ/2} ⟨r, Σ σ_k x_k⟩ = (Δ/2) E‖Σ σ_k x_k‖₁ / m`.
fn box_residual_mc(x: &Matrix, half_step: f64, n_sigma: usize, seed: u64) -> (f64, f64) {
    let (m, d) = (x.rows(), x.cols());
    let parts = batched(n_sigma, 1024, seed, Execution::Sequential, |rng, len| {
        let mut mom = Moments::default();
        let mut acc = vec![0.0; d];
        for _ in 0..len {
            acc.iter_mut().for_each(|a| *a = 0.0);
            for k in 0..m {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                acc.iter_mut().zip(x.row(k)).for_each(|(a, v)| *a += s * v);
            }
            mom.push(half_step * l1(&acc));
        }
        mom
    });
    let mom = Moments::merged(&parts);
    (mom.mean / m as f64, mom.standard_error() / m as f64)
}

pub(super) fn kernel_dominance(trials: usize, seed: u64, exec: Execution) -> Result<CoverageReport> {
    const N_SIGMA: usize = 4000;
    const N_HYP: usize = 200;
    let spec = SuiteSpec::exact("kernel_sensitivity_class_bound")
        .note("bound in its 1/m form; class = linear weights in [-1, 1]^d under a uniform quantizer")
        .note("violation when an MC estimate minus 4 standard errors exceeds the bound")
        .note(format!(
            "MC oracles: box residual class ({N_SIGMA} sign draws) and {N_HYP} random quantized hypotheses"
        ));
    run_trials(Suite::KernelDominance, spec, trials, seed, exec, |_, s| {
        let mut rng = stream_rng(s, 0);
        let d = rng.random_range(1..=5);
        let m = rng.random_range(5..=50);
        let step = [0.1, 0.25, 0.5][rng.random_range(0..3)];
        let scale = rng.random_range(0.2..2.0);
        let data: Vec<f64> = (0..m * d).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        let x = Matrix::from_flat(m, d, data)?;
        let gram: Vec<f64> = x.iter_rows().map(|r| r.iter().map(|v| v * v).sum()).collect();
        let sup = step / 2.0 * (d as f64).sqrt();
        let bound = kernel_sensitivity_class_bound(sup, &gram)?.value;

        let (lin, lin_se) = box_residual_mc(&x, step / 2.0, N_SIGMA, derive_seed(s, 1));

        let op = ApproxOperator::UniformQuantizer { step, clamp: 1.0 };
        let hyps: Vec<Hypothesis> = (0..N_HYP)
            .map(|_| Hypothesis::linear((0..d).map(|_| rng.random_range(-1.0..=1.0)).collect()))
            .collect();
        let sample = UnlabelledSample::new(x, format!("kernel_dominance:{s}"))?;
        let ps = sensitivity_pointset(&hyps, &op, &sample)?;
        let grid = mc_rademacher_pointset(&ps, N_SIGMA, derive_seed(s, 2), Execution::Sequential)?;
        let grid_se = grid.standard_error().unwrap_or(0.0);
        Ok((bound - (lin - 4.0 * lin_se)).min(bound - (grid.value - 4.0 * grid_se)))
    })
}
