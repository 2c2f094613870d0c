use rand::Rng;

use super::{RadEstimate, RadMethod};
use crate::error::{ensure_finite, Error, Result};
use crate::model::{ApproxOperator, Hypothesis, Matrix, UnlabelledSample};
use crate::par::{batched, map_indexed, pairwise_sum, Execution, Moments};

/// Largest `m` accepted by exhaustive enumeration (`2^22` sign patterns).
pub const EXACT_CAP: usize = 22;

// Low bits walk a Gray code inside a chunk; chunks (high bits) run in parallel.
const INNER_BITS: usize = 12;
const MC_SIGMA_BATCH: usize = 1024;

fn check_cap(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m", "sample size must be at least 1"));
    }
    if m > EXACT_CAP {
        return Err(Error::EnumerationTooLarge { m, cap: EXACT_CAP });
    }
    Ok(())
}

/// Sign vector for a bit pattern: bit `j` set means `σ_j = -1`.
fn signs_of(bits: u64, m: usize, out: &mut [f64]) {
    for (j, s) in out.iter_mut().enumerate().take(m) {
        *s = if bits >> j & 1 == 1 { -1.0 } else { 1.0 };
    }
}

/// Mean of `f(σ)` over all `2^m` sign vectors, summed in a fixed order.
pub fn enumerate_sign_patterns<F>(m: usize, exec: Execution, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    check_cap(m)?;
    let inner = m.min(INNER_BITS);
    let chunks = 1usize << (m - inner);
    let sums = map_indexed(chunks, exec, |c| {
        let mut sigma = vec![0.0; m];
        signs_of((c as u64) << inner, m, &mut sigma);
        let mut acc = f(&sigma);
        for t in 1u64..(1 << inner) {
            let j = t.trailing_zeros() as usize;
            sigma[j] = -sigma[j];
            acc += f(&sigma);
        }
        acc
    });
    Ok(pairwise_sum(&sums) / (1u64 << m) as f64)
}

/// Exact `(1/m) E_σ max_i ⟨σ, row_i⟩` by enumeration of every sign vector.
pub fn exact_rademacher_rows(rows: &Matrix, exec: Execution) -> Result<RadEstimate> {
    let (n, m) = (rows.rows(), rows.cols());
    if n == 0 {
        return Err(Error::Empty("point set"));
    }
    check_cap(m)?;
    ensure_finite(rows.as_slice(), "point set")?;
    // column-major so a sign flip touches one contiguous column
    let mut cols = vec![0.0; n * m];
    for i in 0..n {
        for (j, v) in rows.row(i).iter().enumerate() {
            cols[j * n + i] = *v;
        }
    }
    let inner = m.min(INNER_BITS);
    let chunks = 1usize << (m - inner);
    let sums = map_indexed(chunks, exec, |c| {
        let mut sigma = vec![0.0; m];
        signs_of((c as u64) << inner, m, &mut sigma);
        let mut dots: Vec<f64> = (0..n)
            .map(|i| rows.row(i).iter().zip(&sigma).map(|(x, s)| x * s).sum())
            .collect();
        let max = |d: &[f64]| d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = max(&dots);
        for t in 1u64..(1 << inner) {
            let j = t.trailing_zeros() as usize;
            let col = &cols[j * n..(j + 1) * n];
            // σ_j flips sign: ⟨σ, row⟩ moves by -2 σ_j(old) row_j
            let step = -2.0 * sigma[j];
            sigma[j] = -sigma[j];
            for (d, x) in dots.iter_mut().zip(col) {
                *d += step * x;
            }
            acc += max(&dots);
        }
        acc
    });
    let mean = pairwise_sum(&sums) / (1u64 << m) as f64;
    Ok(RadEstimate::new(mean / m as f64, RadMethod::ExactEnumeration, m))
}

/// Monte Carlo estimate of `(1/m) E_σ max_i ⟨σ, row_i⟩` from `n_sigma` sign draws.
pub fn mc_rademacher_rows(rows: &Matrix, n_sigma: usize, seed: u64, exec: Execution) -> Result<RadEstimate> {
    let (n, m) = (rows.rows(), rows.cols());
    if n == 0 {
        return Err(Error::Empty("point set"));
    }
    if m == 0 {
        return Err(Error::invalid("m", "sample size must be at least 1"));
    }
    if n_sigma == 0 {
        return Err(Error::invalid("n_sigma", "must be at least 1"));
    }
    ensure_finite(rows.as_slice(), "point set")?;
    let parts = batched(n_sigma, MC_SIGMA_BATCH, seed, exec, |rng, len| {
        let mut sigma = vec![0.0; m];
        let mut mom = Moments::default();
        for _ in 0..len {
            for s in sigma.iter_mut() {
                *s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
            let best = rows
                .iter_rows()
                .map(|r| r.iter().zip(&sigma).map(|(x, s)| x * s).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            mom.push(best);
        }
        mom
    });
    let mom = Moments::merged(&parts);
    let mf = m as f64;
    Ok(RadEstimate::new(
        mom.mean / mf,
        RadMethod::MonteCarlo {
            n_sigma,
            seed,
            standard_error: mom.standard_error() / mf,
        },
        m,
    ))
}

/// Rows `(|f_i(x_k) - Af_i(x_k)|)_k`, one per hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityPointSet {
    points: Matrix,
}

impl SensitivityPointSet {
    pub fn new(points: Matrix) -> Result<Self> {
        if points.rows() == 0 || points.cols() == 0 {
            return Err(Error::Empty("sensitivity point set"));
        }
        ensure_finite(points.as_slice(), "sensitivity point set")?;
        if points.as_slice().iter().any(|&v| v < 0.0) {
            return Err(Error::invalid("points", "sensitivities must be nonnegative"));
        }
        Ok(SensitivityPointSet { points })
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn m(&self) -> usize {
        self.points.cols()
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }
}

/// Restriction of the sensitivity class to the sample, one row per hypothesis.
pub fn sensitivity_pointset(
    hypotheses: &[Hypothesis],
    op: &ApproxOperator,
    s: &UnlabelledSample,
) -> Result<SensitivityPointSet> {
    if hypotheses.is_empty() {
        return Err(Error::Empty("hypothesis list"));
    }
    if !op.is_deterministic() {
        return Err(Error::StochasticOperator);
    }
    let m = s.len();
    let mut data = Vec::with_capacity(hypotheses.len() * m);
    for h in hypotheses {
        let phi = h.feature_map().feature_matrix(s.inputs())?;
        let r = op.residual(h.weights(), None)?;
        data.extend(crate::sensitivity::pointwise_gaps(&r, &phi));
    }
    SensitivityPointSet::new(Matrix::from_flat(hypotheses.len(), m, data)?)
}

pub fn exact_rademacher_pointset(ps: &SensitivityPointSet, exec: Execution) -> Result<RadEstimate> {
    exact_rademacher_rows(ps.points(), exec)
}

pub fn mc_rademacher_pointset(ps: &SensitivityPointSet, n_sigma: usize, seed: u64, exec: Execution) -> Result<RadEstimate> {
    mc_rademacher_rows(ps.points(), n_sigma, seed, exec)
}
