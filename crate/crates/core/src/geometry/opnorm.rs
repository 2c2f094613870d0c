use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::Matrix;
use crate::norms::{dot, dual_direction, l1, l2};
use crate::par::stream_rng;

/// Entrywise tolerance on `VᵀV - I` for a matrix to count as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Fails unless `v` is square with `max |VᵀV - I| <= ORTHOGONALITY_TOL`.
pub fn check_orthogonal(v: &Matrix) -> Result<()> {
    let n = v.rows();
    if v.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "rotation matrix columns",
            expected: n,
            found: v.cols(),
        });
    }
    let mut dev: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let g: f64 = (0..n).map(|r| v.row(r)[a] * v.row(r)[b]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            dev = dev.max((g - target).abs());
        }
    }
    if dev <= ORTHOGONALITY_TOL {
        Ok(())
    } else {
        Err(Error::NotOrthogonal { deviation: dev })
    }
}

/// Haar-like random orthogonal matrix: Gram–Schmidt (applied twice) on a gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect())
            .collect();
        let mut ok = true;
        for k in 0..n {
            for _ in 0..2 {
                for j in 0..k {
                    let c = dot(&cols[k], &cols[j]);
                    let (head, tail) = cols.split_at_mut(k);
                    for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                        *x -= c * y;
                    }
                }
            }
            let norm = l2(&cols[k]);
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols[k].iter_mut().for_each(|x| *x /= norm);
        }
        if ok {
            let mut data = vec![0.0; n * n];
            for (k, c) in cols.iter().enumerate() {
                for (r, x) in c.iter().enumerate() {
                    data[r * n + k] = *x;
                }
            }
            return Matrix::from_flat(n, n, data).expect("square");
        }
    }
}

/// Lower estimate of `‖M‖_{p→1} = max_{‖u‖_p ≤ 1} ‖Mu‖₁` by alternating maximization
/// (`s = sign(Mu)`, then `u` = dual direction of `Mᵀs`) from random starts.
/// Diagnostic only; never an upper bound.
pub fn operator_norm_p_to_1_lower(mat: &Matrix, p: f64, starts: usize, seed: u64) -> f64 {
    let (rows, cols) = (mat.rows(), mat.cols());
    let mut rng = stream_rng(seed, 0);
    let mut best: f64 = 0.0;
    for start in 0..starts.max(1) {
        let mut s: Vec<f64> = if start == 0 {
            vec![1.0; rows]
        } else {
            (0..rows).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
        };
        let mut last = f64::NEG_INFINITY;
        for _ in 0..200 {
            let mts: Vec<f64> = (0..cols).map(|k| (0..rows).map(|r| mat.row(r)[k] * s[r]).sum()).collect();
            let (u, _) = dual_direction(&mts, p);
            let mu = mat.mul_vec(&u);
            let val = l1(&mu);
            best = best.max(val);
            if val <= last + 1e-15 {
                break;
            }
            last = val;
            for (si, x) in s.iter_mut().zip(&mu) {
                *si = if *x >= 0.0 { 1.0 } else { -1.0 };
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_orthogonal_passes_check() {
        let mut rng = stream_rng(1, 0);
        for n in 1..8 {
            check_orthogonal(&random_orthogonal(n, &mut rng)).unwrap();
        }
        let bad = Matrix::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).unwrap();
        assert_eq!(check_orthogonal(&bad).unwrap_err().code(), "not_orthogonal");
    }

    #[test]
    fn p1_lower_is_max_column_norm() {
        let m = Matrix::from_rows(&[vec![1.0, -2.0], vec![3.0, 0.5]]).unwrap();
        // p = 1: maximum column 1-norm = 4
        assert!((operator_norm_p_to_1_lower(&m, 1.0, 5, 0) - 4.0).abs() < 1e-12);
    }
}
