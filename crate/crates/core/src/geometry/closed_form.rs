use serde::{Deserialize, Serialize};

use super::opnorm::check_orthogonal;
use super::{RadEstimate, RadMethod};
use crate::error::{Error, Result};
use crate::model::Matrix;
use crate::norms::{conjugate_exponent, l2, p_norm};

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("must be >= 1, got {p}")))
    }
}

fn check_mu(mu: &[f64], m: usize) -> Result<()> {
    if mu.len() != m {
        return Err(Error::DimensionMismatch {
            context: "semi-axes",
            expected: m,
            found: mu.len(),
        });
    }
    if let Some(bad) = mu.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::invalid("mu", format!("semi-axes must be positive and finite, got {bad}")));
    }
    Ok(())
}

/// `R(E_p(μ)) = ‖μ‖_{p'} / m`, exact.
pub fn ellipse_rademacher(mu: &[f64], p: f64, m: usize) -> Result<RadEstimate> {
    check_p(p)?;
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    check_mu(mu, m)?;
    let v = p_norm(mu, conjugate_exponent(p)) / m as f64;
    Ok(RadEstimate::new(v, RadMethod::ClosedForm, m))
}

/// `(1/m) max_i ‖μ_i‖_{p'}` for a union of axis-aligned ellipses (exact for such unions).
pub fn union_ellipse_bound(mus: &[Vec<f64>], p: f64, m: usize) -> Result<RadEstimate> {
    if mus.is_empty() {
        return Err(Error::Empty("ellipse list"));
    }
    let mut best: f64 = 0.0;
    for mu in mus {
        best = best.max(ellipse_rademacher(mu, p, m)?.value);
    }
    Ok(RadEstimate::new(best, RadMethod::ClosedForm, m))
}

/// `{V Λ u : ‖u‖_p <= 1}` with `Λ = diag(μ)` and orthogonal `V` (given as rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotatedEllipse {
    pub v: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
}

impl RotatedEllipse {
    pub fn axis_aligned(mu: Vec<f64>) -> Self {
        let m = mu.len();
        let v = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        RotatedEllipse { v, mu }
    }

    pub fn matrix(&self) -> Result<Matrix> {
        Matrix::from_rows(&self.v)
    }

    fn validate(&self, m: usize) -> Result<Matrix> {
        check_mu(&self.mu, m)?;
        let v = self.matrix()?;
        if v.rows() != m {
            return Err(Error::DimensionMismatch {
                context: "rotation matrix rows",
                expected: m,
                found: v.rows(),
            });
        }
        check_orthogonal(&v)?;
        Ok(v)
    }

    fn is_identity(v: &Matrix) -> bool {
        (0..v.rows()).all(|i| v.row(i).iter().enumerate().all(|(j, &x)| x == if i == j { 1.0 } else { 0.0 }))
    }

    /// `VΛ`, whose columns are `μ_k V_k`.
    pub fn scaled(&self) -> Result<Matrix> {
        let v = self.matrix()?;
        let mut out = v.clone();
        for r in 0..v.rows() {
            for (x, mu) in out.row_mut(r).iter_mut().zip(&self.mu) {
                *x *= mu;
            }
        }
        Ok(out)
    }
}

/// `(‖VΛ‖_{p→1} or its over-estimate, exact?)` for one component.
fn component_norm(c: &RotatedEllipse, p: f64, m: usize) -> Result<(f64, bool)> {
    let v = c.validate(m)?;
    let q = conjugate_exponent(p);
    if RotatedEllipse::is_identity(&v) {
        return Ok((p_norm(&c.mu, q), true));
    }
    // ‖VΛu‖₁ <= Σ_k |u_k| μ_k ‖V_k‖₁ <= ‖u‖_p ‖(μ_k ‖V_k‖₁)_k‖_{p'}; equality at p = 1.
    let a: Vec<f64> = (0..m)
        .map(|k| c.mu[k] * (0..m).map(|r| v.row(r)[k].abs()).sum::<f64>())
        .collect();
    Ok((p_norm(&a, q), p == 1.0))
}

/// `(1/m) max_i ‖V_i Λ_i‖_{p→1}` for a union of rotated ellipses. Exact when every
/// `V_i = I` or `p = 1`; otherwise the Hölder over-estimate (certified upper bound).
pub fn rotated_union_bound(components: &[RotatedEllipse], p: f64, m: usize) -> Result<RadEstimate> {
    check_p(p)?;
    if components.is_empty() {
        return Err(Error::Empty("ellipse list"));
    }
    let mut best: f64 = 0.0;
    let mut exact = true;
    for c in components {
        let (n, e) = component_norm(c, p, m)?;
        best = best.max(n);
        exact &= e;
    }
    let method = if exact { RadMethod::ClosedForm } else { RadMethod::CertifiedUpper };
    Ok(RadEstimate::new(best / m as f64, method, m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterComponent {
    pub center: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
}

/// Clustered union `∪_i (c_i + V_i Λ_i B_p)`:
/// `(1/m) max_i ‖V_i Λ_i‖_{p→1} + max_i ‖c_i‖₂ √(2 ln l) / m`.
pub fn cluster_bound(components: &[ClusterComponent], p: f64, m: usize) -> Result<RadEstimate> {
    if components.is_empty() {
        return Err(Error::Empty("cluster list"));
    }
    let shapes: Vec<RotatedEllipse> = components
        .iter()
        .map(|c| RotatedEllipse {
            v: c.v.clone(),
            mu: c.mu.clone(),
        })
        .collect();
    let shape = rotated_union_bound(&shapes, p, m)?;
    let mut max_center: f64 = 0.0;
    for c in components {
        if c.center.len() != m {
            return Err(Error::DimensionMismatch {
                context: "cluster center",
                expected: m,
                found: c.center.len(),
            });
        }
        max_center = max_center.max(l2(&c.center));
    }
    let l = components.len() as f64;
    let displacement = max_center * (2.0 * l.ln()).sqrt() / m as f64;
    Ok(RadEstimate::new(shape.value + displacement, RadMethod::CertifiedUpper, m).with_note(format!(
        "shape term {}, displacement term {}",
        shape.value, displacement
    )))
}

/// `(R/(2·2^{1/p}), R)`: lower and upper magnitude bounds for a class whose worst
/// empirical `p`-sensitivity is `R`.
pub fn crude_bounds(r: f64, p: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid("r", "must be nonnegative and finite"));
    }
    Ok((r / (2.0 * 2f64.powf(1.0 / p)), r))
}

/// `sup {⟨σ, x⟩ : x >= 0, ‖x‖_p <= radius} = radius · ‖σ₊‖_{p'}`.
pub fn positive_orthant_ball_sup(sigma: &[f64], radius: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if !(radius >= 0.0) {
        return Err(Error::invalid("radius", "must be nonnegative"));
    }
    let plus: Vec<f64> = sigma.iter().map(|s| s.max(0.0)).collect();
    Ok(radius * p_norm(&plus, conjugate_exponent(p)))
}

/// `max_i ‖row_i‖₂ · √(2 ln N) / m` for `N` rows of length `m`.
pub fn massart_bound(rows: &Matrix) -> Result<f64> {
    if rows.rows() == 0 || rows.cols() == 0 {
        return Err(Error::Empty("point set"));
    }
    let max_norm = rows.iter_rows().map(l2).fold(0.0, f64::max);
    Ok(max_norm * (2.0 * (rows.rows() as f64).ln()).sqrt() / rows.cols() as f64)
}

/// `(1/m) · sup_w ‖w - Q(w)‖ · √(Σ_k k(x_k, x_k))` for generalized-linear classes.
pub fn kernel_sensitivity_class_bound(sup_weight_sensitivity: f64, gram_diagonal: &[f64]) -> Result<RadEstimate> {
    if gram_diagonal.is_empty() {
        return Err(Error::Empty("gram diagonal"));
    }
    if gram_diagonal.iter().any(|&g| !(g >= 0.0 && g.is_finite())) {
        return Err(Error::invalid("gram_diagonal", "entries must be nonnegative and finite"));
    }
    if !(sup_weight_sensitivity >= 0.0) {
        return Err(Error::invalid("sup_weight_sensitivity", "must be nonnegative"));
    }
    let m = gram_diagonal.len();
    let trace: f64 = gram_diagonal.iter().sum();
    Ok(RadEstimate::new(sup_weight_sensitivity * trace.sqrt() / m as f64, RadMethod::CertifiedUpper, m)
        .with_note("uses the 1/m scaling of the final proof step; the displayed statement carries 1/sqrt(m) instead"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrudeDecomposition {
    pub value: f64,
    /// The approximating class is a single function, where the bound holds with equality.
    pub singleton_equality: bool,
}

/// `R̂(ΔH) <= R̂(H) + R̂(H_A)`.
pub fn crude_decomposition_bound(rad_h: f64, rad_ha: f64, ha_is_singleton: bool) -> Result<CrudeDecomposition> {
    if !(rad_h >= 0.0) || !(rad_ha >= 0.0) {
        return Err(Error::invalid("rad", "complexities must be nonnegative"));
    }
    Ok(CrudeDecomposition {
        value: rad_h + rad_ha,
        singleton_equality: ha_is_singleton,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enumerate_sign_patterns, exact_rademacher_rows, random_orthogonal};
    use crate::par::{stream_rng, Execution};
    use rand::Rng;
    use std::f64::consts::SQRT_2;

    #[test]
    fn ellipse_examples() {
        assert_eq!(ellipse_rademacher(&[3.0, 4.0], 2.0, 2).unwrap().value, 2.5);
        assert_eq!(ellipse_rademacher(&[1.0; 4], 2.0, 4).unwrap().value, 0.5);
        assert_eq!(ellipse_rademacher(&[3.0, 4.0], 1.0, 2).unwrap().value, 2.0);
        assert!(ellipse_rademacher(&[3.0, 0.0], 2.0, 2).is_err());
        assert!(ellipse_rademacher(&[3.0], 2.0, 2).is_err());
    }

    #[test]
    fn union_examples() {
        let one = union_ellipse_bound(&[vec![3.0, 4.0]], 2.0, 2).unwrap();
        assert_eq!(one.value, 2.5);
        let two = union_ellipse_bound(&[vec![3.0, 4.0], vec![5.0, 1.0]], 2.0, 2).unwrap();
        assert!((two.value - 26f64.sqrt() / 2.0).abs() < 1e-15);
        let three = union_ellipse_bound(&[vec![3.0, 4.0], vec![5.0, 1.0], vec![0.1, 0.1]], 2.0, 2).unwrap();
        assert_eq!(two.value, three.value);
        assert!(union_ellipse_bound(&[], 2.0, 2).is_err());
    }

    #[test]
    fn rotated_examples() {
        let c = SQRT_2 / 2.0;
        let rot = RotatedEllipse {
            v: vec![vec![c, -c], vec![c, c]],
            mu: vec![2.0, 1.0],
        };
        let r = rotated_union_bound(std::slice::from_ref(&rot), 1.0, 2).unwrap();
        assert!((r.value - SQRT_2).abs() < 1e-12);
        assert_eq!(r.method, RadMethod::ClosedForm);
        assert_eq!(rotated_union_bound(&[rot], 2.0, 2).unwrap().method, RadMethod::CertifiedUpper);
        let mus = vec![vec![3.0, 4.0], vec![5.0, 1.0]];
        for p in [1.0, 1.5, 2.0, 3.0] {
            let comps: Vec<_> = mus.iter().cloned().map(RotatedEllipse::axis_aligned).collect();
            assert_eq!(
                rotated_union_bound(&comps, p, 2).unwrap().value,
                union_ellipse_bound(&mus, p, 2).unwrap().value
            );
        }
        let skew = RotatedEllipse {
            v: vec![vec![1.0, 0.5], vec![0.0, 1.0]],
            mu: vec![1.0, 1.0],
        };
        assert_eq!(rotated_union_bound(&[skew], 2.0, 2).unwrap_err().code(), "not_orthogonal");
    }

    #[test]
    fn rotated_dominates_numeric_operator_norm() {
        let mut rng = stream_rng(21, 0);
        for i in 0..50 {
            let m = rng.random_range(2..=6);
            let p = [1.0, 1.5, 2.0, 3.0][i % 4];
            let v = random_orthogonal(m, &mut rng);
            let mu: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..2.0)).collect();
            let comp = RotatedEllipse { v: v.to_rows(), mu };
            let bound = rotated_union_bound(std::slice::from_ref(&comp), p, m).unwrap().value * m as f64;
            let lower = crate::geometry::operator_norm_p_to_1_lower(&comp.scaled().unwrap(), p, 20, i as u64);
            assert!(bound >= lower - 1e-9, "instance {i}: {bound} < {lower}");
        }
    }

    #[test]
    fn cluster_examples() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let comps = vec![
            ClusterComponent { center: vec![0.0, 0.0], v: id.clone(), mu: vec![1.0, 1.0] },
            ClusterComponent { center: vec![1.0, 1.0], v: id.clone(), mu: vec![1.0, 1.0] },
        ];
        let b = cluster_bound(&comps, 2.0, 2).unwrap();
        assert!((b.value - 1.539_661_4).abs() < 1e-7, "{}", b.value);
        let single = cluster_bound(&comps[..1], 2.0, 2).unwrap();
        assert_eq!(single.value, ellipse_rademacher(&[1.0, 1.0], 2.0, 2).unwrap().value);
        let shifted: Vec<_> = comps
            .iter()
            .map(|c| ClusterComponent { center: c.center.iter().map(|x| x + 0.5).collect(), ..c.clone() })
            .collect();
        let bs = cluster_bound(&shifted, 2.0, 2).unwrap();
        let shape = rotated_union_bound(&[RotatedEllipse::axis_aligned(vec![1.0, 1.0])], 2.0, 2).unwrap().value;
        assert!((bs.value - shape - 1.5 * SQRT_2 * (2.0 * 2f64.ln()).sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn crude_examples() {
        let (lo, hi) = crude_bounds(1.0, 2.0).unwrap();
        assert!((lo - 0.353_553_390_593_273_7).abs() < 1e-15);
        assert_eq!(hi, 1.0);
        assert_eq!(crude_bounds(1.0, 1.0).unwrap(), (0.25, 1.0));
        assert_eq!(crude_bounds(0.0, 2.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn orthant_examples_and_anchor() {
        assert_eq!(positive_orthant_ball_sup(&[1.0, -1.0], 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(positive_orthant_ball_sup(&[-1.0, -1.0], 3.0, 2.0).unwrap(), 0.0);
        assert!((positive_orthant_ball_sup(&[1.0, 1.0], SQRT_2, 2.0).unwrap() - 2.0).abs() < 1e-15);
        // m = 2, p = 2, R = 1: radius R·m^{1/p} = √2, exact value (2 + 2√2)/8
        let v = enumerate_sign_patterns(2, Execution::Sequential, |s| positive_orthant_ball_sup(s, SQRT_2, 2.0).unwrap())
            .unwrap()
            / 2.0;
        assert!((v - (2.0 + 2.0 * SQRT_2) / 8.0).abs() < 1e-15);
    }

    #[test]
    fn massart_examples() {
        assert_eq!(massart_bound(&Matrix::from_rows(&[vec![3.0, 4.0]]).unwrap()).unwrap(), 0.0);
        let two = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert!((massart_bound(&two).unwrap() - 0.832_554_611_157_697_7).abs() < 1e-12);
        let mut rng = stream_rng(5, 0);
        for _ in 0..100 {
            let m = rng.random_range(1..=8);
            let n = rng.random_range(1..=6);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let mat = Matrix::from_rows(&rows).unwrap();
            let exact = exact_rademacher_rows(&mat, Execution::Sequential).unwrap().value;
            assert!(exact <= massart_bound(&mat).unwrap() + 1e-12);
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_sensitivity_class_bound(0.0, &[4.0, 9.0]).unwrap().value, 0.0);
        let b = kernel_sensitivity_class_bound(0.5, &[1.0, 1.0]).unwrap();
        assert!((b.value - 0.353_553_390_593_273_7).abs() < 1e-15);
        assert!(b.note.unwrap().contains("1/sqrt(m)"));
        assert!(kernel_sensitivity_class_bound(0.5, &[-1.0]).is_err());
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(crude_decomposition_bound(0.0, 0.0, false).unwrap().value, 0.0);
        assert!((crude_decomposition_bound(0.2, 0.05, false).unwrap().value - 0.25).abs() < 1e-15);
        assert!(crude_decomposition_bound(0.2, 0.0, true).unwrap().singleton_equality);
    }

    #[test]
    fn monotone_in_mu() {
        let mut rng = stream_rng(8, 0);
        for _ in 0..100 {
            let m = rng.random_range(1..=6);
            let p = rng.random_range(1.0..4.0);
            let mu: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..2.0)).collect();
            let mut bigger = mu.clone();
            let k = rng.random_range(0..m);
            bigger[k] += rng.random_range(0.0..1.0);
            let a = ellipse_rademacher(&mu, p, m).unwrap().value;
            let b = ellipse_rademacher(&bigger, p, m).unwrap().value;
            assert!(b >= a);
            let ua = union_ellipse_bound(&[mu.clone(), vec![1.0; m]], p, m).unwrap().value;
            let ub = union_ellipse_bound(&[bigger.clone(), vec![1.0; m]], p, m).unwrap().value;
            assert!(ub >= ua);
            let v = random_orthogonal(m, &mut rng).to_rows();
            let ca = cluster_bound(&[ClusterComponent { center: vec![0.1; m], v: v.clone(), mu }], p, m).unwrap();
            let cb = cluster_bound(&[ClusterComponent { center: vec![0.1; m], v, mu: bigger }], p, m).unwrap();
            assert!(cb.value >= ca.value);
        }
    }
}
