//! Small dense vector helpers shared by the geometric and statistical code.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Hölder conjugate `p / (p - 1)`; `p = 1` maps to infinity.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `‖v‖_q` for `q >= 1`, including `q = ∞`.
pub fn p_norm(v: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        linf(v)
    } else if q == 1.0 {
        l1(v)
    } else if q == 2.0 {
        l2(v)
    } else {
        // scale by the max entry so large exponents do not overflow
        let scale = linf(v);
        if scale == 0.0 {
            return 0.0;
        }
        scale * v.iter().map(|x| (x.abs() / scale).powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `(mean |v|^p)^(1/p)`, the empirical L^p norm used by sensitivities.
pub fn power_mean(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let n = v.len() as f64;
    if p == 1.0 {
        v.iter().map(|x| x.abs()).sum::<f64>() / n
    } else if p == 2.0 {
        (v.iter().map(|x| x * x).sum::<f64>() / n).sqrt()
    } else {
        (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
    }
}

/// Maximizer of `⟨a, u⟩` over the unit `p`-ball, and the attained value `‖a‖_{p'}`.
pub fn dual_direction(a: &[f64], p: f64) -> (Vec<f64>, f64) {
    let q = conjugate_exponent(p);
    let norm = p_norm(a, q);
    let mut u = vec![0.0; a.len()];
    if norm == 0.0 {
        return (u, 0.0);
    }
    if q.is_infinite() {
        let (j, _) = a
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, x)| if x.abs() > best.1 { (i, x.abs()) } else { best });
        u[j] = a[j].signum();
    } else if p.is_infinite() {
        for (ui, ai) in u.iter_mut().zip(a) {
            *ui = if *ai == 0.0 { 0.0 } else { ai.signum() };
        }
    } else {
        for (ui, ai) in u.iter_mut().zip(a) {
            *ui = ai.signum() * (ai.abs() / norm).powf(q - 1.0);
        }
    }
    (u, norm)
}
