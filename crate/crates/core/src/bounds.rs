//! Itemized right-hand sides of the generalization guarantees.
//!
//! Every calculator returns a [`BoundReport`] whose `value` is the sum of its
//! terms. Estimation is the caller's job: error and complexity inputs arrive as
//! [`Quantity`] values that remember whether they are certified (exact, closed
//! form or a proven upper bound) or Monte Carlo estimates.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{ensure_delta, ensure_sample_size, Error, Result};
use crate::geometry::{RadEstimate, RadMethod};

/// Tolerance of the `value == Σ terms` check.
pub const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

impl Term {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Term {
            label: label.into(),
            value,
        }
    }
}

/// A scalar input together with how trustworthy it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    #[serde(default = "yes")]
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_error: Option<f64>,
}

fn yes() -> bool {
    true
}

impl Quantity {
    pub fn certified(value: f64) -> Self {
        Quantity {
            value,
            certified: true,
            standard_error: None,
        }
    }

    pub fn estimated(value: f64, standard_error: f64) -> Self {
        Quantity {
            value,
            certified: false,
            standard_error: Some(standard_error),
        }
    }
}

impl From<f64> for Quantity {
    fn from(value: f64) -> Self {
        Quantity::certified(value)
    }
}

impl From<&RadEstimate> for Quantity {
    fn from(r: &RadEstimate) -> Self {
        match r.method {
            RadMethod::MonteCarlo { standard_error, .. } => Quantity::estimated(r.value, standard_error),
            _ => Quantity::certified(r.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub terms: Vec<Term>,
    pub delta: f64,
    pub certified: bool,
    /// SHA-256 of the canonical JSON of every input.
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    fn build(name: &str, terms: Vec<Term>, delta: f64, certified: bool, inputs: Value) -> Self {
        BoundReport {
            name: name.to_owned(),
            value: terms.iter().map(|t| t.value).sum(),
            terms,
            delta,
            certified,
            inputs_digest: digest(&inputs),
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.label == label).map(|t| t.value)
    }

    /// Checks `value = Σ terms` and `0 < delta < 1`.
    pub fn verify(&self) -> Result<()> {
        ensure_delta(self.delta)?;
        let sum: f64 = self.terms.iter().map(|t| t.value).sum();
        if (sum - self.value).abs() > SUM_TOLERANCE || !sum.is_finite() {
            return Err(Error::InconsistentReport {
                name: self.name.clone(),
                sum,
                value: self.value,
            });
        }
        Ok(())
    }
}

/// Hex SHA-256 of a JSON value; object keys serialize in sorted order.
pub fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("json values always serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// `c · √(ln(arg) / 2m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceTerm {
    pub c: f64,
    pub arg: f64,
    pub m: usize,
}

impl ConfidenceTerm {
    pub fn value(&self) -> Result<f64> {
        hoeffding_term(self.c, self.arg, self.m)
    }
}

pub fn hoeffding_term(c: f64, arg: f64, m: usize) -> Result<f64> {
    ensure_sample_size(m)?;
    if !(arg >= 1.0 && arg.is_finite()) {
        return Err(Error::invalid("arg", format!("log argument must be >= 1, got {arg}")));
    }
    if !(c >= 0.0) {
        return Err(Error::invalid("c", "multiplier must be nonnegative"));
    }
    Ok(c * (arg.ln() / (2.0 * m as f64)).sqrt())
}

fn nonneg(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be nonnegative and finite, got {v}")))
    }
}

fn common(rho: f64, m: usize, delta: f64) -> Result<()> {
    ensure_delta(delta)?;
    ensure_sample_size(m)?;
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("rho", "must be positive"))
    }
}

fn q_json(q: &Quantity) -> Value {
    json!({ "value": q.value, "certified": q.certified, "standard_error": q.standard_error })
}

/// `êrr(f) + 2ρ R̂(H_t) + 3√(ln(2/δ) / 2m)`.
pub fn uniform_restricted_bound(emp_err: f64, rad_ht: Quantity, rho: f64, m: usize, delta: f64) -> Result<BoundReport> {
    common(rho, m, delta)?;
    nonneg("emp_err", emp_err)?;
    nonneg("rad_ht", rad_ht.value)?;
    let terms = vec![
        Term::new("empirical_error", emp_err),
        Term::new("rademacher_term", 2.0 * rho * rad_ht.value),
        Term::new("confidence_term", hoeffding_term(3.0, 2.0 / delta, m)?),
    ];
    let inputs = json!({"emp_err": emp_err, "rad_ht": q_json(&rad_ht), "rho": rho, "m": m, "delta": delta});
    Ok(BoundReport::build("uniform_restricted", terms, delta, rad_ht.certified, inputs))
}

/// `êrr(f) + 2ρ R̂(Ĥ_{t_k+ε_u}) + 3√(ln(1/w_k) / 2m) + 3√(ln(4/δ) / 2m)`.
pub fn srm_uniform_bound(
    emp_err: f64,
    rad_ht_k: Quantity,
    w_k: f64,
    rho: f64,
    m: usize,
    delta: f64,
) -> Result<BoundReport> {
    common(rho, m, delta)?;
    nonneg("emp_err", emp_err)?;
    nonneg("rad_ht_k", rad_ht_k.value)?;
    if !(w_k > 0.0 && w_k <= 1.0) {
        return Err(Error::invalid("w_k", format!("must lie in (0, 1], got {w_k}")));
    }
    let terms = vec![
        Term::new("empirical_error", emp_err),
        Term::new("rademacher_term", 2.0 * rho * rad_ht_k.value),
        Term::new("weight_term", hoeffding_term(3.0, 1.0 / w_k, m)?),
        Term::new("confidence_term", hoeffding_term(3.0, 4.0 / delta, m)?),
    ];
    let inputs = json!({"emp_err": emp_err, "rad_ht_k": q_json(&rad_ht_k), "w_k": w_k, "rho": rho, "m": m, "delta": delta});
    Ok(BoundReport::build("srm_uniform", terms, delta, rad_ht_k.certified, inputs))
}

/// Error constituents of the three simultaneous guarantees of the constrained ERM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointErrors {
    /// `min{err(A f_t*), err(g_t*)}`.
    pub min_approx_err: Quantity,
    /// `err(f_t*)`.
    pub err_f_star: Quantity,
}

/// Returns `[approx_vs_best, approx_predictor, full_predictor]`:
/// - `min{err(Af_t*), err(g_t*)} + 2ρ R̂(H_A) + 4√(ln(9/δ)/2m)`
/// - `err(f_t*) + ρt + 2ρ R̂(H_A) + 4√(ln(9/δ)/2m)`
/// - `err(f_t*) + 2ρt + 2ρ R̂(H_A) + 4√(ln(9/δ)/2m)`
pub fn joint_bounds(
    errs: JointErrors,
    rad_ha: Quantity,
    rho: f64,
    t: f64,
    m: usize,
    delta: f64,
) -> Result<[BoundReport; 3]> {
    common(rho, m, delta)?;
    nonneg("t", t)?;
    nonneg("rad_ha", rad_ha.value)?;
    nonneg("min_approx_err", errs.min_approx_err.value)?;
    nonneg("err_f_star", errs.err_f_star.value)?;
    let rad = 2.0 * rho * rad_ha.value;
    let conf = hoeffding_term(4.0, 9.0 / delta, m)?;
    let inputs = json!({
        "min_approx_err": q_json(&errs.min_approx_err),
        "err_f_star": q_json(&errs.err_f_star),
        "rad_ha": q_json(&rad_ha), "rho": rho, "t": t, "m": m, "delta": delta,
    });
    let approx_vs_best = BoundReport::build(
        "joint_approx_vs_best",
        vec![
            Term::new("min_best_error", errs.min_approx_err.value),
            Term::new("rademacher_term", rad),
            Term::new("confidence_term", conf),
        ],
        delta,
        rad_ha.certified && errs.min_approx_err.certified,
        inputs.clone(),
    );
    let certified = rad_ha.certified && errs.err_f_star.certified;
    let approx = BoundReport::build(
        "joint_approx_predictor",
        vec![
            Term::new("best_error", errs.err_f_star.value),
            Term::new("sensitivity_term", rho * t),
            Term::new("rademacher_term", rad),
            Term::new("confidence_term", conf),
        ],
        delta,
        certified,
        inputs.clone(),
    );
    let full = BoundReport::build(
        "joint_full_predictor",
        vec![
            Term::new("best_error", errs.err_f_star.value),
            Term::new("sensitivity_term", 2.0 * rho * t),
            Term::new("rademacher_term", rad),
            Term::new("confidence_term", conf),
        ],
        delta,
        certified,
        inputs,
    );
    Ok([approx_vs_best, approx, full])
}

/// `(t, err(f_t*))` pair on the caller's threshold grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdError {
    pub t: f64,
    pub err_star: Quantity,
}

/// Sensitivity-regularized guarantee. Without `epsilon_u` (known sensitivity):
/// `inf_t{err(f_t*) + 2ρt} + 2ρ R̂(H_A) + 4√(ln(8/δ)/2m)`.
/// With `epsilon_u` (estimated sensitivity):
/// `inf_t{err(f_t*) + 2ρt} + 2ρ R̂(H_A) + (4+ρ)√(ln(16/δ)/2m) + ρ ε_u`.
/// The infimum runs over the supplied grid; ties keep the first entry.
pub fn regularized_bound(
    err_star_t: &[ThresholdError],
    rho: f64,
    rad_ha: Quantity,
    m: usize,
    delta: f64,
    epsilon_u: Option<f64>,
) -> Result<BoundReport> {
    common(rho, m, delta)?;
    nonneg("rad_ha", rad_ha.value)?;
    if err_star_t.is_empty() {
        return Err(Error::Empty("threshold grid"));
    }
    let mut best = (0, f64::INFINITY);
    for (i, e) in err_star_t.iter().enumerate() {
        nonneg("t", e.t)?;
        nonneg("err_star", e.err_star.value)?;
        let v = e.err_star.value + 2.0 * rho * e.t;
        if v < best.1 {
            best = (i, v);
        }
    }
    let chosen = err_star_t[best.0];
    let mut terms = vec![
        Term::new("inf_error_plus_sensitivity", best.1),
        Term::new("rademacher_term", 2.0 * rho * rad_ha.value),
    ];
    let name = match epsilon_u {
        None => {
            terms.push(Term::new("confidence_term", hoeffding_term(4.0, 8.0 / delta, m)?));
            "regularized_known_sensitivity"
        }
        Some(eps) => {
            nonneg("epsilon_u", eps)?;
            terms.push(Term::new("confidence_term", hoeffding_term(4.0 + rho, 16.0 / delta, m)?));
            terms.push(Term::new("estimation_term", rho * eps));
            "regularized_estimated_sensitivity"
        }
    };
    let grid: Vec<Value> = err_star_t
        .iter()
        .map(|e| json!({"t": e.t, "err_star": q_json(&e.err_star)}))
        .collect();
    let inputs = json!({"grid": grid, "rho": rho, "rad_ha": q_json(&rad_ha), "m": m, "delta": delta, "epsilon_u": epsilon_u});
    let certified = rad_ha.certified && chosen.err_star.certified;
    Ok(BoundReport::build(name, terms, delta, certified, inputs).with_note(format!("infimum attained at t = {}", chosen.t)))
}

/// Gap between the λ-regularized and the constrained learner:
/// `4ρ R̂(H_A) + 6√(ln(8/δ)/2m) + 2λ ε_u`. Without `epsilon_u` the last term is
/// dropped, which is the analytic-sensitivity variant.
pub fn lambda_equivalence_bound(
    rho: f64,
    rad_ha: Quantity,
    m: usize,
    delta: f64,
    lambda: f64,
    epsilon_u: Option<f64>,
) -> Result<BoundReport> {
    common(rho, m, delta)?;
    nonneg("rad_ha", rad_ha.value)?;
    nonneg("lambda", lambda)?;
    let mut terms = vec![
        Term::new("rademacher_term", 4.0 * rho * rad_ha.value),
        Term::new("confidence_term", hoeffding_term(6.0, 8.0 / delta, m)?),
    ];
    let name = match epsilon_u {
        Some(eps) => {
            nonneg("epsilon_u", eps)?;
            terms.push(Term::new("estimation_term", 2.0 * lambda * eps));
            "lambda_equivalence"
        }
        None => "lambda_equivalence_analytic",
    };
    let inputs = json!({"rho": rho, "rad_ha": q_json(&rad_ha), "m": m, "delta": delta, "lambda": lambda, "epsilon_u": epsilon_u});
    Ok(BoundReport::build(name, terms, delta, rad_ha.certified, inputs))
}

/// Expectation form for stochastic operators:
/// `E_ω êrr(A_ω f) + ρ E_ω D_ω(f) + 2ρ E_ω R(H_ω) + √(ln(1/δ)/2m)`.
pub fn stochastic_bound(
    exp_emp_err: Quantity,
    exp_sensitivity: Quantity,
    exp_rad: Quantity,
    rho: f64,
    m: usize,
    delta: f64,
) -> Result<BoundReport> {
    stochastic_terms(exp_emp_err, exp_sensitivity, exp_rad, rho, m, delta, 1.0, 1.0 / delta, "stochastic_expected")
}

/// Single fixed `ω`: `êrr(A_ω f) + ρ D_ω(f) + 2ρ R̂(H_ω) + 3√(ln(2/δ)/2m)`.
pub fn stochastic_fixed_omega_bound(
    emp_err: Quantity,
    sensitivity: Quantity,
    rad: Quantity,
    rho: f64,
    m: usize,
    delta: f64,
) -> Result<BoundReport> {
    stochastic_terms(emp_err, sensitivity, rad, rho, m, delta, 3.0, 2.0 / delta, "stochastic_fixed_omega")
}

#[allow(clippy::too_many_arguments)]
fn stochastic_terms(
    err: Quantity,
    sens: Quantity,
    rad: Quantity,
    rho: f64,
    m: usize,
    delta: f64,
    c: f64,
    arg: f64,
    name: &str,
) -> Result<BoundReport> {
    common(rho, m, delta)?;
    nonneg("emp_err", err.value)?;
    nonneg("sensitivity", sens.value)?;
    nonneg("rad", rad.value)?;
    let terms = vec![
        Term::new("empirical_error", err.value),
        Term::new("sensitivity_term", rho * sens.value),
        Term::new("rademacher_term", 2.0 * rho * rad.value),
        Term::new("confidence_term", hoeffding_term(c, arg, m)?),
    ];
    let inputs = json!({"emp_err": q_json(&err), "sensitivity": q_json(&sens), "rad": q_json(&rad), "rho": rho, "m": m, "delta": delta});
    let certified = err.certified && sens.certified && rad.certified;
    Ok(BoundReport::build(name, terms, delta, certified, inputs))
}

/// Per-threshold constituents of the SRM guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrmLevel {
    pub err_star: Quantity,
    pub rad: Quantity,
    pub w: f64,
}

/// `inf_k{err(f_k*) + 2ρ R̂(Ĥ_{t_k+ε_u}) + 3√(ln(1/w_k)/2m)} + 4√(ln(6/δ)/2m)`; ties keep the lowest `k`.
pub fn balcan_guarantee_bound(levels: &[SrmLevel], rho: f64, m: usize, delta: f64) -> Result<BoundReport> {
    common(rho, m, delta)?;
    if levels.is_empty() {
        return Err(Error::Empty("threshold levels"));
    }
    let mut best: Option<(usize, f64, f64, f64)> = None;
    for (k, l) in levels.iter().enumerate() {
        nonneg("err_star", l.err_star.value)?;
        nonneg("rad", l.rad.value)?;
        if !(l.w > 0.0 && l.w <= 1.0) {
            return Err(Error::invalid("w_k", format!("must lie in (0, 1], got {}", l.w)));
        }
        let rad = 2.0 * rho * l.rad.value;
        let wt = hoeffding_term(3.0, 1.0 / l.w, m)?;
        let inner = l.err_star.value + rad + wt;
        if best.is_none_or(|b| inner < b.1 + b.2 + b.3) {
            best = Some((k, l.err_star.value, rad, wt));
        }
    }
    let (k, err, rad, wt) = best.expect("levels nonempty");
    let terms = vec![
        Term::new("best_error", err),
        Term::new("rademacher_term", rad),
        Term::new("weight_term", wt),
        Term::new("confidence_term", hoeffding_term(4.0, 6.0 / delta, m)?),
    ];
    let lv: Vec<Value> = levels
        .iter()
        .map(|l| json!({"err_star": q_json(&l.err_star), "rad": q_json(&l.rad), "w": l.w}))
        .collect();
    let inputs = json!({"levels": lv, "rho": rho, "m": m, "delta": delta});
    let certified = levels[k].err_star.certified && levels[k].rad.certified;
    Ok(BoundReport::build("srm_guarantee", terms, delta, certified, inputs).with_note(format!("infimum attained at k = {}", k + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hoeffding_examples() {
        assert!(close(hoeffding_term(3.0, 40.0, 50).unwrap(), 0.576_193_7, 1e-7));
        assert_eq!(hoeffding_term(3.0, 1.0, 50).unwrap(), 0.0);
        assert!(hoeffding_term(3.0, 40.0, 1 << 50).unwrap() < 1e-6);
        assert!(hoeffding_term(3.0, 0.5, 10).is_err());
        assert!(hoeffding_term(3.0, 2.0, 0).is_err());
        let c = ConfidenceTerm { c: 3.0, arg: 40.0, m: 50 };
        assert_eq!(c.value().unwrap(), hoeffding_term(3.0, 40.0, 50).unwrap());
    }

    #[test]
    fn uniform_restricted_examples() {
        let r = uniform_restricted_bound(0.0, 0.0.into(), 1.0, 50, 0.05).unwrap();
        assert!(close(r.value, 0.576_193_7, 1e-7));
        r.verify().unwrap();
        let a = uniform_restricted_bound(0.1, 0.05.into(), 1.0, 50, 0.05).unwrap();
        let b = uniform_restricted_bound(0.1, 0.1.into(), 1.0, 50, 0.05).unwrap();
        assert!(close(b.term("rademacher_term").unwrap(), 2.0 * a.term("rademacher_term").unwrap(), 1e-15));
        assert!(uniform_restricted_bound(0.0, 0.0.into(), 1.0, 50, 1.5).is_err());
    }

    #[test]
    fn srm_examples() {
        let r = srm_uniform_bound(0.1, 0.0.into(), 1.0, 1.0, 50, 0.05).unwrap();
        assert_eq!(r.term("weight_term"), Some(0.0));
        let r3 = srm_uniform_bound(0.1, 0.0.into(), 0.125, 1.0, 50, 0.05).unwrap();
        assert!(close(r3.term("weight_term").unwrap(), 0.432_608_1, 1e-7));
        let mut last = f64::INFINITY;
        for w in [0.01, 0.1, 0.3, 0.7, 1.0] {
            let v = srm_uniform_bound(0.1, 0.02.into(), w, 1.0, 50, 0.05).unwrap().value;
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn joint_examples() {
        let errs = JointErrors {
            min_approx_err: 0.15.into(),
            err_f_star: 0.2.into(),
        };
        let [best, af, f] = joint_bounds(errs, 0.05.into(), 1.0, 0.1, 50, 0.05).unwrap();
        // 0.2 + 0.2 + 0.1 + 4√(ln 180 / 100)
        assert!(close(f.value, 1.411_522_4, 1e-7), "{}", f.value);
        assert!(close(f.value - af.value, 0.1, 1e-12));
        assert!(close(best.value, 0.15 + 0.1 + 0.911_522_4, 1e-7));
        let [_, af0, f0] = joint_bounds(errs, 0.05.into(), 1.0, 0.0, 50, 0.05).unwrap();
        assert_eq!(af0.value, f0.value);
    }

    #[test]
    fn regularized_examples() {
        let grid = [ThresholdError { t: 0.05, err_star: 0.1.into() }];
        let p3 = regularized_bound(&grid, 1.0, 0.0.into(), 100, 0.05, None).unwrap();
        assert!(close(p3.value, 0.837_192_2, 1e-7), "{}", p3.value);
        let c1 = regularized_bound(&grid, 1.0, 0.0.into(), 100, 0.05, Some(0.0)).unwrap();
        assert!(close(c1.term("confidence_term").unwrap(), hoeffding_term(5.0, 320.0, 100).unwrap(), 1e-15));
        let c2 = regularized_bound(&grid, 1.0, 0.0.into(), 100, 0.05, Some(0.2)).unwrap();
        let c4 = regularized_bound(&grid, 1.0, 0.0.into(), 100, 0.05, Some(0.4)).unwrap();
        assert!(close(c4.term("estimation_term").unwrap(), 2.0 * c2.term("estimation_term").unwrap(), 1e-15));
        let wide = [
            ThresholdError { t: 0.0, err_star: 0.5.into() },
            ThresholdError { t: 0.05, err_star: 0.1.into() },
            ThresholdError { t: 0.3, err_star: 0.0.into() },
        ];
        let r = regularized_bound(&wide, 1.0, 0.0.into(), 100, 0.05, None).unwrap();
        assert!(close(r.term("inf_error_plus_sensitivity").unwrap(), 0.2, 1e-15));
    }

    #[test]
    fn lambda_equivalence_examples() {
        let r = lambda_equivalence_bound(1.0, 0.05.into(), 50, 0.05, 1.0, Some(0.1)).unwrap();
        assert!(close(r.value, 1.751_688_8, 1e-7), "{}", r.value);
        let a = lambda_equivalence_bound(1.0, 0.05.into(), 50, 0.05, 0.0, Some(0.1)).unwrap();
        let b = lambda_equivalence_bound(1.0, 0.05.into(), 50, 0.05, 0.0, Some(9.0)).unwrap();
        assert_eq!(a.value, b.value);
        let p5 = lambda_equivalence_bound(1.0, 0.05.into(), 50, 0.05, 1.0, None).unwrap();
        assert!(close(r.value - p5.value, 0.2, 1e-15));
        assert_eq!(p5.terms.len(), 2);
    }

    #[test]
    fn stochastic_examples() {
        let z = Quantity::certified(0.0);
        let r = stochastic_bound(z, z, z, 1.0, 100, 0.1).unwrap();
        assert!(close(r.value, 0.107_298_3, 1e-7), "{}", r.value);
        let a = stochastic_bound(0.1.into(), 0.1.into(), 0.02.into(), 2.0, 100, 0.1).unwrap();
        let b = stochastic_bound(0.1.into(), 0.3.into(), 0.02.into(), 2.0, 100, 0.1).unwrap();
        assert!(close(b.value - a.value, 2.0 * 0.2, 1e-12));
        let mc = stochastic_bound(Quantity::estimated(0.1, 0.01), z, z, 1.0, 100, 0.1).unwrap();
        assert!(!mc.certified);
        let fixed = stochastic_fixed_omega_bound(0.1.into(), 0.1.into(), 0.02.into(), 2.0, 100, 0.1).unwrap();
        for (x, y) in a.terms.iter().zip(&fixed.terms).take(3) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn balcan_examples() {
        let l1 = SrmLevel { err_star: 0.2.into(), rad: 0.05.into(), w: 0.5 };
        let r = balcan_guarantee_bound(&[l1], 1.0, 50, 0.05).unwrap();
        assert!(close(r.term("confidence_term").unwrap(), 0.875_213_5, 1e-7));
        let dominated = SrmLevel { err_star: 0.4.into(), rad: 0.1.into(), w: 0.25 };
        let r2 = balcan_guarantee_bound(&[l1, dominated], 1.0, 50, 0.05).unwrap();
        assert_eq!(r.value, r2.value);
        assert!(balcan_guarantee_bound(&[], 1.0, 50, 0.05).is_err());
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = uniform_restricted_bound(0.1, 0.05.into(), 1.0, 50, 0.05).unwrap();
        let b = uniform_restricted_bound(0.1, 0.05.into(), 1.0, 50, 0.05).unwrap();
        let c = uniform_restricted_bound(0.1, 0.06.into(), 1.0, 50, 0.05).unwrap();
        assert_eq!(a.inputs_digest, b.inputs_digest);
        assert_ne!(a.inputs_digest, c.inputs_digest);
        assert_eq!(a.inputs_digest.len(), 64);
    }

    #[test]
    fn verify_catches_tampering() {
        let mut r = uniform_restricted_bound(0.1, 0.05.into(), 1.0, 50, 0.05).unwrap();
        r.value += 1e-9;
        assert_eq!(r.verify().unwrap_err().code(), "inconsistent_report");
    }

    #[test]
    fn mc_constituent_clears_certified() {
        let r = uniform_restricted_bound(0.1, Quantity::estimated(0.05, 0.001), 1.0, 50, 0.05).unwrap();
        assert!(!r.certified);
    }
}
