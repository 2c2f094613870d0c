//! Rademacher complexity of sensitivity sets.
//!
//! `R̂(T) = (1/m) E_σ sup_{x ∈ T} ⟨σ, x⟩` for `T ⊂ R^m`. Finite point sets are
//! handled by exhaustive sign enumeration (small `m`) or Monte Carlo; structured
//! sets (ellipses, unions, rotated and clustered unions, orthant balls) have
//! closed forms or certified upper bounds.

mod closed_form;
mod enumerate;
mod model;
mod opnorm;

use serde::{Deserialize, Serialize};

pub use closed_form::{
    cluster_bound, crude_bounds, crude_decomposition_bound, ellipse_rademacher, kernel_sensitivity_class_bound,
    massart_bound, positive_orthant_ball_sup, rotated_union_bound, union_ellipse_bound, ClusterComponent,
    CrudeDecomposition, RotatedEllipse,
};
pub use enumerate::{
    enumerate_sign_patterns, exact_rademacher_pointset, exact_rademacher_rows, mc_rademacher_pointset,
    mc_rademacher_rows, sensitivity_pointset, SensitivityPointSet, EXACT_CAP,
};
pub use model::GeometryModel;
pub use opnorm::{check_orthogonal, operator_norm_p_to_1_lower, random_orthogonal, ORTHOGONALITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadMethod {
    ExactEnumeration,
    MonteCarlo { n_sigma: usize, seed: u64, standard_error: f64 },
    ClosedForm,
    CertifiedUpper,
}

impl RadMethod {
    /// Exact, closed form or a proven upper bound.
    pub fn is_certified(&self) -> bool {
        !matches!(self, RadMethod::MonteCarlo { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadEstimate {
    pub value: f64,
    pub method: RadMethod,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RadEstimate {
    pub(crate) fn new(value: f64, method: RadMethod, m: usize) -> Self {
        RadEstimate {
            value,
            method,
            m,
            note: None,
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn standard_error(&self) -> Option<f64> {
        match self.method {
            RadMethod::MonteCarlo { standard_error, .. } => Some(standard_error),
            _ => None,
        }
    }
}
