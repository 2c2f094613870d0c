use serde::{Deserialize, Serialize};

use super::sample::Matrix;
use crate::error::{Error, Result};
use crate::norms::dot;

/// Explicit finite-dimensional feature map `Φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeatureMap {
    Identity { dim: usize },
    /// Separable powers with a bias: `(1, x, x², …, x^degree)` taken coordinatewise,
    /// so the feature dimension is `1 + input_dim · degree`.
    Polynomial { input_dim: usize, degree: usize },
    /// Gaussian bumps `exp(-‖x - c‖² / (2 width²))`, one per center.
    RadialBasis { centers: Vec<Vec<f64>>, width: f64 },
}

impl FeatureMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            FeatureMap::Identity { dim } if *dim == 0 => Err(Error::invalid("dim", "must be positive")),
            FeatureMap::Polynomial { input_dim, degree } if *input_dim == 0 || *degree == 0 => {
                Err(Error::invalid("degree", "input_dim and degree must be positive"))
            }
            FeatureMap::RadialBasis { centers, width } => {
                if centers.is_empty() {
                    return Err(Error::Empty("radial basis centers"));
                }
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::invalid("width", "must be positive and finite"));
                }
                let d = centers[0].len();
                if d == 0 || centers.iter().any(|c| c.len() != d) {
                    return Err(Error::invalid("centers", "all centers need the same positive dimension"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            FeatureMap::Identity { dim } => *dim,
            FeatureMap::Polynomial { input_dim, .. } => *input_dim,
            FeatureMap::RadialBasis { centers, .. } => centers.first().map_or(0, Vec::len),
        }
    }

    pub fn feature_dim(&self) -> usize {
        match self {
            FeatureMap::Identity { dim } => *dim,
            FeatureMap::Polynomial { input_dim, degree } => 1 + input_dim * degree,
            FeatureMap::RadialBasis { centers, .. } => centers.len(),
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "feature map input",
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Writes `Φ(x)` into `out` (resized to the feature dimension).
    pub fn map_into(&self, x: &[f64], out: &mut Vec<f64>) -> Result<()> {
        self.check_input(x)?;
        out.clear();
        match self {
            FeatureMap::Identity { .. } => out.extend_from_slice(x),
            FeatureMap::Polynomial { degree, .. } => {
                out.push(1.0);
                for k in 1..=*degree as i32 {
                    out.extend(x.iter().map(|v| v.powi(k)));
                }
            }
            FeatureMap::RadialBasis { centers, width } => {
                let denom = 2.0 * width * width;
                out.extend(centers.iter().map(|c| {
                    let d2: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    (-d2 / denom).exp()
                }));
            }
        }
        Ok(())
    }

    pub fn map(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.feature_dim());
        self.map_into(x, &mut out)?;
        Ok(out)
    }

    /// Row-wise `Φ(X)`.
    pub fn feature_matrix(&self, inputs: &Matrix) -> Result<Matrix> {
        if let FeatureMap::Identity { .. } = self {
            self.check_input(inputs.row(0))?;
            return Ok(inputs.clone());
        }
        let d = self.feature_dim();
        let mut data = Vec::with_capacity(inputs.rows() * d);
        let mut buf = Vec::with_capacity(d);
        for x in inputs.iter_rows() {
            self.map_into(x, &mut buf)?;
            data.extend_from_slice(&buf);
        }
        Matrix::from_flat(inputs.rows(), d, data)
    }
}

/// Generalized-linear predictor `f(x) = ⟨w, Φ(x)⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hypothesis {
    weights: Vec<f64>,
    feature_map: FeatureMap,
}

impl Hypothesis {
    pub fn new(weights: Vec<f64>, feature_map: FeatureMap) -> Result<Self> {
        feature_map.validate()?;
        if weights.len() != feature_map.feature_dim() {
            return Err(Error::DimensionMismatch {
                context: "hypothesis weights",
                expected: feature_map.feature_dim(),
                found: weights.len(),
            });
        }
        crate::error::ensure_finite(&weights, "hypothesis weights")?;
        Ok(Hypothesis { weights, feature_map })
    }

    /// Linear predictor on raw inputs.
    pub fn linear(weights: Vec<f64>) -> Self {
        let dim = weights.len();
        Hypothesis {
            weights,
            feature_map: FeatureMap::Identity { dim },
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.feature_map
    }

    /// Same feature map, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Hypothesis::new(weights, self.feature_map.clone())
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let phi = self.feature_map.map(x)?;
        Ok(dot(&self.weights, &phi))
    }

    /// Prediction from precomputed features; no dimension check beyond debug builds.
    pub fn predict_features(&self, phi: &[f64]) -> f64 {
        dot(&self.weights, phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_examples() {
        assert_eq!(Hypothesis::linear(vec![0.0, 0.0]).predict(&[5.0, -3.0]).unwrap(), 0.0);
        assert_eq!(Hypothesis::linear(vec![1.0, 2.0]).predict(&[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(Hypothesis::linear(vec![1.0]).predict(&[-2.0]).unwrap(), -2.0);
    }

    #[test]
    fn predict_dimension_mismatch() {
        let err = Hypothesis::linear(vec![1.0, 2.0]).predict(&[1.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1, .. }));
    }

    #[test]
    fn weight_length_must_match_feature_dim() {
        let map = FeatureMap::Polynomial { input_dim: 2, degree: 2 };
        assert_eq!(map.feature_dim(), 5);
        assert!(Hypothesis::new(vec![0.0; 4], map.clone()).is_err());
        let h = Hypothesis::new(vec![1.0, 0.0, 0.0, 1.0, 1.0], map).unwrap();
        // 1 + x1² + x2²
        assert_eq!(h.predict(&[2.0, 3.0]).unwrap(), 14.0);
    }

    #[test]
    fn rbf_features_are_unit_at_centers() {
        let map = FeatureMap::RadialBasis {
            centers: vec![vec![0.0, 0.0], vec![1.0, 1.0]],
            width: 0.5,
        };
        let phi = map.map(&[1.0, 1.0]).unwrap();
        assert_eq!(phi[1], 1.0);
        assert!((phi[0] - (-4.0f64).exp()).abs() < 1e-15);
    }
}
