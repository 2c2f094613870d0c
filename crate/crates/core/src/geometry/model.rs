use serde::{Deserialize, Serialize};

use super::closed_form::{
    cluster_bound, crude_bounds, ellipse_rademacher, rotated_union_bound, union_ellipse_bound, ClusterComponent,
    RotatedEllipse,
};
use super::{RadEstimate, RadMethod};
use crate::error::{Error, Result};

/// Structured description of a sensitivity point set; `m` is implied by the vector lengths
/// except for the ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryModel {
    /// All sensitivity vectors with worst empirical `p`-sensitivity at most `radius`.
    Pball { radius: f64, p: f64, m: usize },
    Ellipse { mu: Vec<f64>, p: f64 },
    AxisUnion { mus: Vec<Vec<f64>>, p: f64 },
    RotatedUnion { components: Vec<RotatedEllipse>, p: f64 },
    Clustered { components: Vec<ClusterComponent>, p: f64 },
}

impl GeometryModel {
    pub fn m(&self) -> Result<usize> {
        let m = match self {
            GeometryModel::Pball { m, .. } => *m,
            GeometryModel::Ellipse { mu, .. } => mu.len(),
            GeometryModel::AxisUnion { mus, .. } => mus.first().map_or(0, Vec::len),
            GeometryModel::RotatedUnion { components, .. } => components.first().map_or(0, |c| c.mu.len()),
            GeometryModel::Clustered { components, .. } => components.first().map_or(0, |c| c.mu.len()),
        };
        if m == 0 {
            return Err(Error::Empty("geometry model"));
        }
        Ok(m)
    }

    /// Closed form where one exists, otherwise a certified upper bound.
    pub fn rademacher(&self) -> Result<RadEstimate> {
        let m = self.m()?;
        match self {
            GeometryModel::Pball { radius, p, .. } => {
                let (lo, hi) = crude_bounds(*radius, *p)?;
                Ok(RadEstimate::new(hi, RadMethod::CertifiedUpper, m)
                    .with_note(format!("lower bound {lo} when the set nearly fills the positive half-radius ball")))
            }
            GeometryModel::Ellipse { mu, p } => ellipse_rademacher(mu, *p, m),
            GeometryModel::AxisUnion { mus, p } => union_ellipse_bound(mus, *p, m),
            GeometryModel::RotatedUnion { components, p } => rotated_union_bound(components, *p, m),
            GeometryModel::Clustered { components, p } => cluster_bound(components, *p, m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_values() {
        let text = r#"{"variant":"ellipse","mu":[3.0,4.0],"p":2.0}"#;
        let g: GeometryModel = serde_json::from_str(text).unwrap();
        assert_eq!(g.rademacher().unwrap().value, 2.5);
        let back: GeometryModel = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        let ball: GeometryModel = serde_json::from_str(r#"{"variant":"pball","radius":1.0,"p":2.0,"m":4}"#).unwrap();
        assert_eq!(ball.rademacher().unwrap().value, 1.0);
        let clustered: GeometryModel = serde_json::from_str(
            r#"{"variant":"clustered","p":2.0,"components":[
                {"center":[0,0],"v":[[1,0],[0,1]],"mu":[1,1]},
                {"center":[1,1],"v":[[1,0],[0,1]],"mu":[1,1]}]}"#,
        )
        .unwrap();
        assert!((clustered.rademacher().unwrap().value - 1.539_661_4).abs() < 1e-7);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<GeometryModel>(r#"{"variant":"ellipse","mu":[1],"p":2,"extra":1}"#).is_err());
        assert!(serde_json::from_str::<GeometryModel>(r#"{"variant":"cone","p":2}"#).is_err());
    }
}
