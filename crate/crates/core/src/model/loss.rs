use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gap kept between every loss value and the bound `B = 1`.
pub const CLIP_MARGIN: f64 = 1.0 / (1u64 << 20) as f64;
/// Largest value any loss can take.
pub const LOSS_CEILING: f64 = 1.0 - CLIP_MARGIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `min(ρ|a - y|, 1 - ε)`.
    ClippedAbsolute,
    /// `min(ρ·max(0, 1 - s(y)·a), 1 - ε)` with `s(y) = +1` for `y >= 0`, else `-1`.
    ClippedHinge,
    /// `min(ρ²(a - y)²/4, 1 - ε)`; its slope below the clip is at most `ρ√(1-ε) < ρ`.
    ClippedSquared,
}

/// Bounded, `ρ`-Lipschitz loss with values in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub kind: LossKind,
    pub lipschitz: f64,
}

impl LossSpec {
    pub fn new(kind: LossKind, lipschitz: f64) -> Result<Self> {
        let spec = LossSpec { kind, lipschitz };
        spec.validate()?;
        Ok(spec)
    }

    pub fn absolute(lipschitz: f64) -> Self {
        LossSpec {
            kind: LossKind::ClippedAbsolute,
            lipschitz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lipschitz > 0.0 && self.lipschitz.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(
                "lipschitz",
                format!("must be positive and finite, got {}", self.lipschitz),
            ))
        }
    }

    pub fn rho(&self) -> f64 {
        self.lipschitz
    }

    pub fn value(&self, prediction: f64, target: f64) -> f64 {
        let rho = self.lipschitz;
        let raw = match self.kind {
            LossKind::ClippedAbsolute => rho * (prediction - target).abs(),
            LossKind::ClippedHinge => {
                let s = if target >= 0.0 { 1.0 } else { -1.0 };
                rho * (1.0 - s * prediction).max(0.0)
            }
            LossKind::ClippedSquared => {
                let r = rho * (prediction - target);
                r * r / 4.0
            }
        };
        raw.min(LOSS_CEILING)
    }
}
