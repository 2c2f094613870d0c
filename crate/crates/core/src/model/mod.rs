//! Samples, hypotheses, approximation operators, losses and synthetic tasks.

mod features;
mod loss;
mod operator;
mod sample;
mod task;

pub use features::{FeatureMap, Hypothesis};
pub use loss::{LossKind, LossSpec, CLIP_MARGIN, LOSS_CEILING};
pub use operator::ApproxOperator;
pub use sample::{LabelledSample, Matrix, UnlabelledSample};
pub(crate) use task::{empirical_error_features, MC_BATCH};
pub use task::{true_error_mc_with, empirical_error, true_error_mc, InputLaw, McEstimate, SyntheticTask};
