//! Approximation-sensitivity-aware statistical learning.
//!
//! The crate measures how much a predictor changes under a fixed approximation
//! operator (quantization, pruning, stochastic rounding), learns predictors that
//! trade empirical error against that sensitivity, and evaluates the
//! generalization bounds that justify those learners. Rademacher complexities of
//! sensitivity sets are available both as closed forms for structured geometries
//! and as brute-force oracles (sign enumeration, Monte Carlo).
//!
//! Modules:
//! - [`model`]: samples, feature maps, hypotheses, approximation operators, losses, synthetic tasks.
//! - [`sensitivity`]: true/empirical/analytic/expected sensitivities and deviation bounds.
//! - [`geometry`]: Rademacher complexity of sensitivity point sets and geometric models.
//! - [`learners`]: grid/random/coordinate search and the sensitivity-regularized ERM family.
//! - [`bounds`]: itemized generalization-bound reports.
//! - [`validate`]: seeded coverage and oracle suites.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled (the
//! default). Every reduction is performed in a fixed order, so results are
//! bit-identical across thread counts and against the sequential path.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod io;
pub mod learners;
pub mod model;
pub mod norms;
pub mod par;
pub mod sensitivity;
pub mod validate;

pub use error::{Error, Result};
pub use par::Execution;
