//! Learners that trade empirical error of the approximated predictor against sensitivity.
//!
//! Objectives involving `Q(w)` are piecewise constant in `w`, so the minimization is a
//! search over a weight domain: an exhaustive grid (an exact oracle for small `d`),
//! uniform random candidates, or cyclic coordinate search.

mod algorithms;
mod search;

pub use algorithms::{
    analytic_lambda_erm, constrained_erm, lambda_erm, lambda_grid_srm, sensitivity_regularized_erm, srm_learner,
    weight_penalty, ClassComplexity, GridRestrictedComplexity, LambdaCandidate, LearnerOutput, LearnerSetup, Selection,
    SensitivityFn, ThresholdSchedule,
};
pub use search::{optimize, OptimizeResult, SearchDomain, SearchMode, MAX_GRID_POINTS};
