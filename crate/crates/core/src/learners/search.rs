use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_indexed, stream_rng, Execution};

/// Largest grid that is searched exhaustively.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SearchMode {
    /// Every point of `linspace(-W, W, n)^d`, first coordinate most significant.
    Grid { points_per_axis: usize },
    /// Uniform draws from the box.
    Random { n_samples: usize },
    /// Cyclic coordinate search over `line_points` values per axis, from random restarts
    /// (the first restart starts at the origin).
    CoordinateDescent {
        restarts: usize,
        iterations: usize,
        line_points: usize,
    },
}

/// Weight box `[-bound, bound]^dim` plus a search strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchDomain {
    pub bound: f64,
    pub dim: usize,
    pub mode: SearchMode,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub weights: Vec<f64>,
    pub value: f64,
    /// Enumeration index of the winner (grid and random modes).
    pub index: Option<usize>,
    /// Objective values of successive accepted improvements.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

fn axis_value(j: usize, n: usize, w: f64) -> f64 {
    if n == 1 {
        0.0
    } else {
        // symmetric form keeps the middle point exactly at zero
        w * (2.0 * j as f64 - (n - 1) as f64) / (n - 1) as f64
    }
}

impl SearchDomain {
    pub fn grid(bound: f64, dim: usize, points_per_axis: usize) -> Self {
        SearchDomain {
            bound,
            dim,
            mode: SearchMode::Grid { points_per_axis },
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(Error::invalid("bound", "search box half-width must be positive"));
        }
        if self.dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        match self.mode {
            SearchMode::Grid { points_per_axis } => {
                if points_per_axis == 0 {
                    return Err(Error::invalid("points_per_axis", "must be positive"));
                }
                match self.grid_size() {
                    Some(n) if n <= MAX_GRID_POINTS => {}
                    _ => {
                        return Err(Error::invalid(
                            "points_per_axis",
                            format!("grid exceeds {MAX_GRID_POINTS} points; use random or coordinate_descent"),
                        ))
                    }
                }
            }
            SearchMode::Random { n_samples: 0 } => {
                return Err(Error::invalid("n_samples", "must be positive"))
            }
            SearchMode::CoordinateDescent {
                restarts,
                iterations,
                line_points,
            } if restarts == 0 || iterations == 0 || line_points < 2 => {
                return Err(Error::invalid(
                    "coordinate_descent",
                    "restarts and iterations must be positive and line_points at least 2",
                ))
            }
            _ => {}
        }
        Ok(())
    }

    fn grid_size(&self) -> Option<usize> {
        match self.mode {
            SearchMode::Grid { points_per_axis } => {
                (0..self.dim).try_fold(1usize, |acc, _| acc.checked_mul(points_per_axis))
            }
            _ => None,
        }
    }

    /// Axis values of the grid (or of a coordinate line search).
    pub fn axis(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| axis_value(j, n, self.bound)).collect()
    }

    /// Number of enumerable candidates (grid and random modes).
    pub fn candidate_count(&self) -> Option<usize> {
        match self.mode {
            SearchMode::Grid { .. } => self.grid_size(),
            SearchMode::Random { n_samples } => Some(n_samples),
            SearchMode::CoordinateDescent { .. } => None,
        }
    }

    /// Candidate `i` of an enumerable domain.
    pub fn candidate(&self, i: usize) -> Vec<f64> {
        match self.mode {
            SearchMode::Grid { points_per_axis: n } => {
                let mut w = vec![0.0; self.dim];
                let mut rest = i;
                for k in (0..self.dim).rev() {
                    w[k] = axis_value(rest % n, n, self.bound);
                    rest /= n;
                }
                w
            }
            SearchMode::Random { .. } => {
                let mut rng = stream_rng(self.seed, i as u64);
                (0..self.dim).map(|_| rng.random_range(-self.bound..=self.bound)).collect()
            }
            SearchMode::CoordinateDescent { .. } => panic!("coordinate descent has no candidate list"),
        }
    }

    /// All candidates of an enumerable domain, in enumeration order.
    pub fn candidates(&self) -> Option<Vec<Vec<f64>>> {
        self.candidate_count().map(|n| (0..n).map(|i| self.candidate(i)).collect())
    }
}

type Feasibility<'a> = Option<&'a (dyn Fn(&[f64]) -> bool + Sync)>;

/// Minimizes `objective` over the domain subject to `feasibility`.
///
/// Enumerable domains return the lowest-index point among the minimizers; coordinate
/// descent returns the best point found. All modes are deterministic per seed.
pub fn optimize<F>(objective: F, domain: &SearchDomain, feasibility: Feasibility<'_>, exec: Execution) -> Result<OptimizeResult>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    domain.validate()?;
    let feasible = |w: &[f64]| feasibility.is_none_or(|f| f(w));
    match domain.mode {
        SearchMode::Grid { .. } | SearchMode::Random { .. } => {
            let n = domain.candidate_count().expect("enumerable");
            let scored = map_indexed(n, exec, |i| {
                let w = domain.candidate(i);
                feasible(&w).then(|| objective(&w))
            });
            let mut best: Option<(usize, f64)> = None;
            let mut trace = Vec::new();
            for (i, v) in scored.iter().enumerate() {
                if let Some(v) = *v {
                    if !v.is_finite() {
                        return Err(Error::NonFinite("objective"));
                    }
                    if best.is_none_or(|(_, b)| v < b) {
                        best = Some((i, v));
                        trace.push(v);
                    }
                }
            }
            let (i, v) = best.ok_or(Error::Infeasible { min_constraint: None })?;
            Ok(OptimizeResult {
                weights: domain.candidate(i),
                value: v,
                index: Some(i),
                trace,
                evaluations: n,
            })
        }
        SearchMode::CoordinateDescent {
            restarts,
            iterations,
            line_points,
        } => {
            let line = domain.axis(line_points);
            let runs = map_indexed(restarts, exec, |r| {
                let mut rng = stream_rng(domain.seed, r as u64);
                let mut w: Vec<f64> = if r == 0 {
                    vec![0.0; domain.dim]
                } else {
                    (0..domain.dim).map(|_| rng.random_range(-domain.bound..=domain.bound)).collect()
                };
                let mut current = feasible(&w).then(|| objective(&w));
                let mut trace: Vec<f64> = current.into_iter().collect();
                let mut evals = 1;
                for _ in 0..iterations {
                    let mut moved = false;
                    for k in 0..domain.dim {
                        let keep = w[k];
                        let mut best_here: Option<(f64, f64)> = None;
                        for &x in &line {
                            w[k] = x;
                            evals += 1;
                            if !feasible(&w) {
                                continue;
                            }
                            let v = objective(&w);
                            let improves_current = current.is_none_or(|c| v < c);
                            if improves_current && best_here.is_none_or(|(_, b)| v < b) {
                                best_here = Some((x, v));
                            }
                        }
                        match best_here {
                            Some((x, v)) => {
                                w[k] = x;
                                current = Some(v);
                                trace.push(v);
                                moved = true;
                            }
                            None => w[k] = keep,
                        }
                    }
                    if !moved {
                        break;
                    }
                }
                (w, current, trace, evals)
            });
            let mut best: Option<(Vec<f64>, f64, Vec<f64>)> = None;
            let mut total = 0;
            for (w, v, trace, evals) in runs {
                total += evals;
                if let Some(v) = v {
                    if !v.is_finite() {
                        return Err(Error::NonFinite("objective"));
                    }
                    if best.as_ref().is_none_or(|b| v < b.1) {
                        best = Some((w, v, trace));
                    }
                }
            }
            let (weights, value, trace) = best.ok_or(Error::Infeasible { min_constraint: None })?;
            Ok(OptimizeResult {
                weights,
                value,
                index: None,
                trace,
                evaluations: total,
            })
        }
    }
}
