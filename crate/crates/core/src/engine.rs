//! First-order solver shared by both intensity models, and cross validation
//! of the common penalty weight for the regularized model.

use std::time::{Duration, Instant};

use ndarray::{Array, Array3, Dimension, Zip};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noreg::{ObservationSample, RegularizedProblem};

/// Absolute slack used when checking feasibility of an iterate. Projections
/// are exact up to rounding, so anything beyond this indicates a bug.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Base of the backtracking step `θ = BASE^m`.
pub const STEP_BASE: f64 = 0.5;

/// Maximum number of step halvings before the line search gives up.
pub const MAX_HALVINGS: u32 = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    /// Feasibility floor ε on every intensity.
    pub eps: f64,
    /// Armijo slope fraction σ ∈ (0, 1).
    pub sigma: f64,
    /// Stop once `f − lower_bound ≤ accuracy`.
    pub accuracy: f64,
    pub max_iter: usize,
    pub lower_lambda: f64,
    pub upper_lambda: f64,
    /// Initial step β̄ for the projected gradient.
    pub beta_bar: f64,
    /// Fraction of samples in each cross-validation estimation block.
    pub cv_proportion: f64,
}

impl Default for Param {
    fn default() -> Self {
        Param {
            eps: 1e-5,
            sigma: 0.5,
            accuracy: 1e-3,
            max_iter: 100,
            lower_lambda: 1e-6,
            upper_lambda: 1e3,
            beta_bar: 1.0,
            cv_proportion: 0.2,
        }
    }
}

impl Param {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad("sigma must lie in (0, 1)");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("EPS must be positive");
        }
        if !(self.beta_bar > 0.0 && self.beta_bar.is_finite()) {
            return bad("beta_bar must be positive");
        }
        if !(self.lower_lambda <= self.upper_lambda) || !self.upper_lambda.is_finite() {
            return bad("lower_lambda must not exceed upper_lambda");
        }
        if !(self.accuracy >= 0.0) {
            return bad("accuracy must be non-negative");
        }
        if !(self.cv_proportion > 0.0 && self.cv_proportion <= 1.0) {
            return bad("cv_proportion must lie in (0, 1]");
        }
        Ok(())
    }

    /// Lower end of the intensity box, `max(lower_lambda, eps)`.
    pub fn floor(&self) -> f64 {
        self.lower_lambda.max(self.eps)
    }

    /// Number of cross-validation folds.
    pub fn folds(&self) -> usize {
        ((1.0 / self.cv_proportion).floor() as usize).max(1)
    }
}

/// Capabilities a model must offer to the solver.
pub trait Model {
    type Dim: Dimension;

    fn f(&self, x: &Array<f64, Self::Dim>) -> Result<f64>;

    fn gradient(&self, x: &Array<f64, Self::Dim>) -> Result<Array<f64, Self::Dim>>;

    /// Euclidean projection onto the feasible set.
    fn projection(&self, param: &Param, x: &Array<f64, Self::Dim>) -> Result<Array<f64, Self::Dim>>;

    fn is_feasible(&self, param: &Param, x: &Array<f64, Self::Dim>) -> bool;

    /// Directional derivative of f along `dir`.
    fn get_rhs(&self, grad: &Array<f64, Self::Dim>, dir: &Array<f64, Self::Dim>) -> f64 {
        Zip::from(grad).and(dir).fold(0.0, |acc, g, d| acc + g * d)
    }

    /// A value no larger than the minimum of f over the feasible set.
    fn get_lower_bound(&self, param: &Param, x: &Array<f64, Self::Dim>, grad: &Array<f64, Self::Dim>) -> Result<f64>;

    fn average_rate_difference(&self, a: &Array<f64, Self::Dim>, b: &Array<f64, Self::Dim>) -> Result<f64> {
        average_abs_difference(a, b)
    }
}

pub fn average_abs_difference<D: Dimension>(a: &Array<f64, D>, b: &Array<f64, D>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let total = Zip::from(a).and(b).fold(0.0, |acc, x, y| acc + (x - y).abs());
    Ok(total / a.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Gap fell below `accuracy`.
    Converged,
    MaxIterations,
    /// The projected direction was not a descent direction.
    NoDescent,
    /// No step size down to `2^-MAX_HALVINGS` gave sufficient decrease.
    LineSearchFailed,
}

/// One accepted step of the solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub f_before: f64,
    pub f_after: f64,
    pub theta: f64,
    pub rhs: f64,
    pub best_f: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport<D: Dimension> {
    pub x: Array<f64, D>,
    pub f: f64,
    /// `f − lower_bound` at the returned point (may be infinite).
    pub gap: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub trace: Vec<StepRecord>,
}

fn finite_or_err(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} is not finite")))
    }
}

fn check_gradient<D: Dimension>(g: &Array<f64, D>) -> Result<()> {
    if g.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical("gradient has non-finite entries".into()))
    }
}

/// Projected gradient with Armijo backtracking along the feasible direction.
pub fn projected_gradient_armijo_feasible<M: Model>(
    model: &M,
    param: &Param,
    x0: &Array<f64, M::Dim>,
) -> Result<SolveReport<M::Dim>> {
    solve_with_observer(model, param, x0, |_, _| {})
}

/// As [`projected_gradient_armijo_feasible`], calling `observe` with every
/// accepted iterate and its step record.
pub fn solve_with_observer<M: Model>(
    model: &M,
    param: &Param,
    x0: &Array<f64, M::Dim>,
    mut observe: impl FnMut(&Array<f64, M::Dim>, &StepRecord),
) -> Result<SolveReport<M::Dim>> {
    param.validate()?;
    let mut x = model.projection(param, x0)?;
    let mut fx = finite_or_err(model.f(&x)?, "objective")?;
    let mut best_x = x.clone();
    let mut best_f = fx;
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIterations;
    let mut gap = f64::INFINITY;
    let mut gap_current = false;

    for _ in 0..param.max_iter {
        let g = model.gradient(&x)?;
        check_gradient(&g)?;
        gap = fx - model.get_lower_bound(param, &x, &g)?;
        gap_current = true;
        if gap <= param.accuracy {
            termination = Termination::Converged;
            break;
        }
        let trial = &x - &(&g * param.beta_bar);
        let dir = model.projection(param, &trial)? - &x;
        let rhs = model.get_rhs(&g, &dir);
        if rhs.is_nan() || rhs >= 0.0 {
            termination = Termination::NoDescent;
            break;
        }
        let mut theta = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let candidate = &x + &(&dir * theta);
            let fc = model.f(&candidate)?;
            if fc.is_finite() && fc <= fx + param.sigma * theta * rhs {
                accepted = Some((candidate, fc));
                break;
            }
            theta *= STEP_BASE;
        }
        let Some((x_new, f_new)) = accepted else {
            termination = Termination::LineSearchFailed;
            break;
        };
        if f_new < best_f {
            best_f = f_new;
            best_x.assign(&x_new);
        }
        let record = StepRecord { f_before: fx, f_after: f_new, theta, rhs, best_f };
        observe(&x_new, &record);
        trace.push(record);
        x = x_new;
        fx = f_new;
        gap_current = false;
    }

    if !gap_current || fx != best_f {
        let g = model.gradient(&best_x)?;
        check_gradient(&g)?;
        gap = best_f - model.get_lower_bound(param, &best_x, &g)?;
        if termination == Termination::MaxIterations && gap <= param.accuracy {
            termination = Termination::Converged;
        }
    }

    Ok(SolveReport {
        x: best_x,
        f: best_f,
        gap,
        iterations: trace.len(),
        termination,
        trace,
    })
}

#[derive(Clone, Debug)]
pub struct CrossValidationResult {
    pub cpu_time: Duration,
    pub best_weight: f64,
    /// Full-data fit with the selected weight.
    pub lambda: Array3<f64>,
    /// Mean validation loss per candidate, in input order.
    pub losses: Vec<f64>,
}

/// Relative tolerance under which two validation losses count as tied.
pub const CV_TIE_TOL: f64 = 1e-9;

/// Index of the winning candidate: lowest loss, ties to the smaller weight.
pub fn select_weight(weights: &[f64], losses: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..weights.len() {
        let (lb, lk) = (losses[best], losses[k]);
        let tol = CV_TIE_TOL * lb.abs().max(lk.abs()).max(f64::MIN_POSITIVE);
        let better = lk < lb - tol;
        let tied_smaller = (lk - lb).abs() <= tol && weights[k] < weights[best];
        if better || tied_smaller {
            best = k;
        }
    }
    best
}

/// Select the common penalty weight by K-fold validation of held-out
/// Poisson likelihood, then refit on all data.
///
/// Sample `j` of each cell goes to block `j mod K`. Each block in turn is
/// the estimation set and the remaining blocks are the validation set; with
/// a single block the fit is scored in-sample.
pub fn cross_validation(
    param: &Param,
    problem: &RegularizedProblem,
    sample: &ObservationSample,
    cv_weights: &[f64],
) -> Result<CrossValidationResult> {
    let start = Instant::now();
    param.validate()?;
    if cv_weights.is_empty() {
        return Err(Error::InvalidInput("cv_weights must not be empty".into()));
    }
    if let Some(w) = cv_weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidInput(format!("each weight must be non-negative, got {w}")));
    }
    if sample.total_observations() == 0 {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    if sample.shape() != problem.shape() {
        return Err(Error::InvalidInput("sample shape does not match the problem".into()));
    }

    let k_folds = param.folds();
    let folds: Vec<(ObservationSample, ObservationSample)> = (0..k_folds)
        .map(|k| sample.split_round_robin(k_folds, k))
        .collect();

    let jobs: Vec<(usize, usize)> = (0..cv_weights.len())
        .flat_map(|w| (0..k_folds).map(move |k| (w, k)))
        .collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(w, k)| {
            let (fit, held_out) = &folds[k];
            let validation = if k_folds == 1 { fit } else { held_out };
            let sub = problem.with_common_weight(cv_weights[w]).with_counts(fit)?;
            let report = projected_gradient_armijo_feasible(&sub, param, &sub.initial_point(param))?;
            problem.validation_loss(validation, &report.x)
        })
        .collect::<Result<_>>()?;

    let losses: Vec<f64> = scores
        .chunks(k_folds)
        .map(|fold_losses| fold_losses.iter().sum::<f64>() / k_folds as f64)
        .collect();
    let best = select_weight(cv_weights, &losses);
    let best_weight = cv_weights[best];

    let full = problem.with_common_weight(best_weight).with_counts(sample)?;
    let report = projected_gradient_armijo_feasible(&full, param, &full.initial_point(param))?;

    Ok(CrossValidationResult {
        cpu_time: start.elapsed(),
        best_weight,
        lambda: report.x,
        losses,
    })
}
