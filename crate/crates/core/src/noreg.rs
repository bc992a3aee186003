//! Penalized Poisson model without covariates.
//!
//! For intensities λ[c, i, t] the objective is
//!
//! ```text
//! Σ_{c,i,t} (N d_t λ − M ln λ)
//!   + Σ_{c,t} Σ_{i<j} w_ij (λ[c,i,t] − λ[c,j,t])²
//!   + Σ_{c,i} Σ_G W_G Σ_{t<t' in G} (λ[c,i,t] − λ[c,i,t'])²
//! ```
//!
//! subject to `max(lower_lambda, eps) ≤ λ ≤ upper_lambda`.

use ndarray::{Array2, Array3, Ix3, Zip};

use crate::engine::{Model, Param, FEASIBILITY_TOL};
use crate::error::{Error, Result};

/// Per-cell lists of observed counts, one entry per observed occurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSample {
    shape: (usize, usize, usize),
    lists: Vec<Vec<f64>>,
}

impl ObservationSample {
    pub fn new(shape: (usize, usize, usize)) -> Self {
        ObservationSample {
            shape,
            lists: vec![Vec::new(); shape.0 * shape.1 * shape.2],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    fn flat(&self, c: usize, r: usize, t: usize) -> usize {
        (c * self.shape.1 + r) * self.shape.2 + t
    }

    pub fn set(&mut self, c: usize, r: usize, t: usize, counts: Vec<f64>) {
        let k = self.flat(c, r, t);
        self.lists[k] = counts;
    }

    pub fn get(&self, c: usize, r: usize, t: usize) -> &[f64] {
        &self.lists[self.flat(c, r, t)]
    }

    pub fn total_observations(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }

    /// Observation counts N and arrival totals M per cell.
    pub fn counts(&self) -> (Array3<f64>, Array3<f64>) {
        let n = Array3::from_shape_fn(self.shape, |(c, r, t)| self.get(c, r, t).len() as f64);
        let m = Array3::from_shape_fn(self.shape, |(c, r, t)| self.get(c, r, t).iter().sum());
        (n, m)
    }

    /// Block `k` of `folds` (samples with index ≡ k mod folds) and the rest.
    pub fn split_round_robin(&self, folds: usize, k: usize) -> (ObservationSample, ObservationSample) {
        let mut inside = ObservationSample::new(self.shape);
        let mut outside = ObservationSample::new(self.shape);
        for (idx, list) in self.lists.iter().enumerate() {
            for (j, &v) in list.iter().enumerate() {
                if j % folds == k {
                    inside.lists[idx].push(v);
                } else {
                    outside.lists[idx].push(v);
                }
            }
        }
        (inside, outside)
    }
}

/// Inputs for [`RegularizedProblem::new`].
#[derive(Clone, Debug)]
pub struct RegularizedInput {
    /// N[c, i, t]: occurrences observed.
    pub n_obs: Array3<f64>,
    /// M[c, i, t]: arrivals summed over those occurrences.
    pub n_arr: Array3<f64>,
    /// Length of each period in hours.
    pub durations: Vec<f64>,
    /// Time group of each period.
    pub which_group: Vec<usize>,
    /// Penalty W_G of each group.
    pub group_weights: Vec<f64>,
    /// Neighbor penalty w_ij, symmetric with zero diagonal.
    pub alpha: Array2<f64>,
    /// Centroid distances in km.
    pub distance: Array2<f64>,
    pub type_region: Vec<i64>,
    pub neighbors: Vec<Vec<usize>>,
    /// Divide w_ij by the distance between i and j.
    pub distance_scaled: bool,
}

#[derive(Clone, Debug)]
pub struct RegularizedProblem {
    input: RegularizedInput,
    groups: Vec<Vec<usize>>,
    /// (i, j, effective weight) for i < j with positive weight.
    pairs: Vec<(usize, usize, f64)>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

impl RegularizedProblem {
    pub fn new(mut input: RegularizedInput) -> Result<Self> {
        let (cn, rn, tn) = input.n_obs.dim();
        if input.n_arr.dim() != (cn, rn, tn) {
            return invalid("N and M arrays differ in shape");
        }
        if input.durations.len() != tn || input.which_group.len() != tn {
            return invalid(format!("durations and group assignment must have length T = {tn}"));
        }
        if input.durations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return invalid("durations must be positive");
        }
        for (n, m) in input.n_obs.iter().zip(input.n_arr.iter()) {
            if !(n.is_finite() && *n >= 0.0 && m.is_finite() && *m >= 0.0) {
                return invalid("counts must be finite and non-negative");
            }
            if *n == 0.0 && *m != 0.0 {
                return invalid("arrivals recorded in a cell with no observations");
            }
        }
        let n_groups = input.group_weights.len();
        if input.group_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid("group weights must be non-negative");
        }
        let mut groups = vec![Vec::new(); n_groups];
        for (t, &g) in input.which_group.iter().enumerate() {
            if g >= n_groups {
                return invalid(format!("period {t} assigned to group {g}, but only {n_groups} groups exist"));
            }
            groups[g].push(t);
        }
        if input.alpha.dim() != (rn, rn) || input.distance.dim() != (rn, rn) {
            return invalid(format!("alpha and distance must be {rn}x{rn}"));
        }
        if input.type_region.len() != rn || input.neighbors.len() != rn {
            return invalid(format!("zone tables must have R = {rn} entries"));
        }
        if input.neighbors.iter().flatten().any(|&j| j >= rn) {
            return invalid("neighbor index out of range");
        }
        // The neighbor relation is symmetric; add missing reverse links.
        for i in 0..rn {
            for j in input.neighbors[i].clone() {
                if !input.neighbors[j].contains(&i) {
                    input.neighbors[j].push(i);
                }
            }
        }
        let mut pairs = Vec::new();
        for i in 0..rn {
            if input.alpha[[i, i]] != 0.0 {
                return invalid("alpha must have a zero diagonal");
            }
            for j in i + 1..rn {
                let (a, b) = (input.alpha[[i, j]], input.alpha[[j, i]]);
                if !(a.is_finite() && a >= 0.0) || a != b {
                    return invalid(format!("alpha must be symmetric and non-negative at ({i}, {j})"));
                }
                if a > 0.0 {
                    if !input.neighbors[i].contains(&j) {
                        return invalid(format!("alpha({i}, {j}) > 0 but the zones are not neighbors"));
                    }
                    let w = if input.distance_scaled {
                        let d = input.distance[[i, j]];
                        if !(d > 0.0 && d.is_finite()) {
                            return invalid(format!("distance scaling needs a positive distance for ({i}, {j})"));
                        }
                        a / d
                    } else {
                        a
                    };
                    pairs.push((i, j, w));
                }
            }
        }
        Ok(RegularizedProblem { input, groups, pairs })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.input.n_obs.dim()
    }

    pub fn input(&self) -> &RegularizedInput {
        &self.input
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// The same problem with every neighbor weight and group weight set to `w`.
    pub fn with_common_weight(&self, w: f64) -> Self {
        let mut input = self.input.clone();
        let rn = input.alpha.nrows();
        input.alpha.fill(0.0);
        for i in 0..rn {
            for &j in &input.neighbors[i] {
                if i != j {
                    input.alpha[[i, j]] = w;
                }
            }
        }
        input.group_weights.iter_mut().for_each(|g| *g = w);
        RegularizedProblem::new(input).expect("common weight keeps the problem valid")
    }

    /// The same problem with counts taken from `sample`.
    pub fn with_counts(&self, sample: &ObservationSample) -> Result<Self> {
        if sample.shape() != self.shape() {
            return invalid("sample shape does not match the problem");
        }
        let (n, m) = sample.counts();
        let mut input = self.input.clone();
        input.n_obs = n;
        input.n_arr = m;
        RegularizedProblem::new(input)
    }

    /// Starting point: per-cell empirical rate, or the pooled rate where a
    /// cell has no observations, clamped to the box.
    pub fn initial_point(&self, param: &Param) -> Array3<f64> {
        let d = &self.input.durations;
        let exposure: f64 = self.input.n_obs.indexed_iter().map(|((_, _, t), n)| n * d[t]).sum();
        let pooled = if exposure > 0.0 {
            self.input.n_arr.sum() / exposure
        } else {
            param.floor()
        };
        let lo = param.floor();
        Array3::from_shape_fn(self.shape(), |(c, i, t)| {
            let n = self.input.n_obs[[c, i, t]];
            let rate = if n > 0.0 { self.input.n_arr[[c, i, t]] / (n * d[t]) } else { pooled };
            rate.max(lo).min(param.upper_lambda)
        })
    }

    fn check_shape(&self, lambda: &Array3<f64>) -> Result<()> {
        if lambda.dim() != self.shape() {
            return invalid(format!("intensity array has shape {:?}, expected {:?}", lambda.dim(), self.shape()));
        }
        Ok(())
    }

    fn check_positive(lambda: &Array3<f64>) -> Result<()> {
        if let Some(((c, i, t), v)) = lambda.indexed_iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::Numerical(format!("non-positive intensity {v} at ({c}, {i}, {t})")));
        }
        Ok(())
    }

    /// Unpenalized Poisson negative log-likelihood of `sample` under λ.
    pub fn validation_loss(&self, sample: &ObservationSample, lambda: &Array3<f64>) -> Result<f64> {
        self.check_shape(lambda)?;
        Self::check_positive(lambda)?;
        let (n, m) = sample.counts();
        Ok(poisson_nll(&n, &m, &self.input.durations, lambda))
    }
}

fn poisson_nll(n: &Array3<f64>, m: &Array3<f64>, durations: &[f64], lambda: &Array3<f64>) -> f64 {
    let mut f = 0.0;
    Zip::indexed(lambda).and(n).and(m).for_each(|(_, _, t), &l, &n, &m| {
        f += n * durations[t] * l;
        if m > 0.0 {
            f -= m * l.ln();
        }
    });
    f
}

impl Model for RegularizedProblem {
    type Dim = Ix3;

    fn f(&self, lambda: &Array3<f64>) -> Result<f64> {
        self.check_shape(lambda)?;
        Self::check_positive(lambda)?;
        let (cn, rn, _) = self.shape();
        let mut f = poisson_nll(&self.input.n_obs, &self.input.n_arr, &self.input.durations, lambda);
        for c in 0..cn {
            for &(i, j, w) in &self.pairs {
                let (li, lj) = (lambda.slice(ndarray::s![c, i, ..]), lambda.slice(ndarray::s![c, j, ..]));
                f += w * Zip::from(&li).and(&lj).fold(0.0, |acc, a, b| acc + (a - b) * (a - b));
            }
            for i in 0..rn {
                for (group, &wg) in self.groups.iter().zip(&self.input.group_weights) {
                    if wg == 0.0 || group.len() < 2 {
                        continue;
                    }
                    let mean = group.iter().map(|&t| lambda[[c, i, t]]).sum::<f64>() / group.len() as f64;
                    let ss: f64 = group.iter().map(|&t| (lambda[[c, i, t]] - mean).powi(2)).sum();
                    f += wg * group.len() as f64 * ss;
                }
            }
        }
        Ok(f)
    }

    fn gradient(&self, lambda: &Array3<f64>) -> Result<Array3<f64>> {
        self.check_shape(lambda)?;
        Self::check_positive(lambda)?;
        let (cn, rn, _) = self.shape();
        let d = &self.input.durations;
        let mut g = Array3::zeros(self.shape());
        Zip::indexed(&mut g)
            .and(lambda)
            .and(&self.input.n_obs)
            .and(&self.input.n_arr)
            .for_each(|(_, _, t), g, &l, &n, &m| *g = n * d[t] - m / l);
        for c in 0..cn {
            for &(i, j, w) in &self.pairs {
                for t in 0..lambda.dim().2 {
                    let diff = 2.0 * w * (lambda[[c, i, t]] - lambda[[c, j, t]]);
                    g[[c, i, t]] += diff;
                    g[[c, j, t]] -= diff;
                }
            }
            for i in 0..rn {
                for (group, &wg) in self.groups.iter().zip(&self.input.group_weights) {
                    if wg == 0.0 || group.len() < 2 {
                        continue;
                    }
                    let sum: f64 = group.iter().map(|&t| lambda[[c, i, t]]).sum();
                    let size = group.len() as f64;
                    for &t in group {
                        g[[c, i, t]] += 2.0 * wg * (size * lambda[[c, i, t]] - sum);
                    }
                }
            }
        }
        Ok(g)
    }

    fn projection(&self, param: &Param, lambda: &Array3<f64>) -> Result<Array3<f64>> {
        self.check_shape(lambda)?;
        Ok(project_box(param, lambda))
    }

    fn is_feasible(&self, param: &Param, lambda: &Array3<f64>) -> bool {
        let (lo, hi) = (param.floor(), param.upper_lambda);
        lambda.dim() == self.shape()
            && lambda
                .iter()
                .all(|&v| v.is_finite() && v >= lo - FEASIBILITY_TOL && v <= hi + FEASIBILITY_TOL)
    }

    fn get_lower_bound(&self, param: &Param, lambda: &Array3<f64>, grad: &Array3<f64>) -> Result<f64> {
        let f = self.f(lambda)?;
        let (lo, hi) = (param.floor(), param.upper_lambda);
        let linear = Zip::from(lambda)
            .and(grad)
            .fold(0.0, |acc, &x, &g| acc + (g * (lo - x)).min(g * (hi - x)));
        Ok(f + linear)
    }
}

/// Clamp every entry to `[max(lower_lambda, eps), upper_lambda]`.
pub fn project_box(param: &Param, lambda: &Array3<f64>) -> Array3<f64> {
    let (lo, hi) = (param.floor(), param.upper_lambda);
    lambda.mapv(|v| if v.is_nan() { lo } else { v.max(lo).min(hi) })
}
