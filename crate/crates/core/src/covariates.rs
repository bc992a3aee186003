//! Poisson model whose intensities are linear in zone covariates:
//! `λ[c, d, t, i] = Σ_j β[c, d, t, j] · x[j, i]`.
//!
//! The feasible set is `β ≥ 0` together with `λ ≥ eps` in every zone. It is
//! a polyhedron per `(c, d, t)` block, so the Euclidean projection is a small
//! quadratic program solved by a dual active-set method.

use ndarray::{s, Array2, Array4, ArrayView1, Ix4, Zip};

use crate::engine::{Model, Param, FEASIBILITY_TOL};
use crate::error::{Error, Result};

/// Relative constraint violation accepted by the block projection.
pub const PROJECTION_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct CovariatesProblem {
    /// N[c, d, t, i].
    n_obs: Array4<f64>,
    /// M[c, d, t, i].
    n_arr: Array4<f64>,
    /// x[j, i].
    x: Array2<f64>,
    durations: Vec<f64>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

impl CovariatesProblem {
    pub fn new(n_obs: Array4<f64>, n_arr: Array4<f64>, x: Array2<f64>, durations: Vec<f64>) -> Result<Self> {
        let (_, _, tn, rn) = n_obs.dim();
        if n_arr.dim() != n_obs.dim() {
            return invalid("N and M arrays differ in shape");
        }
        if x.ncols() != rn || x.nrows() == 0 {
            return invalid(format!("regressors must be a J x {rn} matrix with J > 0"));
        }
        if durations.len() != tn || durations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return invalid(format!("need {tn} positive durations"));
        }
        if x.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return invalid("regressor values must be finite and non-negative");
        }
        if let Some(i) = (0..rn).find(|&i| x.column(i).iter().all(|&v| v == 0.0)) {
            return invalid(format!("zone {i} has no regressor mass"));
        }
        for (n, m) in n_obs.iter().zip(n_arr.iter()) {
            if !(n.is_finite() && *n >= 0.0 && m.is_finite() && *m >= 0.0) {
                return invalid("counts must be finite and non-negative");
            }
            if *n == 0.0 && *m != 0.0 {
                return invalid("arrivals recorded in a cell with no observations");
            }
        }
        Ok(CovariatesProblem { n_obs, n_arr, x, durations })
    }

    /// (C, D, T, R).
    pub fn cell_shape(&self) -> (usize, usize, usize, usize) {
        self.n_obs.dim()
    }

    /// Shape of β: (C, D, T, J).
    pub fn beta_shape(&self) -> (usize, usize, usize, usize) {
        let (c, d, t, _) = self.n_obs.dim();
        (c, d, t, self.x.nrows())
    }

    pub fn regressors(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn lambda_of_beta(&self, beta: &Array4<f64>, c: usize, d: usize, t: usize, i: usize) -> f64 {
        beta.slice(s![c, d, t, ..]).dot(&self.x.column(i))
    }

    /// All intensities, shape (C, D, T, R).
    pub fn lambdas(&self, beta: &Array4<f64>) -> Array4<f64> {
        Array4::from_shape_fn(self.cell_shape(), |(c, d, t, i)| self.lambda_of_beta(beta, c, d, t, i))
    }

    fn check_shape(&self, beta: &Array4<f64>) -> Result<()> {
        if beta.dim() != self.beta_shape() {
            return invalid(format!("beta has shape {:?}, expected {:?}", beta.dim(), self.beta_shape()));
        }
        Ok(())
    }

    fn positive_lambdas(&self, beta: &Array4<f64>) -> Result<Array4<f64>> {
        self.check_shape(beta)?;
        let lambda = self.lambdas(beta);
        if let Some(((c, d, t, i), v)) = lambda.indexed_iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::Numerical(format!("non-positive intensity {v} at ({c}, {d}, {t}, {i})")));
        }
        Ok(lambda)
    }

    /// A starting point: the pooled empirical rate spread evenly over the
    /// regressors, scaled so every zone meets the floor.
    pub fn initial_point(&self, param: &Param) -> Array4<f64> {
        let exposure: f64 = self.n_obs.indexed_iter().map(|((_, _, t, _), n)| n * self.durations[t]).sum();
        let rate = if exposure > 0.0 { self.n_arr.sum() / exposure } else { 0.0 };
        let mass: f64 = self.x.sum() / self.x.ncols() as f64;
        let min_col = (0..self.x.ncols()).map(|i| self.x.column(i).sum()).fold(f64::INFINITY, f64::min);
        let per_j = (rate / mass).max(param.eps / min_col) * 2.0;
        Array4::from_elem(self.beta_shape(), per_j)
    }

    /// Σ over cells of the smallest possible Poisson term, each cell free.
    fn separable_bound(&self, eps: f64) -> f64 {
        let mut lb = 0.0;
        Zip::indexed(&self.n_obs).and(&self.n_arr).for_each(|(_, _, t, _), &n, &m| {
            let a = n * self.durations[t];
            if m == 0.0 {
                lb += a * eps;
            } else {
                let l = (m / a).max(eps);
                lb += a * l - m * l.ln();
            }
        });
        lb
    }
}

impl Model for CovariatesProblem {
    type Dim = Ix4;

    fn f(&self, beta: &Array4<f64>) -> Result<f64> {
        let lambda = self.positive_lambdas(beta)?;
        let mut f = 0.0;
        Zip::indexed(&lambda).and(&self.n_obs).and(&self.n_arr).for_each(|(_, _, t, _), &l, &n, &m| {
            f += n * self.durations[t] * l;
            if m > 0.0 {
                f -= m * l.ln();
            }
        });
        Ok(f)
    }

    fn gradient(&self, beta: &Array4<f64>) -> Result<Array4<f64>> {
        let lambda = self.positive_lambdas(beta)?;
        let (cn, dn, tn, rn) = self.cell_shape();
        let mut g = Array4::zeros(self.beta_shape());
        for c in 0..cn {
            for d in 0..dn {
                for t in 0..tn {
                    for i in 0..rn {
                        let m = self.n_arr[[c, d, t, i]];
                        let mut w = self.n_obs[[c, d, t, i]] * self.durations[t];
                        if m > 0.0 {
                            w -= m / lambda[[c, d, t, i]];
                        }
                        let mut gb = g.slice_mut(s![c, d, t, ..]);
                        gb.scaled_add(w, &self.x.column(i));
                    }
                }
            }
        }
        Ok(g)
    }

    fn projection(&self, param: &Param, beta: &Array4<f64>) -> Result<Array4<f64>> {
        self.check_shape(beta)?;
        let (cn, dn, tn, _) = self.cell_shape();
        let mut out = beta.clone();
        for c in 0..cn {
            for d in 0..dn {
                for t in 0..tn {
                    let y: Vec<f64> = beta.slice(s![c, d, t, ..]).to_vec();
                    let b = project_block(&self.x, param.eps, &y)?;
                    out.slice_mut(s![c, d, t, ..]).assign(&ArrayView1::from(&b));
                }
            }
        }
        Ok(out)
    }

    fn is_feasible(&self, param: &Param, beta: &Array4<f64>) -> bool {
        if beta.dim() != self.beta_shape() || beta.iter().any(|v| !v.is_finite() || *v < -FEASIBILITY_TOL) {
            return false;
        }
        self.lambdas(beta).iter().all(|&l| l >= param.eps - FEASIBILITY_TOL)
    }

    /// The larger of two valid bounds: the linearization minimized over the
    /// feasible polyhedron (finite only when every block gradient is
    /// non-negative), and the sum of per-cell Poisson minima.
    fn get_lower_bound(&self, param: &Param, beta: &Array4<f64>, grad: &Array4<f64>) -> Result<f64> {
        let f = self.f(beta)?;
        let (cn, dn, tn, rn) = self.cell_shape();
        let jn = self.x.nrows();
        let mut linear = 0.0;
        'blocks: for c in 0..cn {
            for d in 0..dn {
                for t in 0..tn {
                    let g = grad.slice(s![c, d, t, ..]);
                    if g.iter().any(|&v| v < 0.0) {
                        linear = f64::NEG_INFINITY;
                        break 'blocks;
                    }
                    let best_zone = (0..rn)
                        .map(|i| {
                            (0..jn)
                                .filter(|&j| self.x[[j, i]] > 0.0)
                                .map(|j| g[j] / self.x[[j, i]])
                                .fold(f64::INFINITY, f64::min)
                        })
                        .fold(0.0, f64::max);
                    linear += param.eps * best_zone - g.dot(&beta.slice(s![c, d, t, ..]));
                }
            }
        }
        Ok((f + linear).max(self.separable_bound(param.eps)))
    }
}

/// Euclidean projection of `y` onto `{b ≥ 0, xᵀb ≥ floor}` where `x` is J×R.
///
/// Goldfarb–Idnani dual active-set method with identity Hessian: start from
/// the unconstrained minimizer `y`, repeatedly add the most violated
/// constraint, dropping active constraints whose multiplier would turn
/// negative. Terminates in finitely many steps.
pub fn project_block(x: &Array2<f64>, floor: f64, y: &[f64]) -> Result<Vec<f64>> {
    let (jn, rn) = x.dim();
    if y.len() != jn {
        return invalid(format!("block has {} entries, expected {jn}", y.len()));
    }
    // Constraint k: a_k · b ≥ c_k. First J are b_j ≥ 0, then one per zone.
    let mut normals: Vec<Vec<f64>> = Vec::with_capacity(jn + rn);
    let mut rhs = Vec::with_capacity(jn + rn);
    for j in 0..jn {
        let mut e = vec![0.0; jn];
        e[j] = 1.0;
        normals.push(e);
        rhs.push(0.0);
    }
    for i in 0..rn {
        let col = x.column(i).to_vec();
        if col.iter().all(|&v| v == 0.0) {
            if floor > 0.0 {
                return Err(Error::Numerical(format!("projection infeasible: zone {i} has no regressor mass")));
            }
            continue;
        }
        normals.push(col);
        rhs.push(floor);
    }
    let norms: Vec<f64> = normals.iter().map(|a| dot(a, a).sqrt()).collect();
    let scale = y.iter().fold(floor.abs(), |m, v| m.max(v.abs())).max(1.0);
    let tol = PROJECTION_TOL * scale;

    let mut b = y.to_vec();
    let mut active: Vec<usize> = Vec::new();
    let mut mult: Vec<f64> = Vec::new();
    let max_steps = 50 * (normals.len() + jn) + 100;
    let mut steps = 0;
    loop {
        let (p, worst) = (0..normals.len())
            .map(|k| (k, (dot(&normals[k], &b) - rhs[k]) / norms[k]))
            .fold((usize::MAX, 0.0), |best, cur| if cur.1 < best.1 { cur } else { best });
        if p == usize::MAX || worst >= -tol {
            return Ok(finish(b, jn));
        }
        let np = &normals[p];
        let mut mult_p = 0.0;
        loop {
            steps += 1;
            if steps > max_steps {
                return Err(Error::Numerical("projection did not terminate".into()));
            }
            let r = gram_solve(&normals, &active, np)?;
            let mut z = np.clone();
            for (&k, &rk) in active.iter().zip(&r) {
                for (zj, aj) in z.iter_mut().zip(&normals[k]) {
                    *zj -= rk * aj;
                }
            }
            let zz = dot(&z, np);
            let full = if zz > 1e-14 * norms[p] * norms[p] {
                -(dot(np, &b) - rhs[p]) / zz
            } else {
                f64::INFINITY
            };
            let (partial, drop) = r
                .iter()
                .enumerate()
                .filter(|(_, &rk)| rk > 1e-14)
                .map(|(idx, &rk)| (mult[idx] / rk, idx))
                .fold((f64::INFINITY, usize::MAX), |best, cur| if cur.0 < best.0 { cur } else { best });
            let t = full.min(partial);
            if !t.is_finite() {
                return Err(Error::Numerical("projection infeasible: constraints are inconsistent".into()));
            }
            for (m, rk) in mult.iter_mut().zip(&r) {
                *m = (*m - t * rk).max(0.0);
            }
            mult_p += t;
            if full.is_finite() {
                for (bj, zj) in b.iter_mut().zip(&z) {
                    *bj += t * zj;
                }
            }
            if full <= partial {
                active.push(p);
                mult.push(mult_p);
                break;
            }
            active.remove(drop);
            mult.remove(drop);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `(NᵀN) r = Nᵀ v` for the active normals N by Cholesky.
fn gram_solve(normals: &[Vec<f64>], active: &[usize], v: &[f64]) -> Result<Vec<f64>> {
    let q = active.len();
    let mut g = vec![0.0; q * q];
    for a in 0..q {
        for c in 0..=a {
            g[a * q + c] = dot(&normals[active[a]], &normals[active[c]]);
        }
    }
    for a in 0..q {
        for c in 0..=a {
            let mut sum = g[a * q + c];
            for k in 0..c {
                sum -= g[a * q + k] * g[c * q + k];
            }
            if a == c {
                if sum <= 0.0 {
                    return Err(Error::Numerical("projection: dependent active constraints".into()));
                }
                g[a * q + a] = sum.sqrt();
            } else {
                g[a * q + c] = sum / g[c * q + c];
            }
        }
    }
    let mut r: Vec<f64> = active.iter().map(|&k| dot(&normals[k], v)).collect();
    for a in 0..q {
        let s: f64 = (0..a).map(|k| g[a * q + k] * r[k]).sum();
        r[a] = (r[a] - s) / g[a * q + a];
    }
    for a in (0..q).rev() {
        let s: f64 = (a + 1..q).map(|k| g[k * q + a] * r[k]).sum();
        r[a] = (r[a] - s) / g[a * q + a];
    }
    Ok(r)
}

/// Clear rounding noise on the sign constraints.
fn finish(mut b: Vec<f64>, jn: usize) -> Vec<f64> {
    for v in b.iter_mut().take(jn) {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn one_cell(x: f64, n: f64, m: f64) -> CovariatesProblem {
        CovariatesProblem::new(
            Array4::from_elem((1, 1, 1, 1), n),
            Array4::from_elem((1, 1, 1, 1), m),
            Array2::from_elem((1, 1), x),
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn lambda_is_linear_in_beta() {
        let p = one_cell(2.0, 1.0, 1.0);
        assert_eq!(p.lambda_of_beta(&Array4::from_elem((1, 1, 1, 1), 3.0), 0, 0, 0, 0), 6.0);
        assert_eq!(p.lambda_of_beta(&Array4::zeros((1, 1, 1, 1)), 0, 0, 0, 0), 0.0);
    }

    #[test]
    fn single_cell_objective() {
        let p = one_cell(1.0, 10.0, 20.0);
        let beta = Array4::from_elem((1, 1, 1, 1), 2.0);
        assert_relative_eq!(p.f(&beta).unwrap(), 6.1371, epsilon = 1e-4);
        assert_eq!(p.gradient(&beta).unwrap()[[0, 0, 0, 0]], 0.0);
        assert!(p.f(&Array4::zeros((1, 1, 1, 1))).is_err());
    }

    #[test]
    fn rescaling_regressors_keeps_objective() {
        let p = one_cell(1.0, 10.0, 20.0);
        let q = one_cell(2.0, 10.0, 20.0);
        let beta = Array4::from_elem((1, 1, 1, 1), 1.3);
        assert_relative_eq!(p.f(&beta).unwrap(), q.f(&(&beta / 2.0)).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn projection_examples() {
        let x1 = array![[1.0]];
        assert_relative_eq!(project_block(&x1, 0.1, &[-1.0]).unwrap()[0], 0.1, epsilon = 1e-12);
        let x2 = array![[1.0], [1.0]];
        let b = project_block(&x2, 1.0, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(b[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(b[1], 0.5, epsilon = 1e-12);
        let b = project_block(&x2, 1.0, &[3.0, 2.0]).unwrap();
        assert_eq!(b, vec![3.0, 2.0]);
    }

    #[test]
    fn feasibility_checks() {
        let p = one_cell(1.0, 1.0, 1.0);
        let param = Param::default();
        assert!(!p.is_feasible(&param, &Array4::zeros((1, 1, 1, 1))));
        assert!(!p.is_feasible(&param, &Array4::from_elem((1, 1, 1, 1), -1.0)));
        let proj = p.projection(&param, &Array4::from_elem((1, 1, 1, 1), -7.0)).unwrap();
        assert!(p.is_feasible(&param, &proj));
    }

    #[test]
    fn zero_arrivals_push_to_the_floor() {
        use crate::engine::projected_gradient_armijo_feasible;
        let p = one_cell(1.0, 5.0, 0.0);
        let param = Param { accuracy: 1e-12, ..Param::default() };
        let rep = projected_gradient_armijo_feasible(&p, &param, &Array4::from_elem((1, 1, 1, 1), 3.0)).unwrap();
        assert_relative_eq!(rep.x[[0, 0, 0, 0]], param.eps, epsilon = 1e-12);
    }

    #[test]
    fn rejects_zone_without_regressors() {
        let r = CovariatesProblem::new(
            Array4::zeros((1, 1, 1, 2)),
            Array4::zeros((1, 1, 1, 2)),
            array![[1.0, 0.0]],
            vec![1.0],
        );
        assert!(r.is_err());
    }
}
