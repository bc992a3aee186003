//! Turning calibration files into model instances and running them.
//!
//! Day index `g` and period `t` of the files map to the model period
//! `g * T + t`. Each cell's observation count is `N_g` and its arrivals are
//! the sum of all sample entries for that cell.

use ndarray::{Array2, Array3, Array4};

use crate::covariates::CovariatesProblem;
use crate::engine::{cross_validation, projected_gradient_armijo_feasible, CrossValidationResult, Param, SolveReport};
use crate::error::{Error, Result};
use crate::geometry::{haversine_km, GeoPoint};
use crate::io::{self, CalibrationBundle, Method, ModelType};
use crate::noreg::{ObservationSample, RegularizedInput, RegularizedProblem};

/// Per-cell sample lists of shape (C, R, D·T).
pub fn observation_sample(bundle: &CalibrationBundle) -> ObservationSample {
    let info = &bundle.info;
    let tn = info.periods;
    let mut lists = vec![Vec::new(); info.types * info.zones * info.days() * tn];
    let flat = |c: usize, r: usize, p: usize| (c * info.zones + r) * info.days() * tn + p;
    for c in 0..info.types {
        for r in 0..info.zones {
            for g in 0..info.days() {
                for t in 0..tn {
                    lists[flat(c, r, g * tn + t)] = vec![0.0; info.observations[g]];
                }
            }
        }
    }
    for e in &bundle.arrivals {
        lists[flat(e.c, e.r, e.g * tn + e.t)][e.j] += e.count as f64;
    }
    let mut sample = ObservationSample::new((info.types, info.zones, info.days() * tn));
    for c in 0..info.types {
        for r in 0..info.zones {
            for p in 0..info.days() * tn {
                sample.set(c, r, p, std::mem::take(&mut lists[flat(c, r, p)]));
            }
        }
    }
    sample
}

/// Centroid distances, replaced by the listed neighbor distances.
pub fn distance_matrix(bundle: &CalibrationBundle) -> Result<Array2<f64>> {
    let rn = bundle.info.zones;
    let mut centroids = vec![GeoPoint { lon: 0.0, lat: 0.0 }; rn];
    for z in &bundle.zones {
        centroids[z.id] = GeoPoint::new(z.lon, z.lat)
            .map_err(|e| Error::InvalidInput(format!("zone {}: {e}", z.id)))?;
    }
    let mut d = Array2::from_shape_fn((rn, rn), |(i, j)| haversine_km(&centroids[i], &centroids[j]));
    for z in &bundle.zones {
        for &(j, dist) in &z.neighbors {
            d[[z.id, j]] = dist;
            d[[j, z.id]] = dist;
        }
    }
    Ok(d)
}

fn expand_durations(bundle: &CalibrationBundle, duration: Option<f64>) -> Result<Vec<f64>> {
    let tn = bundle.info.periods;
    let d = duration.unwrap_or(24.0 / tn as f64);
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidInput(format!("duration must be positive, got {d}")));
    }
    Ok(vec![d; tn])
}

pub fn regularized_problem(bundle: &CalibrationBundle, duration: Option<f64>) -> Result<RegularizedProblem> {
    let per_day = expand_durations(bundle, duration)?;
    let days = bundle.info.days();
    let (n, m) = observation_sample(bundle).counts();
    let alpha = bundle
        .alpha
        .clone()
        .ok_or_else(|| Error::InvalidInput("missing required option alpha_regions_file".into()))?;
    let groups = bundle
        .time_groups
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("missing required option time_groups_file".into()))?;
    let mut neighbors = vec![Vec::new(); bundle.info.zones];
    let mut type_region = vec![0; bundle.info.zones];
    for z in &bundle.zones {
        neighbors[z.id] = z.neighbors.iter().map(|(j, _)| *j).collect();
        type_region[z.id] = z.kind;
    }
    RegularizedProblem::new(RegularizedInput {
        n_obs: n,
        n_arr: m,
        durations: per_day.iter().cycle().take(days * per_day.len()).copied().collect(),
        which_group: groups.which_group.clone(),
        group_weights: groups.weights.clone().unwrap_or_else(|| vec![0.0; groups.count]),
        alpha,
        distance: distance_matrix(bundle)?,
        type_region,
        neighbors,
        distance_scaled: false,
    })
}

pub fn covariates_problem(bundle: &CalibrationBundle, duration: Option<f64>) -> Result<CovariatesProblem> {
    let info = &bundle.info;
    let durations = expand_durations(bundle, duration)?;
    let (tn, dn) = (info.periods, info.days());
    let (n3, m3) = observation_sample(bundle).counts();
    let n = Array4::from_shape_fn((info.types, dn, tn, info.zones), |(c, d, t, i)| n3[[c, i, d * tn + t]]);
    let m = Array4::from_shape_fn((info.types, dn, tn, info.zones), |(c, d, t, i)| m3[[c, i, d * tn + t]]);
    let mut x = Array2::zeros((info.regressors, info.zones));
    for z in &bundle.zones {
        for (j, &v) in z.regressors.iter().enumerate() {
            x[[j, z.id]] = v;
        }
    }
    CovariatesProblem::new(n, m, x, durations)
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Intensities(SolveReport<ndarray::Ix3>),
    Coefficients(SolveReport<ndarray::Ix4>),
    CrossValidated(CrossValidationResult),
}

impl Outcome {
    /// Contents of the output file.
    pub fn output_text(&self) -> String {
        match self {
            Outcome::Intensities(r) => io::write_intensities(&r.x),
            Outcome::Coefficients(r) => io::write_coefficients(&r.x),
            Outcome::CrossValidated(r) => io::write_intensities(&r.lambda),
        }
    }
}

/// Run one calibration. `initial` overrides the default starting point of
/// the regularized model.
pub fn calibrate(
    bundle: &CalibrationBundle,
    model: ModelType,
    method: Method,
    param: &Param,
    duration: Option<f64>,
    initial: Option<&Array3<f64>>,
) -> Result<Outcome> {
    param.validate()?;
    match (model, method) {
        (ModelType::Reg, Method::CrossValidation) => Err(Error::InvalidInput(
            "model_type=reg only supports method=calibration".into(),
        )),
        (ModelType::Reg, Method::Calibration) => {
            let p = covariates_problem(bundle, duration)?;
            let x0 = p.initial_point(param);
            Ok(Outcome::Coefficients(projected_gradient_armijo_feasible(&p, param, &x0)?))
        }
        (ModelType::NoReg, Method::Calibration) => {
            let p = regularized_problem(bundle, duration)?;
            let x0 = initial.cloned().unwrap_or_else(|| p.initial_point(param));
            Ok(Outcome::Intensities(projected_gradient_armijo_feasible(&p, param, &x0)?))
        }
        (ModelType::NoReg, Method::CrossValidation) => {
            let p = regularized_problem(bundle, duration)?;
            let weights = bundle
                .cv_weights
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("missing required option cv_weights_file".into()))?;
            Ok(Outcome::CrossValidated(cross_validation(
                param,
                &p,
                &observation_sample(bundle),
                weights,
            )?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_alpha, parse_arrivals, parse_info, parse_neighbors, parse_time_groups};

    fn bundle() -> CalibrationBundle {
        let info = parse_info("2 1 2 1 1 0\n3\n", "info").unwrap();
        let arrivals = parse_arrivals("0 0 0 0 0 2 0\n0 0 0 0 0 1 0\n1 0 1 0 2 4 0\n", &info, "arr").unwrap();
        let zones = parse_neighbors("0 0.0 0.0 0 1 1 7.5\n1 0.0 0.1 0 2 0 7.5\n", &info, "nb").unwrap();
        CalibrationBundle {
            alpha: Some(parse_alpha("0 1\n1 0\n", 2, "a").unwrap()),
            time_groups: Some(parse_time_groups("1\n0\n0\n0.5\n", 2, true, "tg").unwrap()),
            cv_weights: None,
            info,
            arrivals,
            zones,
        }
    }

    #[test]
    fn sample_sums_duplicate_entries() {
        let s = observation_sample(&bundle());
        assert_eq!(s.get(0, 0, 0), &[3.0, 0.0, 0.0]);
        assert_eq!(s.get(0, 1, 1), &[0.0, 0.0, 4.0]);
        assert_eq!(s.get(0, 1, 0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn listed_distances_override_centroids() {
        let d = distance_matrix(&bundle()).unwrap();
        assert_eq!(d[[0, 1]], 7.5);
        assert_eq!(d[[0, 0]], 0.0);
    }

    #[test]
    fn problems_have_expected_shapes() {
        let b = bundle();
        let p = regularized_problem(&b, Some(1.0)).unwrap();
        assert_eq!(p.shape(), (1, 2, 2));
        let q = covariates_problem(&b, None).unwrap();
        assert_eq!(q.beta_shape(), (1, 1, 2, 1));
        let out = calibrate(&b, ModelType::NoReg, Method::Calibration, &Param::default(), Some(1.0), None).unwrap();
        assert_eq!(out.output_text().lines().count(), 4);
    }

    #[test]
    fn reg_with_cross_validation_is_rejected() {
        let r = calibrate(&bundle(), ModelType::Reg, Method::CrossValidation, &Param::default(), None, None);
        assert!(r.is_err());
    }
}
