//! Area algebra between two partitions of the same border.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::intersect;
use crate::spatial::RegionSet;

/// Attribute holding a region's area before it was clipped to the border.
pub const SOURCE_AREA_ATTR: &str = "source_area_km2";

/// `A[i, j]` = area in km² of `d1` region i intersected with `d2` region j.
pub fn intersection_matrix(d1: &RegionSet, d2: &RegionSet) -> Array2<f64> {
    let ctx = *d1.ctx();
    let (n1, n2) = (d1.len(), d2.len());
    let rows: Vec<Vec<f64>> = d1
        .regions()
        .par_iter()
        .map(|a| {
            d2.regions()
                .iter()
                .map(|b| {
                    if a.bbox.intersects(&b.bbox, 0.0) {
                        intersect(&a.geometry, &b.geometry).area_km2(&ctx)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Array2::from_shape_fn((n1, n2), |(i, j)| rows[i][j])
}

/// Spread per-region totals of `d2` onto `d1` assuming uniform density:
/// `value_i = Σ_j P_j · A(i, j) / A(j)`.
///
/// `A(j)` is the area of `d2` region j before clipping when the region
/// carries a `source_area_km2` attribute, otherwise its clipped area. The
/// result is stored on `d1` as attribute `name` and returned.
pub fn disaggregate_feature(d1: &mut RegionSet, d2: &RegionSet, totals: &[f64], name: &str) -> Result<Vec<f64>> {
    if totals.len() != d2.len() {
        return Err(Error::InvalidInput(format!(
            "{} totals given for {} regions",
            totals.len(),
            d2.len()
        )));
    }
    if let Some(p) = totals.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidInput(format!("totals must be non-negative, got {p}")));
    }
    let density: Vec<f64> = d2
        .regions()
        .iter()
        .zip(totals)
        .map(|(r, &p)| {
            let area = r.attributes.get(SOURCE_AREA_ATTR).copied().unwrap_or(r.area_km2);
            if area > 0.0 {
                Ok(p / area)
            } else if p == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::Geometry(format!("region {} has zero area but total {p}", r.id)))
            }
        })
        .collect::<Result<_>>()?;
    let a = intersection_matrix(d1, d2);
    let values: Vec<f64> = a.rows().into_iter().map(|row| row.iter().zip(&density).map(|(a, d)| a * d).sum()).collect();
    for (i, &v) in values.iter().enumerate() {
        d1.set_attribute(i, name, v);
    }
    Ok(values)
}

/// Area of each `d1` region covered by each class of `d2` regions, stored as
/// attributes `{prefix}{class}` and returned as an `n1 × classes` matrix.
pub fn area_by_class(d1: &mut RegionSet, d2: &RegionSet, class_of: &[usize], prefix: &str) -> Result<Array2<f64>> {
    if class_of.len() != d2.len() {
        return Err(Error::InvalidInput(format!(
            "{} class labels given for {} regions",
            class_of.len(),
            d2.len()
        )));
    }
    let classes = class_of.iter().max().map_or(0, |m| m + 1);
    let a = intersection_matrix(d1, d2);
    let mut out = Array2::zeros((d1.len(), classes));
    for ((i, j), v) in a.indexed_iter() {
        out[[i, class_of[j]]] += v;
    }
    for i in 0..d1.len() {
        for l in 0..classes {
            d1.set_attribute(i, &format!("{prefix}{l}"), out[[i, l]]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;
    use crate::spatial::{discretize_custom, discretize_rect, Border};
    use approx::assert_relative_eq;

    fn square() -> Border {
        Border::from_map(Polygon::rect(0.0, 0.0, 1.0, 1.0).unwrap().into()).unwrap()
    }

    #[test]
    fn halves_against_halves() {
        let b = square();
        let vertical = discretize_rect(&b, 2, 1).unwrap();
        let horizontal = discretize_rect(&b, 1, 2).unwrap();
        let a = intersection_matrix(&vertical, &horizontal);
        let quarter = b.area_km2() / 4.0;
        for v in a.iter() {
            assert_relative_eq!(*v, quarter, max_relative = 1e-9);
        }
    }

    #[test]
    fn self_intersection_is_diagonal() {
        let rs = discretize_rect(&square(), 3, 2).unwrap();
        let a = intersection_matrix(&rs, &rs);
        for ((i, j), v) in a.indexed_iter() {
            if i == j {
                assert_relative_eq!(*v, rs.region(i).area_km2, max_relative = 1e-9);
            } else {
                assert!(*v <= 1e-6 * rs.region(i).area_km2);
            }
        }
    }

    #[test]
    fn rotated_split_gets_average() {
        let b = square();
        let horizontal = discretize_rect(&b, 1, 2).unwrap();
        let mut vertical = discretize_rect(&b, 2, 1).unwrap();
        let v = disaggregate_feature(&mut vertical, &horizontal, &[10.0, 30.0], "pop").unwrap();
        assert_relative_eq!(v[0], 20.0, max_relative = 1e-9);
        assert_relative_eq!(v[1], 20.0, max_relative = 1e-9);
        assert_eq!(vertical.region(0).attributes["pop"], v[0]);
    }

    #[test]
    fn uniform_density_from_border() {
        let b = square();
        let whole = discretize_rect(&b, 1, 1).unwrap();
        let mut grid = discretize_rect(&b, 3, 3).unwrap();
        let v = disaggregate_feature(&mut grid, &whole, &[100.0], "pop").unwrap();
        for (i, x) in v.iter().enumerate() {
            assert_relative_eq!(*x, 100.0 * grid.region(i).area_km2 / b.area_km2(), max_relative = 1e-9);
        }
    }

    #[test]
    fn clipped_source_keeps_unclipped_density() {
        let b = square();
        let outer: crate::geometry::MultiPolygon = Polygon::rect(0.0, 0.0, 1.0, 2.0).unwrap().into();
        let source = discretize_custom(&b, vec![outer]).unwrap();
        let mut target = discretize_rect(&b, 1, 1).unwrap();
        let v = disaggregate_feature(&mut target, &source, &[10.0], "pop").unwrap();
        assert_relative_eq!(v[0], 5.0, max_relative = 1e-4);
    }

    #[test]
    fn classes_sum_to_region_area() {
        let b = square();
        let land = discretize_rect(&b, 4, 4).unwrap();
        let mut grid = discretize_rect(&b, 2, 3).unwrap();
        let classes: Vec<usize> = (0..land.len()).map(|j| j % 3).collect();
        let table = area_by_class(&mut grid, &land, &classes, "land_").unwrap();
        for i in 0..grid.len() {
            assert_relative_eq!(table.row(i).sum(), grid.region(i).area_km2, max_relative = 1e-4);
        }
        assert!(grid.region(0).attributes.contains_key("land_2"));
    }
}
