//! Text formats consumed and produced by the calibration front end.
//!
//! All readers split on arbitrary whitespace; all writers use single spaces
//! and `\n`. Floating-point values are written with 17 significant digits
//! (C's `%#.17g`), which round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::{Array2, Array3, Array4};

use crate::error::{Error, Result};

/// Format like C's `%#.17g`: 17 significant digits, trailing zeros kept.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        let sign = if x.is_sign_negative() { "-" } else { "" };
        return format!("{sign}0.0000000000000000");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else if exp == 16 {
        format!("{x:.0}.")
    } else {
        format!("{:.*}", (16 - exp) as usize, x)
    }
}

fn parse_token<T: std::str::FromStr>(tok: &str, what: &str, src: &str, line: usize) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| Error::parse(src, line, format!("invalid {what} '{tok}'")))
}

fn parse_f64(tok: &str, what: &str, src: &str, line: usize) -> Result<f64> {
    let v: f64 = parse_token(tok, what, src, line)?;
    if !v.is_finite() {
        return Err(Error::parse(src, line, format!("{what} must be finite, got '{tok}'")));
    }
    Ok(v)
}

fn check_range(v: usize, bound: usize, what: &str, src: &str, line: usize) -> Result<usize> {
    if v >= bound {
        return Err(Error::parse(
            src,
            line,
            format!("{what} {v} out of range [0, {bound})"),
        ));
    }
    Ok(v)
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty())
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// General model dimensions and per-day observation counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Info {
    /// T: periods per day.
    pub periods: usize,
    /// G: week days.
    pub weekdays: usize,
    /// R: zones.
    pub zones: usize,
    /// C: arrival types.
    pub types: usize,
    /// J: covariates per zone.
    pub regressors: usize,
    /// H: holidays.
    pub holidays: usize,
    /// N_g for g in 0..G+H; holidays use indices G..G+H.
    pub observations: Vec<usize>,
}

impl Info {
    /// D: week days plus holidays.
    pub fn days(&self) -> usize {
        self.weekdays + self.holidays
    }
}

pub fn parse_info(text: &str, src: &str) -> Result<Info> {
    let mut lines = content_lines(text);
    let (l1, head) = lines
        .next()
        .ok_or_else(|| Error::parse(src, 1, "missing header line"))?;
    if head.len() != 6 {
        return Err(Error::parse(src, l1, format!("expected 6 values (T G R C J H), found {}", head.len())));
    }
    let nums: Vec<usize> = head
        .iter()
        .map(|t| parse_token(t, "count", src, l1))
        .collect::<Result<_>>()?;
    let (periods, weekdays, zones, types, regressors, holidays) =
        (nums[0], nums[1], nums[2], nums[3], nums[4], nums[5]);
    for (v, name) in [(periods, "T"), (weekdays, "G"), (zones, "R"), (types, "C")] {
        if v == 0 {
            return Err(Error::parse(src, l1, format!("{name} must be positive")));
        }
    }
    let days = weekdays
        .checked_add(holidays)
        .ok_or_else(|| Error::parse(src, l1, "G + H overflows"))?;
    let (l2, obs) = lines
        .next()
        .ok_or_else(|| Error::parse(src, l1 + 1, "missing observation-count line"))?;
    if obs.len() != days {
        return Err(Error::parse(
            src,
            l2,
            format!("expected {days} observation counts (G + H), found {}", obs.len()),
        ));
    }
    let observations = obs
        .iter()
        .map(|t| parse_token(t, "observation count", src, l2))
        .collect::<Result<_>>()?;
    if let Some((l, _)) = lines.next() {
        return Err(Error::parse(src, l, "unexpected extra line"));
    }
    Ok(Info {
        periods,
        weekdays,
        zones,
        types,
        regressors,
        holidays,
        observations,
    })
}

pub fn write_info(info: &Info) -> String {
    let obs: Vec<String> = info.observations.iter().map(|n| n.to_string()).collect();
    format!(
        "{} {} {} {} {} {}\n{}\n",
        info.periods,
        info.weekdays,
        info.zones,
        info.types,
        info.regressors,
        info.holidays,
        obs.join(" ")
    )
}

/// One sample line: `t g r c j count holiday_flag`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArrivalEntry {
    pub t: usize,
    pub g: usize,
    pub r: usize,
    pub c: usize,
    pub j: usize,
    pub count: u64,
    pub holiday: bool,
}

pub fn parse_arrivals(text: &str, info: &Info, src: &str) -> Result<Vec<ArrivalEntry>> {
    content_lines(text)
        .map(|(ln, toks)| {
            if toks.len() != 7 {
                return Err(Error::parse(src, ln, format!("expected 7 values, found {}", toks.len())));
            }
            let idx = |k: usize, what: &str| parse_token::<usize>(toks[k], what, src, ln);
            let t = check_range(idx(0, "period")?, info.periods, "period", src, ln)?;
            let g = check_range(idx(1, "day")?, info.days(), "day", src, ln)?;
            let r = check_range(idx(2, "zone")?, info.zones, "zone", src, ln)?;
            let c = check_range(idx(3, "type")?, info.types, "type", src, ln)?;
            let j = check_range(idx(4, "sample")?, info.observations[g], "sample", src, ln)?;
            let count = parse_token::<u64>(toks[5], "arrival count", src, ln)?;
            let holiday = match toks[6] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::parse(src, ln, format!("holiday flag must be 0 or 1, got '{other}'")))
                }
            };
            Ok(ArrivalEntry { t, g, r, c, j, count, holiday })
        })
        .collect()
}

pub fn write_arrivals(entries: &[ArrivalEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        writeln!(out, "{} {} {} {} {} {} {}", e.t, e.g, e.r, e.c, e.j, e.count, e.holiday as u8).unwrap();
    }
    out
}

/// One zone description: `id lat lon type x_1..x_J (nbr_id nbr_dist)*`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZoneRow {
    pub id: usize,
    pub lat: f64,
    pub lon: f64,
    pub kind: i64,
    pub regressors: Vec<f64>,
    pub neighbors: Vec<(usize, f64)>,
}

pub fn parse_neighbors(text: &str, info: &Info, src: &str) -> Result<Vec<ZoneRow>> {
    let jn = info.regressors;
    let mut seen = vec![false; info.zones];
    let mut rows = Vec::with_capacity(info.zones);
    let mut last_line = 0;
    for (ln, toks) in content_lines(text) {
        last_line = ln;
        if toks.len() < 4 + jn || !(toks.len() - 4 - jn).is_multiple_of(2) {
            return Err(Error::parse(
                src,
                ln,
                format!("expected 4 + {jn} values followed by (neighbor, distance) pairs, found {} values", toks.len()),
            ));
        }
        let id = check_range(parse_token(toks[0], "zone id", src, ln)?, info.zones, "zone id", src, ln)?;
        if std::mem::replace(&mut seen[id], true) {
            return Err(Error::parse(src, ln, format!("zone {id} described twice")));
        }
        let lat = parse_f64(toks[1], "latitude", src, ln)?;
        let lon = parse_f64(toks[2], "longitude", src, ln)?;
        let kind = parse_token(toks[3], "zone type", src, ln)?;
        let regressors = toks[4..4 + jn]
            .iter()
            .map(|t| parse_f64(t, "regressor", src, ln))
            .collect::<Result<Vec<_>>>()?;
        if regressors.iter().any(|&x| x < 0.0) {
            return Err(Error::parse(src, ln, "regressor values must be non-negative"));
        }
        let neighbors = toks[4 + jn..]
            .chunks(2)
            .map(|pair| {
                let nb = check_range(parse_token(pair[0], "neighbor id", src, ln)?, info.zones, "neighbor id", src, ln)?;
                let d = parse_f64(pair[1], "neighbor distance", src, ln)?;
                if d < 0.0 {
                    return Err(Error::parse(src, ln, "neighbor distance must be non-negative"));
                }
                Ok((nb, d))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(ZoneRow { id, lat, lon, kind, regressors, neighbors });
    }
    if rows.len() != info.zones {
        return Err(Error::parse(
            src,
            last_line.max(1),
            format!("expected {} zone lines, found {}", info.zones, rows.len()),
        ));
    }
    Ok(rows)
}

pub fn write_neighbors(rows: &[ZoneRow]) -> String {
    let mut out = String::new();
    for z in rows {
        let mut fields = vec![z.id.to_string(), format_float(z.lat), format_float(z.lon), z.kind.to_string()];
        fields.extend(z.regressors.iter().map(|&x| format_float(x)));
        for &(nb, d) in &z.neighbors {
            fields.push(nb.to_string());
            fields.push(format_float(d));
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

/// R×R space-regularization matrix; must be symmetric and non-negative.
pub fn parse_alpha(text: &str, zones: usize, src: &str) -> Result<Array2<f64>> {
    let lines: Vec<(usize, Vec<&str>)> = content_lines(text).collect();
    if lines.len() != zones {
        let ln = lines.last().map_or(1, |(l, _)| *l);
        return Err(Error::parse(src, ln, format!("expected {zones} matrix rows, found {}", lines.len())));
    }
    let mut alpha = Array2::zeros((zones, zones));
    for (i, (ln, toks)) in lines.iter().enumerate() {
        if toks.len() != zones {
            return Err(Error::parse(src, *ln, format!("expected {zones} values, found {}", toks.len())));
        }
        for (j, t) in toks.iter().enumerate() {
            let v = parse_f64(t, "weight", src, *ln)?;
            if v < 0.0 {
                return Err(Error::parse(src, *ln, "weights must be non-negative"));
            }
            alpha[[i, j]] = v;
        }
    }
    for i in 0..zones {
        for j in i + 1..zones {
            let (a, b) = (alpha[[i, j]], alpha[[j, i]]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                return Err(Error::parse(src, lines[i].0, format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    Ok(alpha)
}

pub fn write_alpha(alpha: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in alpha.rows() {
        let fields: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

/// Period groups for the time-smoothing penalty.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGroups {
    pub count: usize,
    /// Group of each period in 0..D*T.
    pub which_group: Vec<usize>,
    /// Penalty per group; `None` when the file was read for cross validation.
    pub weights: Option<Vec<f64>>,
}

pub fn parse_time_groups(text: &str, periods: usize, read_weights: bool, src: &str) -> Result<TimeGroups> {
    let mut toks = content_lines(text).flat_map(|(ln, toks)| toks.into_iter().map(move |t| (ln, t)));
    let (ln0, t0) = toks.next().ok_or_else(|| Error::parse(src, 1, "missing group count"))?;
    let count: usize = parse_token(t0, "group count", src, ln0)?;
    if count == 0 {
        return Err(Error::parse(src, ln0, "group count must be positive"));
    }
    let mut last = ln0;
    let mut which_group = Vec::with_capacity(periods);
    for k in 0..periods {
        let (ln, t) = toks
            .next()
            .ok_or_else(|| Error::parse(src, last, format!("expected {periods} group indices, found {k}")))?;
        last = ln;
        which_group.push(check_range(parse_token(t, "group index", src, ln)?, count, "group index", src, ln)?);
    }
    let weights = if read_weights {
        let mut w = Vec::with_capacity(count);
        for k in 0..count {
            let (ln, t) = toks
                .next()
                .ok_or_else(|| Error::parse(src, last, format!("expected {count} group weights, found {k}")))?;
            last = ln;
            let v = parse_f64(t, "group weight", src, ln)?;
            if v < 0.0 {
                return Err(Error::parse(src, ln, "group weights must be non-negative"));
            }
            w.push(v);
        }
        if let Some((ln, _)) = toks.next() {
            return Err(Error::parse(src, ln, "unexpected trailing values"));
        }
        Some(w)
    } else {
        None
    };
    Ok(TimeGroups { count, which_group, weights })
}

pub fn write_time_groups(groups: &TimeGroups) -> String {
    let mut out = format!("{}\n", groups.count);
    for g in &groups.which_group {
        writeln!(out, "{g}").unwrap();
    }
    for w in groups.weights.iter().flatten() {
        writeln!(out, "{}", format_float(*w)).unwrap();
    }
    out
}

pub fn parse_cv_weights(text: &str, src: &str) -> Result<Vec<f64>> {
    content_lines(text)
        .flat_map(|(ln, toks)| toks.into_iter().map(move |t| (ln, t)))
        .map(|(ln, t)| {
            let v = parse_f64(t, "weight", src, ln)?;
            if v < 0.0 {
                return Err(Error::parse(src, ln, format!("each weight must be non-negative, got {t}")));
            }
            Ok(v)
        })
        .collect()
}

pub fn write_cv_weights(weights: &[f64]) -> String {
    let fields: Vec<String> = weights.iter().map(|&w| format_float(w)).collect();
    format!("{}\n", fields.join(" "))
}

/// Intensities `c r t lambda`, one line per cell, t fastest.
pub fn write_intensities(lambda: &Array3<f64>) -> String {
    let mut out = String::new();
    for ((c, r, t), v) in lambda.indexed_iter() {
        writeln!(out, "{c} {r} {t} {}", format_float(*v)).unwrap();
    }
    out
}

/// Covariate coefficients `c d t j beta`, one line per entry, j fastest.
pub fn write_coefficients(beta: &Array4<f64>) -> String {
    let mut out = String::new();
    for ((c, d, t, j), v) in beta.indexed_iter() {
        writeln!(out, "{c} {d} {t} {j} {}", format_float(*v)).unwrap();
    }
    out
}

fn parse_indexed<const K: usize>(text: &str, shape: [usize; K], src: &str) -> Result<Vec<([usize; K], f64)>> {
    content_lines(text)
        .map(|(ln, toks)| {
            if toks.len() != K + 1 {
                return Err(Error::parse(src, ln, format!("expected {} values, found {}", K + 1, toks.len())));
            }
            let mut idx = [0usize; K];
            for k in 0..K {
                idx[k] = check_range(parse_token(toks[k], "index", src, ln)?, shape[k], "index", src, ln)?;
            }
            Ok((idx, parse_f64(toks[K], "value", src, ln)?))
        })
        .collect()
}

pub fn parse_intensities(text: &str, shape: (usize, usize, usize), src: &str) -> Result<Array3<f64>> {
    let mut out = Array3::zeros(shape);
    for (idx, v) in parse_indexed(text, [shape.0, shape.1, shape.2], src)? {
        out[idx] = v;
    }
    Ok(out)
}

pub fn parse_coefficients(text: &str, shape: (usize, usize, usize, usize), src: &str) -> Result<Array4<f64>> {
    let mut out = Array4::zeros(shape);
    for (idx, v) in parse_indexed(text, [shape.0, shape.1, shape.2, shape.3], src)? {
        out[idx] = v;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelType {
    /// Covariates model.
    Reg,
    /// Regularized model without covariates.
    NoReg,
}

impl ModelType {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "reg" => Ok(ModelType::Reg),
            "no_reg" => Ok(ModelType::NoReg),
            other => Err(Error::InvalidInput(format!("model_type must be 'reg' or 'no_reg', got '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Calibration,
    CrossValidation,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "calibration" => Ok(Method::Calibration),
            "cross_validation" => Ok(Method::CrossValidation),
            other => Err(Error::InvalidInput(format!(
                "method must be 'calibration' or 'cross_validation', got '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct InputPaths {
    pub info: Option<PathBuf>,
    pub arrivals: Option<PathBuf>,
    pub neighbors: Option<PathBuf>,
    pub alpha: Option<PathBuf>,
    pub time_groups: Option<PathBuf>,
    pub cv_weights: Option<PathBuf>,
}

/// Everything read from the calibration input files.
#[derive(Clone, Debug)]
pub struct CalibrationBundle {
    pub info: Info,
    pub arrivals: Vec<ArrivalEntry>,
    pub zones: Vec<ZoneRow>,
    pub alpha: Option<Array2<f64>>,
    pub time_groups: Option<TimeGroups>,
    pub cv_weights: Option<Vec<f64>>,
}

fn required<'a>(p: &'a Option<PathBuf>, option: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::InvalidInput(format!("missing required option {option}")))
}

fn read_with<T>(path: &Path, f: impl FnOnce(&str, &str) -> Result<T>) -> Result<T> {
    let text = read_text(path)?;
    f(&text, &path.display().to_string())
}

/// Read the subset of files the model and method need.
pub fn read_calibration_inputs(paths: &InputPaths, model: ModelType, method: Method) -> Result<CalibrationBundle> {
    let info = read_with(required(&paths.info, "info_file")?, parse_info)?;
    let arrivals = read_with(required(&paths.arrivals, "arrivals_file")?, |t, s| parse_arrivals(t, &info, s))?;
    let zones = read_with(required(&paths.neighbors, "neighbors_file")?, |t, s| parse_neighbors(t, &info, s))?;
    let mut bundle = CalibrationBundle {
        info,
        arrivals,
        zones,
        alpha: None,
        time_groups: None,
        cv_weights: None,
    };
    if model == ModelType::NoReg {
        let r = bundle.info.zones;
        bundle.alpha = Some(read_with(required(&paths.alpha, "alpha_regions_file")?, |t, s| parse_alpha(t, r, s))?);
        let periods = bundle.info.days() * bundle.info.periods;
        let read_weights = method == Method::Calibration;
        bundle.time_groups = Some(read_with(required(&paths.time_groups, "time_groups_file")?, |t, s| {
            parse_time_groups(t, periods, read_weights, s)
        })?);
        if method == Method::CrossValidation {
            bundle.cv_weights = Some(read_with(required(&paths.cv_weights, "cv_weights_file")?, parse_cv_weights)?);
        }
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn info_1() -> Info {
        parse_info("1 7 1 1 1 0\n1 1 1 1 1 1 1\n", "info").unwrap()
    }

    #[test]
    fn float_format_matches_c() {
        assert_eq!(format_float(2.0), "2.0000000000000000");
        assert_eq!(format_float(0.0), "0.0000000000000000");
        assert_eq!(format_float(0.1), "0.10000000000000001");
        assert_eq!(format_float(123.456), "123.45600000000000");
        assert_eq!(format_float(1e-6), "9.9999999999999995e-07");
        assert_eq!(format_float(-2.5e20), "-2.5000000000000000e+20");
        assert_eq!(format_float(1e16), "10000000000000000.");
        assert_eq!(format_float(0.0001), "0.00010000000000000000");
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2e-300, 1.7976931348623157e308, -5e-324, 6.02214076e23] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn minimal_info() {
        let info = info_1();
        assert_eq!(
            info,
            Info { periods: 1, weekdays: 7, zones: 1, types: 1, regressors: 1, holidays: 0, observations: vec![1; 7] }
        );
        assert!(parse_info("1 7 1 1 1 0\n1 1 1\n", "info").is_err());
        assert!(parse_info("1 7 1 1 1\n1 1 1 1 1 1 1\n", "info").is_err());
    }

    #[test]
    fn arrivals_line() {
        let info = info_1();
        let e = parse_arrivals("0 0 0 0 0 3 0\n", &info, "arr").unwrap();
        assert_eq!(e, vec![ArrivalEntry { t: 0, g: 0, r: 0, c: 0, j: 0, count: 3, holiday: false }]);
        let err = parse_arrivals("0 0 0 0 0 3 0\n0 0 5 0 0 3 0\n", &info, "arr").unwrap_err();
        assert!(err.to_string().starts_with("arr:2:"), "{err}");
        assert!(parse_arrivals("0 0 0 0 1 3 0\n", &info, "arr").is_err());
        assert!(parse_arrivals("0 0 0 0 0 3\n", &info, "arr").is_err());
        assert!(parse_arrivals("0 0 0 0 0 3 2\n", &info, "arr").is_err());
    }

    #[test]
    fn alpha_shape_and_symmetry() {
        assert!(parse_alpha("0 1\n", 2, "a").is_err());
        assert!(parse_alpha("0 1\n2 0\n", 2, "a").is_err());
        assert!(parse_alpha("0 -1\n-1 0\n", 2, "a").is_err());
        let a = parse_alpha("0 1.5\n1.5 0\n", 2, "a").unwrap();
        assert_eq!(a[[0, 1]], 1.5);
    }

    #[test]
    fn neighbors_lines() {
        let info = parse_info("1 7 2 1 1 0\n1 1 1 1 1 1 1\n", "info").unwrap();
        let rows = parse_neighbors("0 -22.9 -43.2 0 100 1 2.5\n1 -22.8 -43.1 0 50 0 2.5\n", &info, "nb").unwrap();
        assert_eq!(rows[0].neighbors, vec![(1, 2.5)]);
        assert_eq!(rows[1].regressors, vec![50.0]);
        assert!(parse_neighbors("0 -22.9 -43.2 0 100 1\n1 -22.8 -43.1 0 50\n", &info, "nb").is_err());
        assert!(parse_neighbors("0 -22.9 -43.2 0 100\n", &info, "nb").is_err());
        assert!(parse_neighbors("0 -22.9 -43.2 0 100\n0 -22.9 -43.2 0 100\n", &info, "nb").is_err());
    }

    #[test]
    fn time_groups_and_cv_weights() {
        let g = parse_time_groups("2\n0\n1\n1\n0.5\n2\n", 3, true, "tg").unwrap();
        assert_eq!(g.which_group, vec![0, 1, 1]);
        assert_eq!(g.weights, Some(vec![0.5, 2.0]));
        let g = parse_time_groups("2\n0\n1\n1\n", 3, false, "tg").unwrap();
        assert_eq!(g.weights, None);
        assert!(parse_time_groups("2\n0\n3\n1\n0.5\n2\n", 3, true, "tg").is_err());
        assert!(parse_time_groups("2\n0\n1\n1\n0.5\n", 3, true, "tg").is_err());

        assert_eq!(parse_cv_weights("0 0.1 10\n", "cv").unwrap(), vec![0.0, 0.1, 10.0]);
        let err = parse_cv_weights("0 -1\n", "cv").unwrap_err();
        assert!(err.to_string().contains("non-negative"));
    }

    #[test]
    fn output_lines() {
        let lambda = Array3::from_elem((1, 1, 1), 2.0);
        assert_eq!(write_intensities(&lambda), "0 0 0 2.0000000000000000\n");
        let beta = Array4::zeros((1, 2, 1, 1));
        let text = write_coefficients(&beta);
        assert_eq!(text, "0 0 0 0 0.0000000000000000\n0 1 0 0 0.0000000000000000\n");
        assert_eq!(parse_coefficients(&text, (1, 2, 1, 1), "o").unwrap(), beta);
    }
}
