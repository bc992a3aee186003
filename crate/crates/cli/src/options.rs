//! `key=value` options for the calibrate command, from a config file and
//! the command line.

use std::path::{Path, PathBuf};

use intensity_core::engine::Param;
use intensity_core::io::{InputPaths, Method, ModelType};

use crate::CliError;

/// Every option the calibrate command understands.
pub const KEYS: &[&str] = &[
    "EPS",
    "sigma",
    "accuracy",
    "max_iter",
    "lower_lambda",
    "upper_lambda",
    "beta_bar",
    "cv_proportion",
    "output_file",
    "model_type",
    "method",
    "algorithm",
    "info_file",
    "arrivals_file",
    "neighbors_file",
    "alpha_regions_file",
    "time_groups_file",
    "duration",
    "cv_weights_file",
];

/// Parse `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str, source: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{source}:{}: expected key=value", k + 1)))?;
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Parse `--key=value`, `--key value` or `key=value` command-line overrides.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let body = arg.trim_start_matches('-');
        if let Some((k, v)) = body.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else if arg.starts_with('-') {
            let value = it
                .next()
                .ok_or_else(|| CliError::Usage(format!("option {arg} needs a value")))?;
            out.push((body.to_string(), value.clone()));
        } else {
            return Err(CliError::Usage(format!("unexpected argument '{arg}'")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CalibrateOptions {
    pub param: Param,
    pub output_file: PathBuf,
    pub model_type: ModelType,
    pub method: Method,
    pub paths: InputPaths,
    pub duration: Option<f64>,
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("option {key}: invalid value '{value}'")))
}

/// Resolve options; later entries override earlier ones. Paths from the
/// config file are relative to its directory.
pub fn resolve(
    config: &[(String, String)],
    config_dir: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<CalibrateOptions, CliError> {
    let mut param = Param::default();
    let mut output_file = None;
    let mut model_type = ModelType::NoReg;
    let mut method = Method::Calibration;
    let mut algorithm = "feasible".to_string();
    let mut paths = InputPaths::default();
    let mut duration = None;

    let tagged = config
        .iter()
        .map(|kv| (kv, config_dir))
        .chain(overrides.iter().map(|kv| (kv, None)));
    for ((key, value), base) in tagged {
        let path = || match base {
            Some(dir) if Path::new(value).is_relative() => Some(dir.join(value)),
            _ => Some(PathBuf::from(value)),
        };
        match key.as_str() {
            "EPS" => param.eps = number(key, value)?,
            "sigma" => param.sigma = number(key, value)?,
            "accuracy" => param.accuracy = number(key, value)?,
            "max_iter" => param.max_iter = number(key, value)?,
            "lower_lambda" => param.lower_lambda = number(key, value)?,
            "upper_lambda" => param.upper_lambda = number(key, value)?,
            "beta_bar" => param.beta_bar = number(key, value)?,
            "cv_proportion" => param.cv_proportion = number(key, value)?,
            "duration" => duration = Some(number(key, value)?),
            "output_file" => output_file = path(),
            "model_type" => model_type = ModelType::parse(value).map_err(|e| CliError::Usage(e.to_string()))?,
            "method" => method = Method::parse(value).map_err(|e| CliError::Usage(e.to_string()))?,
            "algorithm" => algorithm = value.clone(),
            "info_file" => paths.info = path(),
            "arrivals_file" => paths.arrivals = path(),
            "neighbors_file" => paths.neighbors = path(),
            "alpha_regions_file" => paths.alpha = path(),
            "time_groups_file" => paths.time_groups = path(),
            "cv_weights_file" => paths.cv_weights = path(),
            other => return Err(CliError::Usage(format!("unknown option '{other}'"))),
        }
    }
    match algorithm.as_str() {
        "feasible" => {}
        "boundary" => return Err(CliError::Usage("algorithm=boundary: unsupported variant".into())),
        other => return Err(CliError::Usage(format!("algorithm must be 'feasible' or 'boundary', got '{other}'"))),
    }
    if model_type == ModelType::Reg && method == Method::CrossValidation {
        return Err(CliError::Usage(
            "model_type=reg only supports method=calibration".into(),
        ));
    }
    param.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut required = vec![("info_file", &paths.info), ("arrivals_file", &paths.arrivals), ("neighbors_file", &paths.neighbors)];
    if model_type == ModelType::NoReg {
        required.push(("alpha_regions_file", &paths.alpha));
        required.push(("time_groups_file", &paths.time_groups));
        if method == Method::CrossValidation {
            required.push(("cv_weights_file", &paths.cv_weights));
        }
    }
    if let Some((name, _)) = required.iter().find(|(_, p)| p.is_none()) {
        return Err(CliError::Usage(format!("missing required option {name}")));
    }
    let output_file = output_file.ok_or_else(|| CliError::Usage("missing required option output_file".into()))?;
    Ok(CalibrateOptions { param, output_file, model_type, method, paths, duration })
}
