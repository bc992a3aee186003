//! The `discretize` command: events + border → regions, time indices and
//! aggregated calibration files.

use std::path::{Path, PathBuf};

use clap::Args;
use intensity_core::events::{aggregate, load_events, zone_rows, EventColumns};
use intensity_core::geo_variables::disaggregate_feature;
use intensity_core::geojson::{collect_points, read_features, Geometry};
use intensity_core::io;
use intensity_core::spatial::{discretize_custom, discretize_hex, discretize_rect, discretize_voronoi, Border, RegionSet};
use intensity_core::temporal::{
    parse_custom_intervals, NonUniformPeriodic, TimeDiscretization, TimeUnit, UniformPeriodic,
};

use crate::CliError;

#[derive(Args, Debug)]
pub struct DiscretizeArgs {
    /// Events CSV (`;` or `,` separated).
    #[arg(long)]
    pub events: PathBuf,
    #[arg(long, default_value = "date_time")]
    pub datetime_col: String,
    #[arg(long, default_value = "lat")]
    pub lat_col: String,
    #[arg(long, default_value = "long")]
    pub lon_col: String,
    /// chrono format of the timestamp column; common formats are detected.
    #[arg(long)]
    pub datetime_format: Option<String>,
    /// Categorical feature columns, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    /// `rectangle`, `convex`, or a GeoJSON file.
    #[arg(long, default_value = "rectangle")]
    pub border: String,
    /// `rect NX NY`, `hex R`, `custom FILE` or `voronoi FILE`.
    #[arg(long, num_args = 2..=3, required = true, value_names = ["KIND", "ARG"])]
    pub space: Vec<String>,
    /// `UNIT:WIDTH:PERIOD`, `UNIT:D1,D2,..:PERIOD` or `custom:FILE`; repeatable.
    #[arg(long = "time")]
    pub time: Vec<String>,
    /// GeoJSON whose feature properties are spread onto the regions.
    #[arg(long)]
    pub regressor_source: Option<PathBuf>,
    /// Regressor attribute to emit; repeatable.
    #[arg(long = "regressor")]
    pub regressors: Vec<String>,
    #[arg(long)]
    pub out_arrivals: Option<PathBuf>,
    #[arg(long)]
    pub out_regions: Option<PathBuf>,
    #[arg(long)]
    pub out_info: Option<PathBuf>,
    /// Regions as a GeoJSON FeatureCollection.
    #[arg(long)]
    pub out_geojson: Option<PathBuf>,
    /// Feature code legend as CSV (feature,code,label).
    #[arg(long)]
    pub out_legend: Option<PathBuf>,
}

pub fn parse_time_spec(spec: &str) -> Result<TimeDiscretization, CliError> {
    let usage = || CliError::Usage(format!("invalid time spec '{spec}'"));
    if let Some(path) = spec.strip_prefix("custom:") {
        let text = io::read_text(Path::new(path))?;
        return Ok(TimeDiscretization::Custom(parse_custom_intervals(&text, path)?));
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let [unit, middle, period] = parts[..] else {
        return Err(usage());
    };
    let unit = TimeUnit::from_code(unit).map_err(|_| usage())?;
    let period: u64 = period.parse().map_err(|_| usage())?;
    let scheme = if middle.contains(',') {
        let durations = middle
            .split(',')
            .map(|d| d.trim().parse::<u64>().map_err(|_| usage()))
            .collect::<Result<Vec<_>, _>>()?;
        NonUniformPeriodic::new(unit, durations, period).map(TimeDiscretization::NonUniform)
    } else {
        let width: u64 = middle.parse().map_err(|_| usage())?;
        UniformPeriodic::new(unit, width, period).map(TimeDiscretization::Uniform)
    };
    scheme.map_err(|e| CliError::Usage(format!("invalid time spec '{spec}': {e}")))
}

fn build_regions(space: &[String], border: &Border) -> Result<RegionSet, CliError> {
    let usage = || CliError::Usage(format!("invalid --space '{}'", space.join(" ")));
    let int = |s: &str| s.parse::<usize>().map_err(|_| usage());
    match space.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["rect", nx, ny] => Ok(discretize_rect(border, int(nx)?, int(ny)?)?),
        ["hex", r] => {
            let r = int(r)?;
            if !(1..=16).contains(&r) {
                return Err(CliError::Usage("hex resolution must be in 1..=16".into()));
            }
            Ok(discretize_hex(border, r as u32)?)
        }
        ["custom", path] => {
            let features = read_features(Path::new(path))?;
            let areal: Vec<_> = features.iter().filter(|f| f.area().is_some()).collect();
            let cells = areal.iter().map(|f| f.area().unwrap().clone()).collect();
            let mut rs = discretize_custom(border, cells)?;
            for id in 0..rs.len() {
                let source = rs.region(id).attributes["grid_index"] as usize;
                for key in areal[source].properties.keys() {
                    if let Some(v) = areal[source].number(key) {
                        rs.set_attribute(id, key, v);
                    }
                }
            }
            Ok(rs)
        }
        ["voronoi", path] => {
            let seeds = collect_points(&read_features(Path::new(path))?);
            Ok(discretize_voronoi(border, &seeds)?)
        }
        _ => Err(usage()),
    }
}

fn build_border(spec: &str, locations: &[intensity_core::geometry::GeoPoint]) -> Result<Border, CliError> {
    match spec {
        "rectangle" => Ok(Border::rectangle(locations)?),
        "convex" => Ok(Border::convex(locations)?),
        path => {
            let features = read_features(Path::new(path))?;
            let parts: Vec<_> = features
                .iter()
                .filter_map(|f| match &f.geometry {
                    Geometry::Area(mp) => Some(mp.parts().to_vec()),
                    Geometry::Points(_) => None,
                })
                .flatten()
                .collect();
            Ok(Border::from_map(intensity_core::geometry::MultiPolygon::new(parts))?)
        }
    }
}

/// Run the pipeline; returns a one-line summary.
pub fn run(args: &DiscretizeArgs) -> Result<String, CliError> {
    let discs = args.time.iter().map(|s| parse_time_spec(s)).collect::<Result<Vec<_>, _>>()?;
    let mut columns = EventColumns::new(&args.datetime_col, &args.lat_col, &args.lon_col, &[]);
    columns.features = args.features.clone();
    columns.datetime_format = args.datetime_format.clone();
    let table = load_events(&args.events, &columns)?;

    let border = build_border(&args.border, &table.locations())?;
    let mut rs = build_regions(&args.space, &border)?;

    if let Some(src) = &args.regressor_source {
        let features = read_features(src)?;
        let areal: Vec<_> = features.iter().filter(|f| f.area().is_some()).collect();
        let source = discretize_custom(&border, areal.iter().map(|f| f.area().unwrap().clone()).collect())?;
        for name in &args.regressors {
            let totals = (0..source.len())
                .map(|id| {
                    let f = areal[source.region(id).attributes["grid_index"] as usize];
                    f.number(name).ok_or_else(|| {
                        CliError::Usage(format!("{}: a feature lacks numeric property '{name}'", src.display()))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            disaggregate_feature(&mut rs, &source, &totals, name)?;
        }
    }

    if let Some(path) = &args.out_regions {
        io::write_text(path, &io::write_neighbors(&zone_rows(&rs, &args.regressors)?))?;
    }
    if let Some(path) = &args.out_geojson {
        io::write_text(path, &rs.to_geojson())?;
    }
    if let Some(path) = &args.out_legend {
        let mut text = String::from("feature,code,label\n");
        for col in table.feature_columns() {
            for (code, label) in col.labels.iter().enumerate() {
                text.push_str(&format!("{},{code},{label}\n", col.name));
            }
        }
        io::write_text(path, &text)?;
    }

    let agg = aggregate(&table, &discs, &rs)?;
    if args.out_arrivals.is_some() || args.out_info.is_some() {
        let (info, entries) = agg.calibration_tables(args.regressors.len())?;
        if let Some(path) = &args.out_arrivals {
            io::write_text(path, &io::write_arrivals(&entries))?;
        }
        if let Some(path) = &args.out_info {
            io::write_text(path, &io::write_info(&info))?;
        }
    }
    Ok(format!(
        "events: {}, aggregated: {}, dropped: {}, regions: {}",
        table.len(),
        agg.total(),
        agg.dropped(),
        rs.len()
    ))
}
