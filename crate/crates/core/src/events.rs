//! Event ingestion, index attachment and aggregation into per-occurrence
//! counts.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Duration, NaiveDateTime};

use crate::error::{Error, Result};
use crate::geometry::{haversine_km, GeoPoint};
use crate::io::{self, ArrivalEntry, Info, ZoneRow};
use crate::spatial::RegionSet;
use crate::temporal::{parse_timestamp, Anchor, TimeDiscretization};

#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub ts: NaiveDateTime,
    pub location: GeoPoint,
    /// Dense feature codes, one per feature column.
    pub features: Vec<u32>,
}

/// Column names to read from an events CSV.
#[derive(Clone, Debug)]
pub struct EventColumns {
    pub datetime: String,
    pub lat: String,
    pub lon: String,
    pub features: Vec<String>,
    /// chrono format string; common formats are detected when absent.
    pub datetime_format: Option<String>,
}

impl EventColumns {
    pub fn new(datetime: &str, lat: &str, lon: &str, features: &[&str]) -> Self {
        EventColumns {
            datetime: datetime.into(),
            lat: lat.into(),
            lon: lon.into(),
            features: features.iter().map(|s| s.to_string()).collect(),
            datetime_format: None,
        }
    }
}

/// Legend of one categorical column: `labels[code]` is the original value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureColumn {
    pub name: String,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct EventTable {
    records: Vec<EventRecord>,
    features: Vec<FeatureColumn>,
    tdiscr: Vec<Vec<usize>>,
    gdiscr: Vec<Option<usize>>,
}

pub fn load_events(path: &Path, columns: &EventColumns) -> Result<EventTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_events(&text, &path.display().to_string(), columns)
}

/// Parse events from CSV text; the delimiter (`;` or `,`) is taken from the
/// header line.
pub fn parse_events(text: &str, source_name: &str, columns: &EventColumns) -> Result<EventTable> {
    let header_line = text.lines().next().unwrap_or("");
    let delimiter = if header_line.contains(';') { b';' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(source_name, 1, e.to_string()))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("{source_name}: missing column '{name}'")))
    };
    let dt_col = find(&columns.datetime)?;
    let lat_col = find(&columns.lat)?;
    let lon_col = find(&columns.lon)?;
    let feat_cols = columns.features.iter().map(|f| find(f)).collect::<Result<Vec<_>>>()?;

    let mut legends: Vec<(FeatureColumn, BTreeMap<String, u32>)> = columns
        .features
        .iter()
        .map(|name| (FeatureColumn { name: name.clone(), labels: Vec::new() }, BTreeMap::new()))
        .collect();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(source_name, line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |k: usize| row.get(k).unwrap_or("");
        let ts = parse_timestamp(field(dt_col), columns.datetime_format.as_deref())
            .map_err(|_| Error::parse(source_name, line, format!("unparsable timestamp '{}'", field(dt_col))))?;
        let coord = |k: usize, what: &str| {
            field(k)
                .parse::<f64>()
                .map_err(|_| Error::parse(source_name, line, format!("unparsable {what} '{}'", field(k))))
        };
        let lat = coord(lat_col, "latitude")?;
        let lon = coord(lon_col, "longitude")?;
        let location = GeoPoint::new(lon, lat).map_err(|e| Error::parse(source_name, line, e.to_string()))?;
        let features = feat_cols
            .iter()
            .zip(legends.iter_mut())
            .map(|(&k, (legend, codes))| {
                let label = field(k).to_string();
                let next = codes.len() as u32;
                *codes.entry(label.clone()).or_insert_with(|| {
                    legend.labels.push(label);
                    next
                })
            })
            .collect();
        records.push(EventRecord { ts, location, features });
    }
    let n = records.len();
    Ok(EventTable {
        records,
        features: legends.into_iter().map(|(l, _)| l).collect(),
        tdiscr: vec![Vec::new(); n],
        gdiscr: vec![None; n],
    })
}

impl EventTable {
    pub fn from_records(records: Vec<EventRecord>, features: Vec<FeatureColumn>) -> Result<Self> {
        for r in &records {
            if r.features.len() != features.len() {
                return Err(Error::InvalidInput("record feature count differs from the legend".into()));
            }
            for (code, col) in r.features.iter().zip(&features) {
                if *code as usize >= col.labels.len() {
                    return Err(Error::InvalidInput(format!("code {code} exceeds cardinality of '{}'", col.name)));
                }
            }
        }
        let n = records.len();
        Ok(EventTable {
            records,
            features,
            tdiscr: vec![Vec::new(); n],
            gdiscr: vec![None; n],
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn feature_columns(&self) -> &[FeatureColumn] {
        &self.features
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.features.iter().map(|f| f.labels.len()).collect()
    }

    pub fn locations(&self) -> Vec<GeoPoint> {
        self.records.iter().map(|r| r.location).collect()
    }

    /// Anchor on the year of the earliest event.
    pub fn anchor(&self) -> Option<Anchor> {
        Anchor::from_earliest(self.records.iter().map(|r| &r.ts))
    }

    /// Time index of each record under each discretization.
    pub fn tdiscr(&self) -> &[Vec<usize>] {
        &self.tdiscr
    }

    /// Region of each record, `None` when outside every region.
    pub fn gdiscr(&self) -> &[Option<usize>] {
        &self.gdiscr
    }

    /// Store the time and region index columns for every record.
    pub fn attach(&mut self, discs: &[TimeDiscretization], rs: &RegionSet) {
        let Some(anchor) = self.anchor() else { return };
        for (k, r) in self.records.iter().enumerate() {
            self.tdiscr[k] = discs.iter().map(|d| d.index(&r.ts, &anchor)).collect();
            self.gdiscr[k] = rs.assign_region(&r.location);
        }
    }
}

/// (time indices, region, features) → occurrence → count.
type CellCounts = BTreeMap<(Vec<usize>, usize, Vec<u32>), BTreeMap<usize, u64>>;

/// Per-occurrence event counts for every (time indices, region, features)
/// cell, plus the calendar occurrences of each time-index combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregatedCounts {
    time_dims: Vec<usize>,
    regions: usize,
    feature_dims: Vec<usize>,
    occurrences: BTreeMap<Vec<usize>, usize>,
    counts: CellCounts,
    aggregated: u64,
    dropped: usize,
}

/// A maximal stretch of time during which every window id is constant.
struct Run {
    start: NaiveDateTime,
    occurrence: usize,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Walk the horizon and number the occurrences of each time combination.
fn occurrence_ledger(
    discs: &[TimeDiscretization],
    anchor: &Anchor,
    first: NaiveDateTime,
    last: NaiveDateTime,
) -> (Vec<Run>, BTreeMap<Vec<usize>, usize>) {
    let start = first.date().and_hms_opt(0, 0, 0).unwrap();
    let end = (last.date() + Duration::days(1)).and_hms_opt(0, 0, 0).unwrap();
    let step = Duration::seconds(discs.iter().fold(86_400, |g, d| gcd(g, d.step_seconds())));
    let mut runs = Vec::new();
    let mut ledger: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut prev_ids: Option<Vec<i64>> = None;
    let mut t = start;
    while t < end {
        let ids: Vec<i64> = discs.iter().map(|d| d.window_id(&t, anchor)).collect();
        if prev_ids.as_ref() != Some(&ids) {
            let combo: Vec<usize> = discs.iter().map(|d| d.index(&t, anchor)).collect();
            let slot = ledger.entry(combo).or_insert(0);
            runs.push(Run { start: t, occurrence: *slot });
            *slot += 1;
            prev_ids = Some(ids);
        }
        t += step;
    }
    (runs, ledger)
}

/// Count events per cell and occurrence. Events outside every region are
/// dropped and reported by [`AggregatedCounts::dropped`].
pub fn aggregate(table: &EventTable, discs: &[TimeDiscretization], rs: &RegionSet) -> Result<AggregatedCounts> {
    let anchor = table
        .anchor()
        .ok_or_else(|| Error::InvalidInput("no events to aggregate".into()))?;
    let first = table.records.iter().map(|r| r.ts).min().unwrap();
    let last = table.records.iter().map(|r| r.ts).max().unwrap();
    let (runs, occurrences) = occurrence_ledger(discs, &anchor, first, last);

    let mut counts: CellCounts = BTreeMap::new();
    let mut dropped = 0;
    let mut aggregated = 0;
    for r in &table.records {
        let Some(region) = rs.assign_region(&r.location) else {
            dropped += 1;
            continue;
        };
        let time: Vec<usize> = discs.iter().map(|d| d.index(&r.ts, &anchor)).collect();
        let run = runs.partition_point(|run| run.start <= r.ts) - 1;
        *counts
            .entry((time, region, r.features.clone()))
            .or_default()
            .entry(runs[run].occurrence)
            .or_insert(0) += 1;
        aggregated += 1;
    }
    Ok(AggregatedCounts {
        time_dims: discs.iter().map(TimeDiscretization::index_range).collect(),
        regions: rs.len(),
        feature_dims: table.cardinalities(),
        occurrences,
        counts,
        aggregated,
        dropped,
    })
}

impl AggregatedCounts {
    /// (n_t0, …, R, n_f0, …).
    pub fn dims(&self) -> Vec<usize> {
        let mut d = self.time_dims.clone();
        d.push(self.regions);
        d.extend(&self.feature_dims);
        d
    }

    pub fn time_dims(&self) -> &[usize] {
        &self.time_dims
    }

    pub fn regions(&self) -> usize {
        self.regions
    }

    pub fn feature_dims(&self) -> &[usize] {
        &self.feature_dims
    }

    /// Calendar occurrences of a time-index combination in the horizon.
    pub fn occurrences(&self, time: &[usize]) -> usize {
        self.occurrences.get(time).copied().unwrap_or(0)
    }

    /// Counts per occurrence for one cell, zeros included.
    pub fn cell(&self, time: &[usize], region: usize, features: &[u32]) -> Vec<u64> {
        let mut out = vec![0; self.occurrences(time)];
        if let Some(entries) = self.counts.get(&(time.to_vec(), region, features.to_vec())) {
            for (&occ, &n) in entries {
                out[occ] = n;
            }
        }
        out
    }

    /// Non-zero entries as (time, region, features, occurrence, count), sorted.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], usize, &[u32], usize, u64)> {
        self.counts.iter().flat_map(|((time, region, feats), occ)| {
            occ.iter()
                .map(move |(&j, &n)| (time.as_slice(), *region, feats.as_slice(), j, n))
        })
    }

    /// Events counted into cells.
    pub fn total(&self) -> u64 {
        self.aggregated
    }

    /// Events outside every region.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Calibration tables for counts aggregated by (period of day, day of
    /// week) with at most one feature (the arrival type).
    pub fn calibration_tables(&self, regressors: usize) -> Result<(Info, Vec<ArrivalEntry>)> {
        if self.time_dims.len() != 2 || self.feature_dims.len() > 1 {
            return Err(Error::InvalidInput(format!(
                "arrivals need exactly two time discretizations (period of day, day) and at most one feature; got {} and {}",
                self.time_dims.len(),
                self.feature_dims.len()
            )));
        }
        let (periods, days) = (self.time_dims[0], self.time_dims[1]);
        let types = self.feature_dims.first().copied().unwrap_or(1);
        let mut observations = Vec::with_capacity(days);
        for g in 0..days {
            let n = self.occurrences(&[0, g]);
            if let Some(t) = (1..periods).find(|&t| self.occurrences(&[t, g]) != n) {
                return Err(Error::InvalidInput(format!(
                    "day {g} is observed {n} times in period 0 but {} times in period {t}",
                    self.occurrences(&[t, g])
                )));
            }
            observations.push(n);
        }
        let mut entries: Vec<ArrivalEntry> = self
            .entries()
            .map(|(time, r, feats, j, count)| ArrivalEntry {
                t: time[0],
                g: time[1],
                r,
                c: feats.first().map_or(0, |&c| c as usize),
                j,
                count,
                holiday: false,
            })
            .collect();
        entries.sort_by_key(|e| (e.t, e.g, e.r, e.c, e.j));
        let info = Info {
            periods,
            weekdays: days,
            zones: self.regions,
            types,
            regressors,
            holidays: 0,
            observations,
        };
        Ok((info, entries))
    }
}

/// Write the arrivals file; only non-zero sample entries are listed.
pub fn write_arrivals(agg: &AggregatedCounts, path: &Path) -> Result<()> {
    let (_, entries) = agg.calibration_tables(0)?;
    io::write_text(path, &io::write_arrivals(&entries))
}

pub fn write_info(agg: &AggregatedCounts, regressors: usize, path: &Path) -> Result<()> {
    let (info, _) = agg.calibration_tables(regressors)?;
    io::write_text(path, &io::write_info(&info))
}

/// Zone table rows: centroid, `type` attribute (0 when absent), the named
/// regressor attributes, and neighbors with centroid distances in km.
pub fn zone_rows(rs: &RegionSet, regressors: &[String]) -> Result<Vec<ZoneRow>> {
    rs.regions()
        .iter()
        .map(|r| {
            let values = regressors
                .iter()
                .map(|name| {
                    r.attributes
                        .get(name)
                        .copied()
                        .ok_or_else(|| Error::InvalidInput(format!("region {} has no attribute '{name}'", r.id)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ZoneRow {
                id: r.id,
                lat: r.centroid.lat,
                lon: r.centroid.lon,
                kind: r.attributes.get("type").map_or(0, |&v| v as i64),
                regressors: values,
                neighbors: r
                    .neighbors
                    .iter()
                    .map(|&j| (j, haversine_km(&r.centroid, &rs.region(j).centroid)))
                    .collect(),
            })
        })
        .collect()
}

pub fn write_regions(rs: &RegionSet, regressors: &[String], path: &Path) -> Result<()> {
    io::write_text(path, &io::write_neighbors(&zone_rows(rs, regressors)?))
}
