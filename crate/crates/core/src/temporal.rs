//! Time discretizations: map a timestamp to an integer time index.
//!
//! All timestamps are naive local times. Periodic schemes measure elapsed
//! units from an anchor: midnight of the Monday that starts the week holding
//! January 1st of the anchor year (sub-day units, days and weeks), or
//! January of the anchor year (months and years).

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TimeUnit {
    Year,
    Month,
    Week,
    Day,
    Hour,
    Minute,
    Second,
}

impl TimeUnit {
    pub fn from_code(code: &str) -> Result<Self> {
        Ok(match code {
            "Y" => TimeUnit::Year,
            "M" => TimeUnit::Month,
            "W" => TimeUnit::Week,
            "D" => TimeUnit::Day,
            "H" => TimeUnit::Hour,
            "m" => TimeUnit::Minute,
            "S" => TimeUnit::Second,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown time unit '{other}' (expected one of Y M W D H m S)"
                )))
            }
        })
    }

    pub fn code(&self) -> &'static str {
        match self {
            TimeUnit::Year => "Y",
            TimeUnit::Month => "M",
            TimeUnit::Week => "W",
            TimeUnit::Day => "D",
            TimeUnit::Hour => "H",
            TimeUnit::Minute => "m",
            TimeUnit::Second => "S",
        }
    }

    /// Length in seconds for fixed-length units; `None` for months and years.
    fn seconds(&self) -> Option<i64> {
        match self {
            TimeUnit::Second => Some(1),
            TimeUnit::Minute => Some(60),
            TimeUnit::Hour => Some(3600),
            TimeUnit::Day => Some(86_400),
            TimeUnit::Week => Some(7 * 86_400),
            TimeUnit::Month | TimeUnit::Year => None,
        }
    }
}

/// Phase origin shared by all periodic schemes of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub anchor_year: i32,
}

impl Anchor {
    pub fn new(anchor_year: i32) -> Self {
        Anchor { anchor_year }
    }

    /// Anchor on the year of the earliest timestamp.
    pub fn from_earliest<'a>(timestamps: impl IntoIterator<Item = &'a NaiveDateTime>) -> Option<Self> {
        timestamps.into_iter().min().map(|t| Anchor::new(t.year()))
    }

    fn monday(&self) -> NaiveDateTime {
        let jan1 = NaiveDate::from_ymd_opt(self.anchor_year, 1, 1).expect("valid year");
        let back = jan1.weekday().num_days_from_monday() as i64;
        (jan1 - Duration::days(back)).and_hms_opt(0, 0, 0).unwrap()
    }

    /// Whole units elapsed from the anchor to `ts` (negative before it).
    pub fn elapsed(&self, unit: TimeUnit, ts: &NaiveDateTime) -> i64 {
        match unit {
            TimeUnit::Year => (ts.year() - self.anchor_year) as i64,
            TimeUnit::Month => {
                (ts.year() - self.anchor_year) as i64 * 12 + ts.month0() as i64
            }
            _ => {
                let secs = (*ts - self.monday()).num_seconds();
                secs.div_euclid(unit.seconds().unwrap())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformPeriodic {
    pub unit: TimeUnit,
    pub width: u64,
    pub period: u64,
}

impl UniformPeriodic {
    pub fn new(unit: TimeUnit, width: u64, period: u64) -> Result<Self> {
        if width == 0 || period == 0 || !period.is_multiple_of(width) {
            return Err(Error::InvalidInput(format!(
                "uniform discretization needs width >= 1 dividing the period (width={width}, period={period})"
            )));
        }
        Ok(UniformPeriodic { unit, width, period })
    }

    pub fn index_range(&self) -> usize {
        (self.period / self.width) as usize
    }

    pub fn index(&self, ts: &NaiveDateTime, anchor: &Anchor) -> usize {
        let e = anchor.elapsed(self.unit, ts);
        (e.rem_euclid(self.period as i64) / self.width as i64) as usize
    }

    fn window_id(&self, ts: &NaiveDateTime, anchor: &Anchor) -> i64 {
        anchor.elapsed(self.unit, ts).div_euclid(self.width as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonUniformPeriodic {
    pub unit: TimeUnit,
    pub durations: Vec<u64>,
    pub period: u64,
    cumulative: Vec<u64>,
}

impl NonUniformPeriodic {
    pub fn new(unit: TimeUnit, durations: Vec<u64>, period: u64) -> Result<Self> {
        if durations.is_empty() || durations.contains(&0) {
            return Err(Error::InvalidInput(
                "non-uniform discretization needs a non-empty list of positive durations".into(),
            ));
        }
        let cumulative: Vec<u64> = durations
            .iter()
            .scan(0u64, |acc, d| {
                *acc += d;
                Some(*acc)
            })
            .collect();
        let total = *cumulative.last().unwrap();
        if period == 0 || !period.is_multiple_of(total) {
            return Err(Error::InvalidInput(format!(
                "period {period} is not a multiple of the summed durations {total}"
            )));
        }
        Ok(NonUniformPeriodic {
            unit,
            durations,
            period,
            cumulative,
        })
    }

    fn cycle_len(&self) -> u64 {
        *self.cumulative.last().unwrap()
    }

    pub fn index_range(&self) -> usize {
        (self.period / self.cycle_len()) as usize * self.durations.len()
    }

    fn bucket(&self, c: u64) -> usize {
        let within = c % self.cycle_len();
        self.cumulative.iter().position(|&b| within < b).unwrap()
    }

    pub fn index(&self, ts: &NaiveDateTime, anchor: &Anchor) -> usize {
        let c = anchor.elapsed(self.unit, ts).rem_euclid(self.period as i64) as u64;
        (c / self.cycle_len()) as usize * self.durations.len() + self.bucket(c)
    }

    fn window_id(&self, ts: &NaiveDateTime, anchor: &Anchor) -> i64 {
        let e = anchor.elapsed(self.unit, ts);
        let cycles = e.div_euclid(self.cycle_len() as i64);
        let b = self.bucket(e.rem_euclid(self.cycle_len() as i64) as u64);
        cycles * self.durations.len() as i64 + b as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Repetition {
    Yearly,
    Once,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalRow {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub t: usize,
    pub repetition: Repetition,
}

fn month_day(d: &NaiveDate) -> (u32, u32) {
    (d.month(), d.day())
}

impl IntervalRow {
    fn matches(&self, day: &NaiveDate) -> bool {
        match self.repetition {
            Repetition::Once => self.start <= *day && *day <= self.end,
            Repetition::Yearly => {
                let md = month_day(day);
                month_day(&self.start) <= md && md <= month_day(&self.end)
            }
        }
    }

    /// Month-day spans covered in `year` (yearly rows cover the same span every year).
    fn span_in_year(&self, year: i32) -> Option<((u32, u32), (u32, u32))> {
        match self.repetition {
            Repetition::Yearly => Some((month_day(&self.start), month_day(&self.end))),
            Repetition::Once => {
                if year < self.start.year() || year > self.end.year() {
                    return None;
                }
                let lo = if year == self.start.year() { month_day(&self.start) } else { (1, 1) };
                let hi = if year == self.end.year() { month_day(&self.end) } else { (12, 31) };
                Some((lo, hi))
            }
        }
    }
}

/// User-defined intervals; timestamps outside every row get index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomIntervals {
    rows: Vec<IntervalRow>,
}

impl CustomIntervals {
    pub fn new(rows: Vec<IntervalRow>) -> Result<Self> {
        for (k, r) in rows.iter().enumerate() {
            if r.start > r.end {
                return Err(Error::InvalidInput(format!("interval row {k}: start after end")));
            }
            if r.t == 0 {
                return Err(Error::InvalidInput(format!("interval row {k}: index t must be >= 1")));
            }
            if r.repetition == Repetition::Yearly && r.start.year() != r.end.year() {
                return Err(Error::InvalidInput(format!(
                    "interval row {k}: a yearly interval must begin and end in the same year"
                )));
            }
        }
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                let (ra, rb) = (&rows[a], &rows[b]);
                if ra.t != rb.t && Self::overlap(ra, rb) {
                    return Err(Error::InvalidInput(format!(
                        "interval rows {a} and {b} overlap with different indices"
                    )));
                }
            }
        }
        Ok(CustomIntervals { rows })
    }

    fn overlap(a: &IntervalRow, b: &IntervalRow) -> bool {
        use Repetition::*;
        match (a.repetition, b.repetition) {
            (Once, Once) => a.start <= b.end && b.start <= a.end,
            _ => {
                let once = [a, b].into_iter().find(|r| r.repetition == Once);
                let years: Vec<i32> = match once {
                    Some(r) => (r.start.year()..=r.end.year()).collect(),
                    None => vec![2000],
                };
                years.into_iter().any(|y| match (a.span_in_year(y), b.span_in_year(y)) {
                    (Some((a0, a1)), Some((b0, b1))) => a0 <= b1 && b0 <= a1,
                    _ => false,
                })
            }
        }
    }

    pub fn rows(&self) -> &[IntervalRow] {
        &self.rows
    }

    pub fn index_range(&self) -> usize {
        self.rows.iter().map(|r| r.t).max().unwrap_or(0) + 1
    }

    pub fn index(&self, ts: &NaiveDateTime) -> usize {
        let day = ts.date();
        self.rows.iter().find(|r| r.matches(&day)).map_or(0, |r| r.t)
    }
}

/// Parse the `start,end,t,repetition` CSV (dates as `YYYY-MM-DD`).
pub fn parse_custom_intervals(text: &str, source_name: &str) -> Result<CustomIntervals> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(source_name, 1, e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(source_name, 1, format!("missing column '{name}'")))
    };
    let (cs, ce, ct, cr) = (col("start")?, col("end")?, col("t")?, col("repetition").ok());
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::parse(source_name, line, e.to_string()))?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let date = |c: usize| {
            NaiveDate::parse_from_str(field(c), "%Y-%m-%d")
                .map_err(|e| Error::parse(source_name, line, format!("bad date '{}': {e}", field(c))))
        };
        let t = field(ct)
            .parse::<usize>()
            .map_err(|_| Error::parse(source_name, line, format!("bad index '{}'", field(ct))))?;
        let repetition = match cr.map(field).unwrap_or("") {
            "yearly" => Repetition::Yearly,
            "" | "None" | "none" => Repetition::Once,
            other => {
                return Err(Error::parse(source_name, line, format!("bad repetition '{other}'")))
            }
        };
        rows.push(IntervalRow {
            start: date(cs)?,
            end: date(ce)?,
            t,
            repetition,
        });
    }
    CustomIntervals::new(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimeDiscretization {
    Uniform(UniformPeriodic),
    NonUniform(NonUniformPeriodic),
    Custom(CustomIntervals),
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl TimeDiscretization {
    pub fn index(&self, ts: &NaiveDateTime, anchor: &Anchor) -> usize {
        match self {
            TimeDiscretization::Uniform(d) => d.index(ts, anchor),
            TimeDiscretization::NonUniform(d) => d.index(ts, anchor),
            TimeDiscretization::Custom(d) => d.index(ts),
        }
    }

    /// Number of distinct indices this scheme can return.
    pub fn index_range(&self) -> usize {
        match self {
            TimeDiscretization::Uniform(d) => d.index_range(),
            TimeDiscretization::NonUniform(d) => d.index_range(),
            TimeDiscretization::Custom(d) => d.index_range(),
        }
    }

    /// Absolute window counter: changes exactly when a new window starts.
    pub(crate) fn window_id(&self, ts: &NaiveDateTime, anchor: &Anchor) -> i64 {
        match self {
            TimeDiscretization::Uniform(d) => d.window_id(ts, anchor),
            TimeDiscretization::NonUniform(d) => d.window_id(ts, anchor),
            TimeDiscretization::Custom(d) => d.index(ts) as i64,
        }
    }

    /// A step (seconds) that lands on every window boundary when walking
    /// forward from a midnight.
    pub(crate) fn step_seconds(&self) -> i64 {
        let day = 86_400;
        let unit_multiple = |unit: TimeUnit, k: i64| match unit.seconds() {
            Some(s) => gcd(s * k, day),
            None => day,
        };
        match self {
            TimeDiscretization::Uniform(d) => unit_multiple(d.unit, d.width as i64),
            TimeDiscretization::NonUniform(d) => d
                .durations
                .iter()
                .fold(day, |g, &k| gcd(g, unit_multiple(d.unit, k as i64))),
            TimeDiscretization::Custom(_) => day,
        }
    }
}

/// Parse a timestamp, either with an explicit chrono format string or by
/// trying ISO-8601 variants and `dd/mm/YYYY HH:MM`.
pub fn parse_timestamp(s: &str, format: Option<&str>) -> Result<NaiveDateTime> {
    let s = s.trim();
    if let Some(fmt) = format {
        return NaiveDateTime::parse_from_str(s, fmt)
            .or_else(|_| NaiveDate::parse_from_str(s, fmt).map(|d| d.and_hms_opt(0, 0, 0).unwrap()))
            .map(|t| t.with_nanosecond(0).unwrap())
            .map_err(|e| Error::InvalidInput(format!("timestamp '{s}' does not match '{fmt}': {e}")));
    }
    const DATETIME: [&str; 8] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
        "%d/%m/%Y %H:%M:%S",
        "%d/%m/%Y %H:%M",
        "%Y/%m/%d %H:%M:%S",
        "%Y/%m/%d %H:%M",
    ];
    for fmt in DATETIME {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t.with_nanosecond(0).unwrap());
        }
    }
    if let Ok(t) = chrono::DateTime::parse_from_rfc3339(s) {
        return Ok(t.naive_local().with_nanosecond(0).unwrap());
    }
    for fmt in ["%Y-%m-%d", "%d/%m/%Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
            return Ok(d.and_hms_opt(0, 0, 0).unwrap());
        }
    }
    Err(Error::InvalidInput(format!("unrecognised timestamp '{s}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> NaiveDateTime {
        parse_timestamp(s, None).unwrap()
    }

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn half_hour_slots() {
        let d = UniformPeriodic::new(TimeUnit::Minute, 30, 1440).unwrap();
        let a = Anchor::new(2016);
        assert_eq!(d.index_range(), 48);
        assert_eq!(d.index(&ts("2016-01-01 02:09"), &a), 4);
        assert_eq!(d.index(&ts("2016-01-01 00:00"), &a), 0);
        assert_eq!(d.index(&ts("2016-01-01 23:59"), &a), 47);
    }

    #[test]
    fn weekday_index_starts_monday() {
        let d = UniformPeriodic::new(TimeUnit::Day, 1, 7).unwrap();
        let a = Anchor::new(2016);
        // 2016-01-01 is a Friday
        assert_eq!(d.index(&ts("2016-01-01 10:00"), &a), 4);
        assert_eq!(d.index(&ts("2016-01-04 00:00"), &a), 0);
        assert_eq!(d.index(&ts("2017-06-11 12:00"), &a), 6); // a Sunday
    }

    #[test]
    fn uniform_rejects_bad_shapes() {
        assert!(UniformPeriodic::new(TimeUnit::Minute, 0, 10).is_err());
        assert!(UniformPeriodic::new(TimeUnit::Minute, 7, 10).is_err());
    }

    #[test]
    fn month_groups() {
        let d = NonUniformPeriodic::new(TimeUnit::Month, vec![3, 4, 2, 1, 2], 12).unwrap();
        let a = Anchor::new(2016);
        assert_eq!(d.index_range(), 5);
        let months = [0, 0, 0, 1, 1, 1, 1, 2, 2, 3, 4, 4];
        for (m, want) in months.iter().enumerate() {
            let t = NaiveDate::from_ymd_opt(2017, m as u32 + 1, 15).unwrap().and_hms_opt(0, 0, 0).unwrap();
            assert_eq!(d.index(&t, &a), *want, "month {}", m + 1);
        }
    }

    #[test]
    fn two_year_month_cycle() {
        let d = NonUniformPeriodic::new(TimeUnit::Month, vec![3, 4, 2, 1, 2], 24).unwrap();
        let a = Anchor::new(2016);
        assert_eq!(d.index_range(), 10);
        assert_eq!(d.index(&ts("2017-01-10 00:00"), &a), 5);
        assert_eq!(d.index(&ts("2016-01-10 00:00"), &a), 0);
        assert_eq!(d.index(&ts("2018-05-10 00:00"), &a), 1);
        assert!(NonUniformPeriodic::new(TimeUnit::Month, vec![3, 4, 2, 1, 2], 13).is_err());
        assert!(NonUniformPeriodic::new(TimeUnit::Month, vec![], 12).is_err());
    }

    fn listing_rows() -> CustomIntervals {
        CustomIntervals::new(vec![
            IntervalRow { start: date("2016-01-01"), end: date("2016-01-01"), t: 1, repetition: Repetition::Yearly },
            IntervalRow { start: date("2016-02-06"), end: date("2016-02-11"), t: 2, repetition: Repetition::Once },
            IntervalRow { start: date("2017-02-24"), end: date("2017-03-06"), t: 2, repetition: Repetition::Once },
        ])
        .unwrap()
    }

    #[test]
    fn custom_intervals() {
        let d = listing_rows();
        assert_eq!(d.index(&ts("2017-01-01 08:00")), 1);
        assert_eq!(d.index(&ts("2016-02-08 13:00")), 2);
        assert_eq!(d.index(&ts("2016-02-11 23:59")), 2);
        assert_eq!(d.index(&ts("2017-03-06 00:00")), 2);
        assert_eq!(d.index(&ts("2016-07-15 00:00")), 0);
        assert_eq!(d.index_range(), 3);
    }

    #[test]
    fn custom_interval_validation() {
        let yearly_across_years = IntervalRow {
            start: date("2016-12-31"),
            end: date("2017-01-01"),
            t: 1,
            repetition: Repetition::Yearly,
        };
        assert!(CustomIntervals::new(vec![yearly_across_years]).is_err());

        let clash = vec![
            IntervalRow { start: date("2016-01-01"), end: date("2016-01-01"), t: 1, repetition: Repetition::Yearly },
            IntervalRow { start: date("2018-12-30"), end: date("2019-01-02"), t: 3, repetition: Repetition::Once },
        ];
        assert!(CustomIntervals::new(clash).is_err());

        let zero_t = IntervalRow { start: date("2016-01-01"), end: date("2016-01-02"), t: 0, repetition: Repetition::Once };
        assert!(CustomIntervals::new(vec![zero_t]).is_err());
    }

    #[test]
    fn custom_csv() {
        let text = "start,end,t,repetition\n2016-01-01,2016-01-01,1,yearly\n2016-02-06,2016-02-11,2,\n2017-02-24,2017-03-06,2,None\n";
        assert_eq!(parse_custom_intervals(text, "x.csv").unwrap(), listing_rows());
        let err = parse_custom_intervals("start,end,t\n2016-13-01,2016-01-01,1\n", "x.csv").unwrap_err();
        assert!(err.to_string().starts_with("x.csv:2:"), "{err}");
        assert!(parse_custom_intervals("start,t\n", "x.csv").is_err());
    }

    #[test]
    fn timestamp_formats() {
        let want = NaiveDate::from_ymd_opt(2016, 1, 1).unwrap().and_hms_opt(2, 9, 0).unwrap();
        assert_eq!(ts("01/01/2016 02:09"), want);
        assert_eq!(ts("2016-01-01 02:09"), want);
        assert_eq!(ts("2016-01-01T02:09:00"), want);
        assert_eq!(ts("2016-01-01T02:09:00.250"), want);
        assert_eq!(parse_timestamp("2016|01|01 02|09", Some("%Y|%m|%d %H|%M")).unwrap(), want);
        assert!(parse_timestamp("yesterday", None).is_err());
    }

    #[test]
    fn step_lands_on_boundaries() {
        let d = TimeDiscretization::Uniform(UniformPeriodic::new(TimeUnit::Minute, 7, 7 * 100).unwrap());
        assert_eq!(d.step_seconds(), 60);
        let d = TimeDiscretization::Uniform(UniformPeriodic::new(TimeUnit::Minute, 30, 1440).unwrap());
        assert_eq!(d.step_seconds(), 1800);
        let d = TimeDiscretization::NonUniform(NonUniformPeriodic::new(TimeUnit::Month, vec![3, 4], 7).unwrap());
        assert_eq!(d.step_seconds(), 86_400);
    }
}
