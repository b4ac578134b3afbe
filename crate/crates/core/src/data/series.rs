use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};

use crate::error::{Error, Result};
use crate::math::Matrix;

pub const MINUTES_PER_DAY: u32 = 1440;
pub const DAYS_PER_WEEK: usize = 7;

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";

/// Time attributes of row 0: slot within the day and weekday (0 = Monday).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Anchor {
    pub tid: usize,
    pub diw: usize,
}

/// `(time-in-day, day-in-week)` of `row`, counting from `anchor`.
pub fn derive_time_features(row: usize, anchor: Anchor, slots_per_day: usize) -> (usize, usize) {
    debug_assert!(slots_per_day >= 1);
    let absolute = anchor.tid + row;
    let tid = absolute % slots_per_day;
    let days = absolute / slots_per_day;
    (tid, (anchor.diw + days) % DAYS_PER_WEEK)
}

/// A `T × N` multivariate series on a fixed clock, plus a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    name: String,
    var_names: Vec<String>,
    values: Matrix,
    valid: Vec<bool>,
    interval_minutes: u32,
    anchor: Anchor,
}

impl RawSeries {
    pub fn new(
        name: impl Into<String>,
        var_names: Vec<String>,
        values: Matrix,
        valid: Vec<bool>,
        interval_minutes: u32,
        anchor: Anchor,
    ) -> Result<Self> {
        if interval_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(interval_minutes) {
            return Err(Error::invalid(format!(
                "interval of {interval_minutes} minutes does not divide a day"
            )));
        }
        let slots_per_day = (MINUTES_PER_DAY / interval_minutes) as usize;
        if anchor.tid >= slots_per_day || anchor.diw >= DAYS_PER_WEEK {
            return Err(Error::invalid(format!(
                "anchor (tid {}, diw {}) out of range for {slots_per_day} slots per day",
                anchor.tid, anchor.diw
            )));
        }
        if var_names.len() != values.cols() || valid.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} names and {} mask cells for a {:?} value matrix",
                var_names.len(),
                valid.len(),
                values.shape()
            )));
        }
        if !values.is_finite() {
            return Err(Error::NonFinite(format!("series {}", name.into())));
        }
        Ok(Self {
            name: name.into(),
            var_names,
            values,
            valid,
            interval_minutes,
            anchor,
        })
    }

    /// Fully valid series with generated variable names.
    pub fn from_values(
        name: impl Into<String>,
        values: Matrix,
        interval_minutes: u32,
        anchor: Anchor,
    ) -> Result<Self> {
        let var_names = (0..values.cols()).map(|i| format!("var_{i}")).collect();
        let valid = vec![true; values.len()];
        Self::new(name, var_names, values, valid, interval_minutes, anchor)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn num_slots(&self) -> usize {
        self.values.rows()
    }

    pub fn num_vars(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn interval_minutes(&self) -> u32 {
        self.interval_minutes
    }

    pub fn anchor(&self) -> Anchor {
        self.anchor
    }

    pub fn slots_per_day(&self) -> usize {
        (MINUTES_PER_DAY / self.interval_minutes) as usize
    }

    #[inline]
    pub fn value(&self, slot: usize, var: usize) -> f64 {
        self.values.get(slot, var)
    }

    #[inline]
    pub fn is_valid(&self, slot: usize, var: usize) -> bool {
        self.valid[slot * self.num_vars() + var]
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn time_features(&self, slot: usize) -> (usize, usize) {
        derive_time_features(slot, self.anchor, self.slots_per_day())
    }

    /// Writes the series in timestamped CSV form. Timestamps start on the
    /// first Monday of 2024 shifted by the anchor, so reloading reproduces
    /// the anchor exactly. Missing cells are written empty.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let monday = NaiveDate::from_ymd_opt(2024, 1, 1)
            .expect("valid date")
            .and_hms_opt(0, 0, 0)
            .expect("valid time");
        let interval = i64::from(self.interval_minutes);
        let start = monday
            + Duration::days(self.anchor.diw as i64)
            + Duration::minutes(self.anchor.tid as i64 * interval);

        let mut out = String::with_capacity(self.values.len() * 10);
        out.push_str("timestamp");
        for name in &self.var_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for t in 0..self.num_slots() {
            let ts = start + Duration::minutes(t as i64 * interval);
            out.push_str(&ts.format(TIMESTAMP_FORMAT).to_string());
            for i in 0..self.num_vars() {
                out.push(',');
                if self.is_valid(t, i) {
                    out.push_str(&format!("{}", self.value(t, i)));
                }
            }
            out.push('\n');
        }
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// Options for [`load_csv_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Cells exactly equal to this value are marked missing.
    pub missing_sentinel: Option<f64>,
}

pub fn load_csv(path: &Path) -> Result<RawSeries> {
    load_csv_with(path, LoadOptions::default())
}

/// Reads a dataset CSV.
///
/// Two layouts are accepted. Timestamped: header `timestamp,<var>...` with
/// `YYYY-MM-DDTHH:MM` stamps at a constant stride. Directive: leading
/// `# interval_minutes=K`, `# anchor_tid=a`, `# anchor_diw=b` lines and a
/// header naming only the variables. Empty cells and `NA`/`NaN` are missing.
pub fn load_csv_with(path: &Path, options: LoadOptions) -> Result<RawSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut interval: Option<u32> = None;
    let mut anchor_tid: Option<usize> = None;
    let mut anchor_diw: Option<usize> = None;
    let mut consumed = 0usize;
    let mut body_start = 0usize;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if !trimmed.starts_with('#') && !trimmed.is_empty() {
            break;
        }
        consumed += 1;
        body_start += line.len();
        let Some((key, value)) = trimmed.trim_start_matches('#').split_once('=') else {
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| parse_err(consumed, format!("directive {key} has non-integer value {value:?}")))
        };
        match key {
            "interval_minutes" => interval = Some(number()? as u32),
            "anchor_tid" => anchor_tid = Some(number()?),
            "anchor_diw" => anchor_diw = Some(number()?),
            _ => {}
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[body_start..]);
    let mut records = reader.records();
    let line_of = |rec: &csv::StringRecord| consumed + rec.position().map_or(0, |p| p.line() as usize);

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(parse_err(consumed + 1, e.to_string())),
        None => return Err(parse_err(consumed + 1, "missing header row".into())),
    };
    let timestamped = header.get(0) == Some("timestamp");
    let var_names: Vec<String> = header
        .iter()
        .skip(usize::from(timestamped))
        .map(str::to_string)
        .collect();
    if var_names.is_empty() || var_names.iter().any(String::is_empty) {
        return Err(parse_err(line_of(&header), "header must name at least one variable and no blank columns".into()));
    }
    let n = var_names.len();
    let width = n + usize::from(timestamped);

    let mut values = Vec::new();
    let mut valid = Vec::new();
    let mut stamps: Vec<NaiveDateTime> = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| parse_err(0, e.to_string()))?;
        let line = line_of(&rec);
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != width {
            return Err(parse_err(line, format!("expected {width} fields, found {}", rec.len())));
        }
        let mut cells = rec.iter();
        if timestamped {
            let raw = cells.next().unwrap_or_default();
            let ts = NaiveDateTime::parse_from_str(raw, TIMESTAMP_FORMAT)
                .map_err(|e| parse_err(line, format!("bad timestamp {raw:?}: {e}")))?;
            stamps.push(ts);
        }
        for cell in cells {
            let missing_marker = cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan");
            if missing_marker {
                values.push(0.0);
                valid.push(false);
                continue;
            }
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("non-numeric cell {cell:?}")))?;
            if options.missing_sentinel == Some(v) {
                values.push(0.0);
                valid.push(false);
            } else {
                values.push(v);
                valid.push(true);
            }
        }
    }
    let rows = values.len() / n;
    if rows == 0 {
        return Err(parse_err(consumed + 2, "no data rows".into()));
    }

    let (interval, anchor) = if timestamped {
        let stride = match stamps.as_slice() {
            [a, b, ..] => {
                let minutes = (*b - *a).num_minutes();
                if minutes <= 0 {
                    return Err(parse_err(consumed + 2, "timestamps must increase".into()));
                }
                for (k, pair) in stamps.windows(2).enumerate() {
                    if (pair[1] - pair[0]).num_minutes() != minutes {
                        return Err(parse_err(
                            consumed + 3 + k,
                            format!("timestamp stride changes from {minutes} minutes at {}", pair[1]),
                        ));
                    }
                }
                if let Some(declared) = interval {
                    if i64::from(declared) != minutes {
                        return Err(parse_err(1, format!("interval directive {declared} disagrees with stride {minutes}")));
                    }
                }
                minutes as u32
            }
            _ => interval.ok_or_else(|| {
                parse_err(consumed + 2, "a single timestamped row needs an interval_minutes directive".into())
            })?,
        };
        if stride == 0 || !MINUTES_PER_DAY.is_multiple_of(stride) {
            return Err(parse_err(consumed + 2, format!("stride of {stride} minutes does not divide a day")));
        }
        let first = stamps[0];
        let minute_of_day = first.hour() * 60 + first.minute();
        if !minute_of_day.is_multiple_of(stride) {
            return Err(parse_err(consumed + 2, format!("first timestamp {first} is not on a {stride}-minute slot boundary")));
        }
        let anchor = Anchor {
            tid: (minute_of_day / stride) as usize,
            diw: first.weekday().num_days_from_monday() as usize,
        };
        (stride, anchor)
    } else {
        let interval = interval.ok_or_else(|| {
            parse_err(1, "header has no timestamp column and no interval_minutes directive".into())
        })?;
        let anchor = Anchor {
            tid: anchor_tid.unwrap_or(0),
            diw: anchor_diw.unwrap_or(0),
        };
        (interval, anchor)
    };

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let values = Matrix::from_vec(rows, n, values)?;
    RawSeries::new(name, var_names, values, valid, interval, anchor).map_err(|e| match e {
        Error::InvalidArgument(msg) => parse_err(1, msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    /// Days since 1970-01-01 by the civil-from-days inverse (Hinnant), used
    /// to cross-check weekdays without going through chrono.
    fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
        let y = if m <= 2 { y - 1 } else { y };
        let era = if y >= 0 { y } else { y - 399 } / 400;
        let yoe = y - era * 400;
        let mp = (m + 9) % 12;
        let doy = (153 * mp + 2) / 5 + d - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146097 + doe - 719468
    }

    #[test]
    fn time_feature_examples() {
        let zero = Anchor { tid: 0, diw: 0 };
        assert_eq!(derive_time_features(0, zero, 288), (0, 0));
        assert_eq!(derive_time_features(288, zero, 288), (0, 1));
        assert_eq!(derive_time_features(300, Anchor { tid: 12, diw: 6 }, 288), (24, 0));
    }

    #[test]
    fn time_features_repeat_weekly() {
        let anchor = Anchor { tid: 5, diw: 3 };
        for row in [0usize, 17, 288, 1000, 5000] {
            assert_eq!(
                derive_time_features(row, anchor, 288),
                derive_time_features(row + 7 * 288, anchor, 288)
            );
        }
    }

    #[test]
    fn timestamped_file() {
        let f = write(
            "timestamp,a,b\n2024-01-01T00:00,1,2\n2024-01-01T00:05,3,4\n2024-01-01T00:10,5,6\n2024-01-01T00:15,7,8\n",
        );
        let s = load_csv(f.path()).unwrap();
        assert_eq!((s.num_slots(), s.num_vars()), (4, 2));
        assert_eq!(s.slots_per_day(), 288);
        assert_eq!(s.anchor(), Anchor { tid: 0, diw: 0 });
        assert_eq!(s.value(3, 1), 8.0);
        assert_eq!(s.var_names(), ["a", "b"]);
    }

    #[test]
    fn new_year_2024_is_a_monday() {
        // 1970-01-01 was a Thursday (index 3 with Monday = 0).
        let weekday = (days_from_civil(2024, 1, 1) + 3).rem_euclid(7);
        assert_eq!(weekday, 0);
        let f = write("timestamp,x\n2024-01-01T00:00,1\n2024-01-01T01:00,1\n");
        assert_eq!(load_csv(f.path()).unwrap().anchor(), Anchor { tid: 0, diw: weekday as usize });
    }

    #[test]
    fn weekday_matches_civil_oracle_for_other_dates() {
        for (y, m, d) in [(2012, 6, 13), (2018, 1, 1), (2023, 12, 31), (2000, 2, 29)] {
            let expected = (days_from_civil(y, m, d) + 3).rem_euclid(7) as usize;
            let f = write(&format!("timestamp,x\n{y:04}-{m:02}-{d:02}T10:30,1\n{y:04}-{m:02}-{d:02}T10:45,2\n"));
            let s = load_csv(f.path()).unwrap();
            assert_eq!(s.anchor().diw, expected, "{y}-{m}-{d}");
            assert_eq!(s.anchor().tid, 42);
        }
    }

    #[test]
    fn directive_file_single_cell() {
        let f = write("# interval_minutes=60\n# anchor_tid=3\n# anchor_diw=4\nload\n1.5\n");
        let s = load_csv(f.path()).unwrap();
        assert_eq!((s.num_slots(), s.num_vars()), (1, 1));
        assert_eq!(s.slots_per_day(), 24);
        assert_eq!(s.anchor(), Anchor { tid: 3, diw: 4 });
    }

    #[test]
    fn missing_cells_and_sentinel() {
        let f = write("# interval_minutes=5\na,b\n1,\nNA,0\n");
        let s = load_csv_with(f.path(), LoadOptions { missing_sentinel: Some(0.0) }).unwrap();
        assert_eq!(s.validity(), [true, false, false, false]);
    }

    #[test]
    fn malformed_inputs() {
        let cases = [
            ("timestamp,a\n2024-01-01T00:00,1\n2024-01-01T00:05,1,2\n", "expected 2 fields"),
            ("timestamp,a\n2024-01-01T00:00,x\n2024-01-01T00:05,1\n", "non-numeric"),
            ("timestamp,a\n2024-01-01T00:00,1\n2024-01-01T00:05,1\n2024-01-01T00:15,1\n", "stride"),
            ("a,b\n1,2\n", "interval_minutes"),
            ("timestamp,a\n2024-01-01 00:00,1\n", "bad timestamp"),
            ("timestamp\n2024-01-01T00:00\n", "header"),
            ("# interval_minutes=7\na\n1\n", "does not divide"),
        ];
        for (text, needle) in cases {
            let f = write(text);
            let err = load_csv(f.path()).unwrap_err();
            assert!(matches!(err, Error::Parse { .. }), "{text:?} gave {err}");
            assert!(err.to_string().contains(needle), "{text:?} gave {err}");
        }
    }

    #[test]
    fn ragged_row_reports_its_line() {
        let f = write("# interval_minutes=5\na,b\n1,2\n3\n");
        match load_csv(f.path()).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn write_then_load_round_trips() {
        let values = Matrix::from_rows(&[[1.0, 2.5], [3.0, -4.0], [0.125, 9.0]]).unwrap();
        let mut valid = vec![true; 6];
        valid[3] = false;
        let s = RawSeries::new("x", vec!["a".into(), "b".into()], values, valid, 30, Anchor { tid: 47, diw: 6 }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        s.write_csv(&path).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(back.anchor(), s.anchor());
        assert_eq!(back.interval_minutes(), 30);
        assert_eq!(back.validity(), s.validity());
        for t in 0..3 {
            for i in 0..2 {
                if s.is_valid(t, i) {
                    assert_eq!(back.value(t, i), s.value(t, i));
                }
            }
        }
    }
}
