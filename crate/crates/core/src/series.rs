//! Time-series ingestion: file parsing, validation, annual aggregation and
//! alignment.
//!
//! All series are regularly sampled, either monthly or annual. Internally a
//! sample time is an integer index (`year * 12 + month - 1` for monthly,
//! `year` for annual) so range arithmetic is exact. Input files must be
//! UTF-8 with LF line endings (a trailing CR is tolerated); missing rows are
//! rejected unless a linear gap fill is requested, and then only for short
//! runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Sampling step of a series. The time unit of every derived quantity
/// (scales, periods, COI) follows the step: months for `Monthly`, years for
/// `Annual`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Monthly,
    Annual,
}

impl Step {
    /// Sample spacing in native time units (1 month or 1 year).
    pub fn dt(self) -> f64 {
        1.0
    }

    pub fn unit(self) -> &'static str {
        match self {
            Step::Monthly => "months",
            Step::Annual => "years",
        }
    }
}

/// A regularly sampled series with a calendar start point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub label: String,
    pub step: Step,
    /// Calendar year of the first sample.
    pub start_year: i32,
    /// 1-based month of the first sample; always 1 for annual series.
    pub start_month: u8,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(
        label: impl Into<String>,
        step: Step,
        start_year: i32,
        start_month: u8,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(1..=12).contains(&start_month) {
            return Err(Error::InvalidParam(format!("start month {start_month} out of 1..=12")));
        }
        if step == Step::Annual && start_month != 1 {
            return Err(Error::InvalidParam("annual series must start in month 1".into()));
        }
        if values.len() < 2 {
            return Err(Error::Degenerate(format!(
                "series needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!("non-finite value at sample {i}")));
        }
        Ok(TimeSeries { label: label.into(), step, start_year, start_month, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Integer index of the first sample on the step's calendar axis.
    pub fn start_index(&self) -> i64 {
        match self.step {
            Step::Monthly => month_index(self.start_year, self.start_month),
            Step::Annual => self.start_year as i64,
        }
    }

    /// Calendar label of sample `i` (`YYYY-MM` or `YYYY`).
    pub fn time_label(&self, i: usize) -> String {
        index_label(self.step, self.start_index() + i as i64)
    }

    /// All calendar labels, in order.
    pub fn time_labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.time_label(i)).collect()
    }

    /// Decimal time of sample `i` in years (mid-month for monthly samples),
    /// used for plot axes.
    pub fn time_years(&self, i: usize) -> f64 {
        match self.step {
            Step::Monthly => {
                let idx = self.start_index() + i as i64;
                let year = idx.div_euclid(12);
                let month = idx.rem_euclid(12);
                year as f64 + (month as f64 + 0.5) / 12.0
            }
            Step::Annual => (self.start_index() + i as i64) as f64 + 0.5,
        }
    }

    /// Sample mean.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }
}

fn month_index(year: i32, month: u8) -> i64 {
    year as i64 * 12 + (month as i64 - 1)
}

fn index_label(step: Step, idx: i64) -> String {
    match step {
        Step::Monthly => {
            let year = idx.div_euclid(12);
            let month = idx.rem_euclid(12) + 1;
            format!("{year:04}-{month:02}")
        }
        Step::Annual => format!("{idx:04}"),
    }
}

/// Policy for missing rows discovered during parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapFill {
    /// Any missing sample is an error.
    Reject,
    /// Linearly interpolate runs of up to `max_run` consecutive missing
    /// samples; longer runs are an error. Gaps touching either end of the
    /// series cannot be interpolated and are always errors.
    Linear { max_run: usize },
}

impl Default for GapFill {
    fn default() -> Self {
        GapFill::Reject
    }
}

/// Input layout presets. Each named source is a column mapping over the
/// same underlying parser; `GenericCsv` is the crate's own exchange format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    /// `time,value` header, rows `YYYY-MM,v` (monthly) or `YYYY,v` (annual).
    GenericCsv,
    /// SILSO/SIDC monthly mean sunspot number: `;`- or space-separated
    /// columns `year month decimal_year value ...`, negative value = missing.
    SidcSunspots,
    /// GISTEMP wide table: preamble lines, then a `Year,Jan,...,Dec,...`
    /// header, one row per year, cells in 0.01 degC, `***` = missing.
    GissTemperature,
    /// CDIAC global fossil-fuel carbon emissions: comment/preamble lines,
    /// then `year,total,...` rows (annual).
    CdiacCo2,
}

impl SeriesFormat {
    pub fn name(self) -> &'static str {
        match self {
            SeriesFormat::GenericCsv => "generic",
            SeriesFormat::SidcSunspots => "sidc",
            SeriesFormat::GissTemperature => "giss",
            SeriesFormat::CdiacCo2 => "cdiac",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "generic" => Ok(SeriesFormat::GenericCsv),
            "sidc" => Ok(SeriesFormat::SidcSunspots),
            "giss" => Ok(SeriesFormat::GissTemperature),
            "cdiac" => Ok(SeriesFormat::CdiacCo2),
            other => Err(Error::InvalidParam(format!(
                "unknown series format {other:?} (expected generic, sidc, giss or cdiac)"
            ))),
        }
    }
}

/// Parse a series from a file.
pub fn parse_series(path: impl AsRef<Path>, format: SeriesFormat) -> Result<TimeSeries> {
    parse_series_opts(path, format, GapFill::Reject)
}

/// Parse a series from a file with an explicit gap policy.
pub fn parse_series_opts(
    path: impl AsRef<Path>,
    format: SeriesFormat,
    fill: GapFill,
) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_series_str(&text, format, fill, &label)
}

/// Parse a series from in-memory text. `label` names the series in errors
/// and downstream outputs.
pub fn parse_series_str(
    text: &str,
    format: SeriesFormat,
    fill: GapFill,
    label: &str,
) -> Result<TimeSeries> {
    let rows = match format {
        SeriesFormat::GenericCsv => extract_generic(text)?,
        SeriesFormat::SidcSunspots => extract_sidc(text)?,
        SeriesFormat::GissTemperature => extract_giss(text)?,
        SeriesFormat::CdiacCo2 => extract_cdiac(text)?,
    };
    assemble(rows, fill, label)
}

/// One extracted observation: calendar index, value, source line (1-based).
struct Row {
    step: Step,
    idx: i64,
    value: f64,
    line: usize,
}

fn lines_of(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

fn parse_value(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| Error::Value { line, msg: format!("{what} {tok:?} is not numeric") })?;
    if !v.is_finite() {
        return Err(Error::Value { line, msg: format!("{what} {tok:?} is not finite") });
    }
    Ok(v)
}

fn parse_int(tok: &str, line: usize, what: &str) -> Result<i64> {
    tok.trim()
        .parse()
        .map_err(|_| Error::Value { line, msg: format!("{what} {tok:?} is not an integer") })
}

/// `YYYY-MM` or `YYYY` time token of the generic format.
fn parse_time_token(tok: &str, line: usize) -> Result<(Step, i64)> {
    let tok = tok.trim();
    if let Some((y, m)) = tok.split_once('-') {
        let year = parse_int(y, line, "year")? as i32;
        let month = parse_int(m, line, "month")?;
        if !(1..=12).contains(&month) {
            return Err(Error::Parse { line, msg: format!("month {month} out of 1..=12") });
        }
        Ok((Step::Monthly, month_index(year, month as u8)))
    } else {
        let year = parse_int(tok, line, "year")?;
        Ok((Step::Annual, year))
    }
}

fn extract_generic(text: &str) -> Result<Vec<Row>> {
    let mut it = lines_of(text);
    match it.next() {
        Some((_, h)) if h.trim() == "time,value" => {}
        Some((line, h)) => {
            return Err(Error::Parse { line, msg: format!("expected header \"time,value\", got {h:?}") })
        }
        None => return Err(Error::Parse { line: 1, msg: "empty file".into() }),
    }
    let mut rows = Vec::new();
    for (line, raw) in it {
        if raw.trim().is_empty() {
            continue;
        }
        let (t, v) = raw
            .split_once(',')
            .ok_or_else(|| Error::Parse { line, msg: format!("expected \"time,value\" row, got {raw:?}") })?;
        let (step, idx) = parse_time_token(t, line)?;
        let value = parse_value(v, line, "value")?;
        rows.push(Row { step, idx, value, line });
    }
    Ok(rows)
}

fn split_cols(raw: &str) -> Vec<&str> {
    if raw.contains(';') {
        raw.split(';').map(str::trim).collect()
    } else {
        raw.split_whitespace().collect()
    }
}

fn extract_sidc(text: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (line, raw) in lines_of(text) {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('*') {
            continue;
        }
        let cols = split_cols(raw);
        if cols.len() < 4 {
            return Err(Error::Parse {
                line,
                msg: format!("sidc row needs at least 4 columns (year month dec_year value), got {}", cols.len()),
            });
        }
        let year = parse_int(cols[0], line, "year")? as i32;
        let month = parse_int(cols[1], line, "month")?;
        if !(1..=12).contains(&month) {
            return Err(Error::Parse { line, msg: format!("month {month} out of 1..=12") });
        }
        let value = parse_value(cols[3], line, "sunspot number")?;
        if value < 0.0 {
            continue; // missing-data marker
        }
        rows.push(Row { step: Step::Monthly, idx: month_index(year, month as u8), value, line });
    }
    Ok(rows)
}

fn extract_giss(text: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (line, raw) in lines_of(text) {
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if !seen_header {
            let lower = t.to_ascii_lowercase();
            if lower.starts_with("year,jan") || lower.starts_with("year jan") {
                seen_header = true;
            }
            continue; // preamble
        }
        let cols: Vec<&str> = if t.contains(',') {
            t.split(',').map(str::trim).collect()
        } else {
            t.split_whitespace().collect()
        };
        if cols.is_empty() || cols[0].to_ascii_lowercase() == "year" {
            continue; // repeated header blocks appear in some exports
        }
        if cols.len() < 13 {
            return Err(Error::Parse {
                line,
                msg: format!("giss row needs a year and 12 month columns, got {}", cols.len()),
            });
        }
        let year = parse_int(cols[0], line, "year")? as i32;
        for m in 1..=12u8 {
            let cell = cols[m as usize];
            if cell.is_empty() || cell.contains('*') {
                continue; // missing cell
            }
            let value = parse_value(cell, line, "anomaly")?;
            rows.push(Row { step: Step::Monthly, idx: month_index(year, m), value, line });
        }
    }
    if !seen_header {
        return Err(Error::Parse { line: 1, msg: "no \"Year,Jan,...\" header found".into() });
    }
    Ok(rows)
}

fn extract_cdiac(text: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (line, raw) in lines_of(text) {
        let t = raw.trim();
        if t.is_empty() || !t.starts_with(|c: char| c.is_ascii_digit()) {
            continue; // preamble/comment
        }
        let cols: Vec<&str> = if t.contains(',') {
            t.split(',').map(str::trim).collect()
        } else {
            t.split_whitespace().collect()
        };
        if cols.len() < 2 {
            return Err(Error::Parse { line, msg: "cdiac row needs year and total columns".into() });
        }
        let year = parse_int(cols[0], line, "year")?;
        let value = parse_value(cols[1], line, "emissions")?;
        rows.push(Row { step: Step::Annual, idx: year, value, line });
    }
    Ok(rows)
}

/// Validate ordering, resolve gaps per policy and build the series.
fn assemble(rows: Vec<Row>, fill: GapFill, label: &str) -> Result<TimeSeries> {
    if rows.len() < 2 {
        return Err(Error::Degenerate(format!(
            "series {label:?} needs at least 2 samples, got {}",
            rows.len()
        )));
    }
    let step = rows[0].step;
    for r in &rows {
        if r.step != step {
            return Err(Error::Parse {
                line: r.line,
                msg: "mixed monthly and annual timestamps in one file".into(),
            });
        }
    }
    for w in rows.windows(2) {
        if w[1].idx == w[0].idx {
            return Err(Error::Parse {
                line: w[1].line,
                msg: format!("duplicate timestamp {}", index_label(step, w[1].idx)),
            });
        }
        if w[1].idx < w[0].idx {
            return Err(Error::Parse {
                line: w[1].line,
                msg: format!(
                    "timestamps must increase: {} after {}",
                    index_label(step, w[1].idx),
                    index_label(step, w[0].idx)
                ),
            });
        }
    }

    let start = rows[0].idx;
    let end = rows[rows.len() - 1].idx;
    let n = (end - start + 1) as usize;
    let mut values = vec![f64::NAN; n];
    for r in &rows {
        values[(r.idx - start) as usize] = r.value;
    }

    // Gap resolution.
    let mut missing: Vec<String> = Vec::new();
    let mut i = 0;
    while i < n {
        if values[i].is_nan() {
            let run_start = i;
            while i < n && values[i].is_nan() {
                i += 1;
            }
            let run_len = i - run_start;
            let fixable = matches!(fill, GapFill::Linear { max_run } if run_len <= max_run);
            if fixable {
                // run_start >= 1 and i <= n-1 always hold: the first and last
                // samples come from actual rows.
                let v0 = values[run_start - 1];
                let v1 = values[i];
                let span = (run_len + 1) as f64;
                for (k, slot) in (0..run_len).zip(run_start..i) {
                    values[slot] = v0 + (v1 - v0) * (k + 1) as f64 / span;
                }
            } else {
                for j in run_start..i {
                    missing.push(index_label(step, start + j as i64));
                }
            }
        } else {
            i += 1;
        }
    }
    if !missing.is_empty() {
        return Err(Error::Gap { label: label.to_string(), missing });
    }

    let (start_year, start_month) = match step {
        Step::Monthly => ((start.div_euclid(12)) as i32, (start.rem_euclid(12) + 1) as u8),
        Step::Annual => (start as i32, 1),
    };
    TimeSeries::new(label, step, start_year, start_month, values)
}

/// Mean of each complete calendar year of a monthly series. Partial years
/// at either end are dropped.
pub fn annual_mean(x: &TimeSeries) -> Result<TimeSeries> {
    if x.step != Step::Monthly {
        return Err(Error::StepMismatch("annual_mean requires a monthly series".into()));
    }
    let start = x.start_index();
    let mut sums: BTreeMap<i64, (f64, u32)> = BTreeMap::new();
    for (i, v) in x.values.iter().enumerate() {
        let idx = start + i as i64;
        let year = idx.div_euclid(12);
        let e = sums.entry(year).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    let complete: Vec<(i64, f64)> =
        sums.into_iter().filter(|(_, (_, c))| *c == 12).map(|(y, (s, _))| (y, s / 12.0)).collect();
    if complete.len() < 2 {
        return Err(Error::Degenerate(format!(
            "annual_mean of {:?}: fewer than 2 complete years",
            x.label
        )));
    }
    for w in complete.windows(2) {
        // A missing interior year would mean the monthly series had a gap,
        // which parsing forbids.
        debug_assert_eq!(w[1].0, w[0].0 + 1);
    }
    TimeSeries::new(
        x.label.clone(),
        Step::Annual,
        complete[0].0 as i32,
        1,
        complete.iter().map(|&(_, v)| v).collect(),
    )
}

/// Restrict two series of the same step to their common time range.
pub fn align(a: &TimeSeries, b: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    if a.step != b.step {
        return Err(Error::StepMismatch(format!(
            "cannot align {} series {:?} with {} series {:?}",
            a.step.unit(),
            a.label,
            b.step.unit(),
            b.label
        )));
    }
    let start = a.start_index().max(b.start_index());
    let end = (a.start_index() + a.len() as i64 - 1).min(b.start_index() + b.len() as i64 - 1);
    if end - start + 1 < 2 {
        return Err(Error::EmptyOverlap(format!(
            "{:?} ({}..{}) and {:?} ({}..{})",
            a.label,
            a.time_label(0),
            a.time_label(a.len() - 1),
            b.label,
            b.time_label(0),
            b.time_label(b.len() - 1)
        )));
    }
    let slice = |s: &TimeSeries| -> Result<TimeSeries> {
        let lo = (start - s.start_index()) as usize;
        let hi = (end - s.start_index()) as usize + 1;
        let (year, month) = match s.step {
            Step::Monthly => ((start.div_euclid(12)) as i32, (start.rem_euclid(12) + 1) as u8),
            Step::Annual => (start as i32, 1),
        };
        TimeSeries::new(s.label.clone(), s.step, year, month, s.values[lo..hi].to_vec())
    };
    Ok((slice(a)?, slice(b)?))
}

/// Serialize to the generic CSV exchange format. Values use the shortest
/// round-trip decimal form, so write/parse is lossless.
pub fn to_csv_string(x: &TimeSeries) -> String {
    let mut out = String::with_capacity(16 * x.len() + 16);
    out.push_str("time,value\n");
    for (i, v) in x.values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", x.time_label(i), v);
    }
    out
}

/// Write the generic CSV exchange format to a file.
pub fn write_csv(x: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_csv_string(x)).map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn months(label: &str, year: i32, month: u8, values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(label, Step::Monthly, year, month, values).unwrap()
    }

    #[test]
    fn generic_two_rows() {
        let ts =
            parse_series_str("time,value\n1880-01,1.5\n1880-02,2.5\n", SeriesFormat::GenericCsv, GapFill::Reject, "t")
                .unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts.step, Step::Monthly);
        assert_eq!(ts.values, vec![1.5, 2.5]);
        assert_eq!(ts.time_label(1), "1880-02");
    }

    #[test]
    fn generic_annual() {
        let ts = parse_series_str("time,value\n1880,10\n1881,12\n1882,9\n", SeriesFormat::GenericCsv, GapFill::Reject, "t")
            .unwrap();
        assert_eq!(ts.step, Step::Annual);
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.time_label(2), "1882");
    }

    #[test]
    fn generic_bad_header_is_line_1() {
        let err = parse_series_str("date,value\n1880-01,1\n", SeriesFormat::GenericCsv, GapFill::Reject, "t")
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn generic_malformed_row_reports_line() {
        let err = parse_series_str(
            "time,value\n1880-01,1\nnot-a-row\n1880-03,2\n",
            SeriesFormat::GenericCsv,
            GapFill::Reject,
            "t",
        )
        .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn generic_non_numeric_value_reports_line() {
        let err = parse_series_str(
            "time,value\n1880-01,1\n1880-02,abc\n",
            SeriesFormat::GenericCsv,
            GapFill::Reject,
            "t",
        )
        .unwrap_err();
        match err {
            Error::Value { line, .. } => assert_eq!(line, 3),
            other => panic!("expected value error, got {other}"),
        }
    }

    #[test]
    fn gap_rejected_and_lists_stamps() {
        let err = parse_series_str(
            "time,value\n1880-01,1\n1880-04,2\n",
            SeriesFormat::GenericCsv,
            GapFill::Reject,
            "t",
        )
        .unwrap_err();
        match err {
            Error::Gap { missing, .. } => assert_eq!(missing, vec!["1880-02", "1880-03"]),
            other => panic!("expected gap error, got {other}"),
        }
    }

    #[test]
    fn gap_filled_linearly_up_to_three() {
        let ts = parse_series_str(
            "time,value\n1880-01,1\n1880-05,9\n",
            SeriesFormat::GenericCsv,
            GapFill::Linear { max_run: 3 },
            "t",
        )
        .unwrap();
        assert_eq!(ts.values, vec![1.0, 3.0, 5.0, 7.0, 9.0]);
    }

    #[test]
    fn gap_longer_than_three_still_errors() {
        let err = parse_series_str(
            "time,value\n1880-01,1\n1880-06,9\n",
            SeriesFormat::GenericCsv,
            GapFill::Linear { max_run: 3 },
            "t",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Gap { ref missing, .. } if missing.len() == 4));
    }

    #[test]
    fn duplicate_timestamp_is_parse_error() {
        let err = parse_series_str(
            "time,value\n1880-01,1\n1880-01,2\n",
            SeriesFormat::GenericCsv,
            GapFill::Reject,
            "t",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn out_of_order_timestamp_is_parse_error() {
        let err = parse_series_str(
            "time,value\n1881-01,1\n1880-12,2\n",
            SeriesFormat::GenericCsv,
            GapFill::Reject,
            "t",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn sidc_rows_parse_with_semicolons() {
        let text = "\
1880;01;1880.042;32.3;5.0;100;1
1880;02;1880.123;27.5;4.1;98;1
1880;03;1880.204;19.0;3.3;97;1
";
        let ts = parse_series_str(text, SeriesFormat::SidcSunspots, GapFill::Reject, "s").unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.start_year, 1880);
        assert_eq!(ts.start_month, 1);
        assert_eq!(ts.values[1], 27.5);
    }

    #[test]
    fn sidc_negative_value_is_missing() {
        let text = "1880 01 1880.042 32.3\n1880 02 1880.123 -1\n1880 03 1880.204 19.0\n";
        let err = parse_series_str(text, SeriesFormat::SidcSunspots, GapFill::Reject, "s").unwrap_err();
        assert!(matches!(err, Error::Gap { ref missing, .. } if missing == &["1880-02"]));
        let ts = parse_series_str(text, SeriesFormat::SidcSunspots, GapFill::Linear { max_run: 3 }, "s").unwrap();
        assert!((ts.values[1] - (32.3 + 19.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn giss_wide_rows_parse_and_truncate_trailing_missing() {
        let text = "\
Land-Ocean Temperature Index
Year,Jan,Feb,Mar,Apr,May,Jun,Jul,Aug,Sep,Oct,Nov,Dec,J-D
1880,-30,-21,-18,-27,-14,-29,-24,-8,-17,-15,-19,-21,-20
1881,-10,-14,3,5,2,-33,1,-4,-9,-9,-19,-9,-8
1882,13,14,4,-16,-14,-24,-10,-4,-10,-23,-16,-25,-9
";
        let ts = parse_series_str(text, SeriesFormat::GissTemperature, GapFill::Reject, "g").unwrap();
        assert_eq!(ts.len(), 36);
        assert_eq!(ts.values[0], -30.0);
        assert_eq!(ts.values[35], -25.0);

        let partial = format!("{text}1883,5,7,***,***,***,***,***,***,***,***,***,***,***\n");
        let ts2 = parse_series_str(&partial, SeriesFormat::GissTemperature, GapFill::Reject, "g").unwrap();
        assert_eq!(ts2.len(), 38); // trailing missing months truncated
        assert_eq!(ts2.values[37], 7.0);
    }

    #[test]
    fn cdiac_rows_parse_after_preamble() {
        let text = "\
Global CO2 emissions from fossil-fuel burning
Year,Total,Gas,Liquids,Solids,Cement,Flaring
1880,236000,1000,3000,232000,0,0
1881,243000,1000,4000,238000,0,0
1882,256000,1000,4000,251000,0,0
";
        let ts = parse_series_str(text, SeriesFormat::CdiacCo2, GapFill::Reject, "c").unwrap();
        assert_eq!(ts.step, Step::Annual);
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.values[2], 256000.0);
    }

    #[test]
    fn annual_mean_of_constant_year() {
        let ts = months("t", 1900, 1, vec![2.0; 24]);
        let a = annual_mean(&ts).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.values, vec![2.0, 2.0]);
        assert_eq!(a.step, Step::Annual);
    }

    #[test]
    fn annual_mean_of_ramp_year() {
        let mut v: Vec<f64> = (1..=12).map(f64::from).collect();
        v.extend((1..=12).map(|m| 2.0 * f64::from(m)));
        let a = annual_mean(&months("t", 1900, 1, v)).unwrap();
        assert_eq!(a.values, vec![6.5, 13.0]);
    }

    #[test]
    fn annual_mean_drops_partial_years() {
        // Jan 1880 .. May 2016. Independent count of complete years: every
        // year from 1880 through 2015 contributes 12 months, 2016 only 5.
        let start = month_index(1880, 1);
        let end = month_index(2016, 5);
        let n = (end - start + 1) as usize;
        assert_eq!(n, 1637);
        let mut expect_complete = 0;
        for year in 1880..=2016 {
            let have = (1..=12u8)
                .filter(|&m| {
                    let i = month_index(year, m);
                    i >= start && i <= end
                })
                .count();
            if have == 12 {
                expect_complete += 1;
            }
        }
        assert_eq!(expect_complete, 136);

        let ts = months("t", 1880, 1, (0..n).map(|i| (i % 7) as f64).collect());
        let a = annual_mean(&ts).unwrap();
        assert_eq!(a.len(), expect_complete);
        assert_eq!(a.start_year, 1880);
        assert_eq!(a.time_label(a.len() - 1), "2015");
    }

    #[test]
    fn annual_mean_starting_mid_year_drops_first_year() {
        let ts = months("t", 1900, 7, vec![1.0; 30]); // Jul 1900 .. Dec 1902
        let a = annual_mean(&ts).unwrap();
        assert_eq!(a.start_year, 1901);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn annual_mean_rejects_annual_input() {
        let ts = TimeSeries::new("t", Step::Annual, 1900, 1, vec![1.0, 2.0]).unwrap();
        assert!(matches!(annual_mean(&ts), Err(Error::StepMismatch(_))));
    }

    #[test]
    fn align_trims_to_intersection() {
        let a = TimeSeries::new("temp", Step::Annual, 1880, 1, vec![0.0; 136]).unwrap();
        let b = TimeSeries::new("co2", Step::Annual, 1880, 1, vec![1.0; 134]).unwrap();
        let (aa, bb) = align(&a, &b).unwrap();
        assert_eq!(aa.len(), 134);
        assert_eq!(bb.len(), 134);
        assert_eq!(aa.time_label(133), "2013");
        assert_eq!(aa.start_year, 1880);
    }

    #[test]
    fn align_is_idempotent() {
        let a = months("a", 1900, 3, (0..50).map(f64::from).collect());
        let b = months("b", 1901, 1, (0..50).map(|i| f64::from(i) * 2.0).collect());
        let (a1, b1) = align(&a, &b).unwrap();
        let (a2, b2) = align(&a1, &b1).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
    }

    #[test]
    fn align_disjoint_errors() {
        let a = TimeSeries::new("a", Step::Annual, 1900, 1, vec![0.0; 10]).unwrap();
        let b = TimeSeries::new("b", Step::Annual, 1950, 1, vec![0.0; 10]).unwrap();
        assert!(matches!(align(&a, &b), Err(Error::EmptyOverlap(_))));
    }

    #[test]
    fn align_step_mismatch_errors() {
        let a = TimeSeries::new("a", Step::Annual, 1900, 1, vec![0.0; 10]).unwrap();
        let b = months("b", 1900, 1, vec![0.0; 120]);
        assert!(matches!(align(&a, &b), Err(Error::StepMismatch(_))));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let vals = vec![0.1, -2.5e-17, 3.0, 1234567.8912345, -0.0, 5e300];
        let ts = months("t", 1999, 11, vals.clone());
        let back =
            parse_series_str(&to_csv_string(&ts), SeriesFormat::GenericCsv, GapFill::Reject, "t").unwrap();
        assert_eq!(back.values.len(), vals.len());
        for (a, b) in back.values.iter().zip(&vals) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.start_year, 1999);
        assert_eq!(back.start_month, 11);
    }

    #[test]
    fn single_sample_is_degenerate() {
        let err =
            parse_series_str("time,value\n1880-01,1\n", SeriesFormat::GenericCsv, GapFill::Reject, "t").unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }
}
