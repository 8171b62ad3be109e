//! Plain-text container for time×scale planes.
//!
//! One file holds the period axis, the column time axis (decimal years),
//! the cone-of-influence boundary and any number of named value planes, all
//! preceded by free-form metadata. The layout is line oriented:
//!
//! ```text
//! # grid v1
//! # label: <name>
//! # meta <key>: <value>          (zero or more, sorted by key)
//! # periods: p0 p1 ... p{J-1}
//! # times: t0 t1 ... t{N-1}
//! # coi: c0 c1 ... c{N-1}
//! # planes: name0 name1 ...
//! <J rows of N whitespace-separated values>   (plane name0)
//! <J rows of N whitespace-separated values>   (plane name1)
//! ...
//! ```
//!
//! Values are written with Rust's shortest-round-trip float formatting, so
//! parsing a file back yields bit-identical numbers. Boolean planes are
//! stored as `0`/`1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GridDoc {
    pub label: String,
    /// Free-form metadata (parameter values, fit summaries, config digest).
    pub meta: BTreeMap<String, String>,
    /// Fourier periods per row, native time units.
    pub periods: Vec<f64>,
    /// Decimal-year timestamp per column.
    pub times: Vec<f64>,
    /// Cone-of-influence boundary period per column.
    pub coi: Vec<f64>,
    /// Named `(J, N)` planes, in file order.
    pub planes: Vec<(String, Array2<f64>)>,
}

impl GridDoc {
    pub fn new(label: impl Into<String>, periods: Vec<f64>, times: Vec<f64>, coi: Vec<f64>) -> Self {
        GridDoc { label: label.into(), meta: BTreeMap::new(), periods, times, coi, planes: Vec::new() }
    }

    /// Attach a named plane; panics on shape mismatch (caller bug).
    pub fn push_plane(&mut self, name: impl Into<String>, plane: Array2<f64>) {
        assert_eq!(
            plane.dim(),
            (self.periods.len(), self.times.len()),
            "plane shape must match the axes"
        );
        self.planes.push((name.into(), plane));
    }

    /// Convenience for boolean planes, stored as 0/1.
    pub fn push_bool_plane(&mut self, name: impl Into<String>, plane: &Array2<bool>) {
        self.push_plane(name, plane.mapv(|b| if b { 1.0 } else { 0.0 }));
    }

    pub fn plane(&self, name: &str) -> Option<&Array2<f64>> {
        self.planes.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# grid v1\n");
        let _ = writeln!(out, "# label: {}", self.label);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# meta {k}: {v}");
        }
        write_axis(&mut out, "periods", &self.periods);
        write_axis(&mut out, "times", &self.times);
        write_axis(&mut out, "coi", &self.coi);
        let names: Vec<&str> = self.planes.iter().map(|(n, _)| n.as_str()).collect();
        let _ = writeln!(out, "# planes: {}", names.join(" "));
        for (_, plane) in &self.planes {
            for row in plane.rows() {
                let mut first = true;
                for v in row {
                    if !first {
                        out.push(' ');
                    }
                    let _ = write!(out, "{v}");
                    first = false;
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        super::write_atomic(path, self.to_text().as_bytes())
    }

    pub fn parse(text: &str) -> Result<GridDoc> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (line, first) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty grid file".into() })?;
        if first.trim() != "# grid v1" {
            return Err(Error::Parse { line, msg: "expected \"# grid v1\" header".into() });
        }

        let mut label = String::new();
        let mut meta = BTreeMap::new();
        let mut periods = Vec::new();
        let mut times = Vec::new();
        let mut coi = Vec::new();
        let mut names: Vec<String> = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();

        for (line, raw) in lines {
            if let Some(rest) = raw.strip_prefix('#') {
                let rest = rest.trim_start();
                if let Some(v) = rest.strip_prefix("label:") {
                    label = v.trim().to_string();
                } else if let Some(kv) = rest.strip_prefix("meta ") {
                    let (k, v) = kv.split_once(':').ok_or_else(|| Error::Parse {
                        line,
                        msg: "metadata line needs \"key: value\"".into(),
                    })?;
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                } else if let Some(v) = rest.strip_prefix("periods:") {
                    periods = parse_axis(v, line)?;
                } else if let Some(v) = rest.strip_prefix("times:") {
                    times = parse_axis(v, line)?;
                } else if let Some(v) = rest.strip_prefix("coi:") {
                    coi = parse_axis(v, line)?;
                } else if let Some(v) = rest.strip_prefix("planes:") {
                    names = v.split_whitespace().map(str::to_string).collect();
                } else {
                    return Err(Error::Parse { line, msg: format!("unknown header line {raw:?}") });
                }
            } else if !raw.trim().is_empty() {
                rows.push(parse_axis(raw, line)?);
            }
        }

        let j = periods.len();
        let n = times.len();
        if j == 0 || n == 0 {
            return Err(Error::Parse { line: 1, msg: "missing periods/times axes".into() });
        }
        if coi.len() != n {
            return Err(Error::Dimension(format!(
                "coi has {} entries for {} time columns",
                coi.len(),
                n
            )));
        }
        if rows.len() != j * names.len() {
            return Err(Error::Dimension(format!(
                "expected {} x {} = {} data rows, found {}",
                names.len(),
                j,
                j * names.len(),
                rows.len()
            )));
        }
        let mut planes = Vec::with_capacity(names.len());
        for (p, name) in names.into_iter().enumerate() {
            let mut flat = Vec::with_capacity(j * n);
            for (r, row) in rows[p * j..(p + 1) * j].iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Dimension(format!(
                        "plane {name:?} row {r} has {} values, expected {n}",
                        row.len()
                    )));
                }
                flat.extend_from_slice(row);
            }
            let plane = Array2::from_shape_vec((j, n), flat).expect("checked dimensions");
            planes.push((name, plane));
        }
        Ok(GridDoc { label, meta, periods, times, coi, planes })
    }
}

fn write_axis(out: &mut String, name: &str, values: &[f64]) {
    let _ = write!(out, "# {name}:");
    for v in values {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

fn parse_axis(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Value { line, msg: format!("{tok:?} is not a number") })
        })
        .collect()
}
