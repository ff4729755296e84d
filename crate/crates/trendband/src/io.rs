//! Wide CSV files: one header row `t,<grid>` followed by one row per curve.
//!
//! Comment lines start with `#`; a `# T=<value>` comment sets the horizon,
//! which otherwise defaults to the last grid value. Numbers are written in
//! the shortest decimal form that parses back to the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use trendband_core::{BandKind, ConfidenceBand, DesignGrid, FunctionalSample, Kernel, Method, TrendEstimate};

use crate::error::{Error, Result};

pub(crate) fn stdout_lock() -> std::io::StdoutLock<'static> {
    std::io::stdout().lock()
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn parse_f64(field: &str, line: u64) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::parse(line, format!("'{field}' is not a number")))
}

/// Value of a `# T=...` comment, if the line is one.
fn horizon_comment(line: &str) -> Option<&str> {
    let body = line.trim_start().strip_prefix('#')?.trim();
    let (key, value) = body.split_once('=')?;
    (key.trim() == "T").then(|| value.trim())
}

/// Non-blank, non-comment lines as `(line number, fields)`.
fn records(text: &str) -> impl Iterator<Item = (u64, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('#')).then(|| (i as u64 + 1, line.split(',').map(str::trim).collect()))
    })
}

fn write_row<W: Write>(out: &mut W, fields: impl IntoIterator<Item = String>) -> Result<()> {
    let row: Vec<String> = fields.into_iter().collect();
    writeln!(out, "{}", row.join(","))?;
    Ok(())
}

pub fn parse_sample<R: Read>(mut input: R) -> Result<FunctionalSample> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;

    let mut horizon = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(v) = horizon_comment(line) {
            horizon = Some(parse_f64(v, i as u64 + 1)?);
        }
    }

    let mut rows = records(&text);
    let (header_line, header) = rows.next().ok_or_else(|| Error::parse(1, "missing header row"))?;
    if header[0] != "t" {
        return Err(Error::parse(header_line, "header row must start with 't'"));
    }
    let points = header
        .iter()
        .skip(1)
        .map(|f| parse_f64(f, header_line))
        .collect::<Result<Vec<f64>>>()?;
    if points.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::parse(header_line, "grid values must be strictly increasing"));
    }
    let p = points.len();
    let horizon = horizon.or(points.last().copied()).unwrap_or(0.0);
    let grid = DesignGrid::new(points, horizon).map_err(|e| Error::parse(header_line, e.to_string()))?;

    let mut data = Vec::new();
    for (line, record) in rows {
        if record.len() != p {
            return Err(Error::parse(
                line,
                format!("expected {p} values, found {}", record.len()),
            ));
        }
        for field in record {
            data.push(parse_f64(field, line)?);
        }
    }
    if data.is_empty() {
        return Err(Error::parse(header_line, "no curves after the header row"));
    }
    Ok(FunctionalSample::new(data, grid)?)
}

pub fn read_sample(path: &Path) -> Result<FunctionalSample> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_sample(file)
}

pub fn write_sample<W: Write>(out: W, sample: &FunctionalSample) -> Result<()> {
    let mut out = BufWriter::new(out);
    let grid = sample.grid();
    if grid.points().last() != Some(&grid.horizon()) {
        writeln!(out, "# T={}", fmt(grid.horizon()))?;
    }
    write_row(
        &mut out,
        std::iter::once("t".to_string()).chain(grid.points().iter().map(|&x| fmt(x))),
    )?;
    for row in sample.rows() {
        write_row(&mut out, row.iter().map(|&x| fmt(x)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trend<W: Write>(out: W, trend: &TrendEstimate) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "t,estimate")?;
    for (t, v) in trend.eval_grid.iter().zip(&trend.values) {
        write_row(&mut out, [fmt(*t), fmt(*v)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_band<W: Write>(out: W, band: &ConfidenceBand) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "t,center,lower,upper")?;
    for i in 0..band.eval_grid.len() {
        write_row(
            &mut out,
            [
                fmt(band.eval_grid[i]),
                fmt(band.center[i]),
                fmt(band.lower[i]),
                fmt(band.upper[i]),
            ],
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Columns of a band CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BandTable {
    pub t: Vec<f64>,
    pub center: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BandTable {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

impl From<&ConfidenceBand> for BandTable {
    fn from(band: &ConfidenceBand) -> Self {
        BandTable {
            t: band.eval_grid.clone(),
            center: band.center.clone(),
            lower: band.lower.clone(),
            upper: band.upper.clone(),
        }
    }
}

pub fn read_band<R: Read>(mut input: R) -> Result<BandTable> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut rows = records(&text);
    let (header_line, header) = rows.next().ok_or_else(|| Error::parse(1, "missing header row"))?;
    if header != ["t", "center", "lower", "upper"] {
        return Err(Error::parse(header_line, "expected header t,center,lower,upper"));
    }
    let mut table = BandTable::default();
    for (line, record) in rows {
        if record.len() != 4 {
            return Err(Error::parse(line, format!("expected 4 values, found {}", record.len())));
        }
        let cols = [&mut table.t, &mut table.center, &mut table.lower, &mut table.upper];
        for (col, field) in cols.into_iter().zip(record) {
            col.push(parse_f64(field, line)?);
        }
    }
    Ok(table)
}

/// JSON sidecar describing how a band was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandHeader {
    pub kind: BandKind,
    pub gamma: f64,
    pub level: f64,
    pub n: usize,
    pub method: Method,
    pub kernel: Kernel,
    pub h: f64,
    pub eval_points: usize,
}

impl BandHeader {
    pub fn new(trend: &TrendEstimate, band: &ConfidenceBand) -> Self {
        BandHeader {
            kind: band.kind,
            gamma: band.gamma,
            level: band.level,
            n: band.n,
            method: trend.config.method,
            kernel: trend.config.kernel,
            h: trend.bandwidth,
            eval_points: band.eval_grid.len(),
        }
    }
}
