//! Result tables and their CSV / markdown renderings.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::method::Method;
use crate::harness::simulate::Cell;
use crate::signals::{NoiseFamily, TestFunction};

pub const CSV_HEADER: [&str; 10] =
    ["function", "n", "snr", "noise", "method", "mean_mse", "sd_mse", "ratio", "p_value", "leader_tie"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub function: TestFunction,
    pub n: usize,
    pub snr: f64,
    pub noise: NoiseFamily,
    pub method: Method,
    pub mean_mse: f64,
    /// Standard deviation of the per-repetition MSE.
    pub sd_mse: f64,
    pub ratio: f64,
    /// Paired t-test against the cell leader (1 for the leader itself).
    pub p_value: f64,
    /// Leader, or not significantly different from it.
    pub leader_tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub cell: String,
    pub message: String,
}

impl CellError {
    pub fn new(cell: &Cell, message: String) -> Self {
        CellError { cell: format!("{}/n={}/snr={}/{}", cell.function, cell.n, cell.snr, cell.noise), message }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub errors: Vec<CellError>,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(Error::Config(format!("unknown table format '{other}'"))),
        }
    }
}

/// `%g`-style formatting with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can bump the exponent, e.g. 999999.7
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float");
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) { exp + 1 } else { exp };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

pub fn emit_table<W: Write>(t: &ResultTable, format: TableFormat, out: W) -> Result<()> {
    if t.rows.is_empty() {
        return Err(Error::Usage("cannot emit an empty result table".into()));
    }
    match format {
        TableFormat::Csv => emit_csv(t, out),
        TableFormat::Markdown => emit_markdown(t, out),
    }
}

fn emit_csv<W: Write>(t: &ResultTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &t.rows {
        w.write_record([
            r.function.to_string(),
            r.n.to_string(),
            sig6(r.snr),
            r.noise.to_string(),
            r.method.to_string(),
            sig6(r.mean_mse),
            sig6(r.sd_mse),
            sig6(r.ratio),
            sig6(r.p_value),
            r.leader_tie.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back a table written by [`emit_table`] in CSV form.
pub fn parse_table<R: Read>(input: R, alpha: f64) -> Result<ResultTable> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header {:?}", headers) });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k).parse().map_err(|e| Error::Parse { line, msg: format!("{}: {e}", CSV_HEADER[k]) })
        };
        let wrap = |e: Error| Error::Parse { line, msg: e.to_string() };
        rows.push(ResultRow {
            function: field(0).parse().map_err(wrap)?,
            n: field(1).parse().map_err(|e| Error::Parse { line, msg: format!("n: {e}") })?,
            snr: num(2)?,
            noise: field(3).parse().map_err(wrap)?,
            method: field(4).parse().map_err(wrap)?,
            mean_mse: num(5)?,
            sd_mse: num(6)?,
            ratio: num(7)?,
            p_value: num(8)?,
            leader_tie: field(9).parse().map_err(|e| Error::Parse { line, msg: format!("leader_tie: {e}") })?,
        });
    }
    Ok(ResultTable { rows, errors: Vec::new(), alpha })
}

/// One line per cell, one column per method; each entry is
/// `ratio(sd x 1e3)`, bold when it is the cell leader or not
/// significantly different from it.
fn emit_markdown<W: Write>(t: &ResultTable, mut out: W) -> Result<()> {
    let mut methods: Vec<Method> = Vec::new();
    for r in &t.rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    // cells in first-appearance order
    let mut order: Vec<(TestFunction, usize, String, NoiseFamily)> = Vec::new();
    let mut entries: BTreeMap<usize, Vec<Option<&ResultRow>>> = BTreeMap::new();
    for r in &t.rows {
        let key = (r.function, r.n, sig6(r.snr), r.noise);
        let idx = match order.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                order.push(key);
                order.len() - 1
            }
        };
        let slot = entries.entry(idx).or_insert_with(|| vec![None; methods.len()]);
        let m = methods.iter().position(|&m| m == r.method).expect("method collected");
        slot[m] = Some(r);
    }

    write!(out, "| Function | n | SNR | Noise |")?;
    for m in &methods {
        write!(out, " {m} |")?;
    }
    writeln!(out)?;
    write!(out, "|---|---:|---:|---|")?;
    for _ in &methods {
        write!(out, "---:|")?;
    }
    writeln!(out)?;
    for (idx, (function, n, snr, noise)) in order.iter().enumerate() {
        write!(out, "| {function} | {n} | {snr} | {noise} |")?;
        for entry in &entries[&idx] {
            match entry {
                Some(r) => {
                    let text = format!("{:.2}({:.2})", r.ratio, r.sd_mse * 1e3);
                    if r.leader_tie {
                        write!(out, " **{text}** |")?;
                    } else {
                        write!(out, " {text} |")?;
                    }
                }
                None => write!(out, " - |")?,
            }
        }
        writeln!(out)?;
    }
    writeln!(out)?;
    writeln!(
        out,
        "Entries are mean-MSE ratios to the baseline with the MSE standard deviation (x1e-3) in parentheses; \
         bold marks the lowest mean MSE and any method not significantly different from it \
         (paired t-test, alpha = {}).",
        t.alpha
    )?;
    Ok(())
}
