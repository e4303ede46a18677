//! Denoising a single observed series read from disk.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::method::{denoise, DenoiseOptions, Method, MethodReport};
use crate::wavelet::{reflect_pad, FilterName};

pub const MIN_SERIES_LEN: usize = 16;

/// Reads one numeric value per line. Blank lines and `#` comments are
/// skipped; with several comma-separated columns the last one is used, and
/// a non-numeric first line is treated as a header.
pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or("").trim().trim_matches('"');
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(v) => return Err(Error::Parse { line: idx + 1, msg: format!("non-finite value {v}") }),
            Err(_) if out.is_empty() && idx == first_content_line(text) => {}
            Err(_) => return Err(Error::Parse { line: idx + 1, msg: format!("not a number: '{field}'") }),
        }
    }
    Ok(out)
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| !l.split('#').next().unwrap_or("").trim().is_empty())
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n_original: usize,
    pub n_padded: usize,
    pub offset: usize,
    pub filter: FilterName,
    /// Percentage of all wavelet coefficients left nonzero.
    pub retained_percent: f64,
    /// Same, over detail coefficients only.
    pub detail_retained_percent: f64,
    pub report: MethodReport,
}

#[derive(Debug, Clone)]
pub struct FileDenoised {
    pub estimate: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// Pads `y` by reflection to a dyadic length, denoises, and returns the
/// stretch aligned with the original samples.
pub fn denoise_series(y: &[f64], method: Method, opts: &DenoiseOptions) -> Result<FileDenoised> {
    if y.len() < MIN_SERIES_LEN {
        return Err(Error::Length(format!("series has {} values, need at least {MIN_SERIES_LEN}", y.len())));
    }
    let padded = reflect_pad(y)?;
    let out = denoise(&padded.padded, method, opts)?;
    let estimate = padded.extract(&out.estimate).to_vec();
    let retention = &out.report.retention;
    let diagnostics = Diagnostics {
        n_original: y.len(),
        n_padded: padded.padded.len(),
        offset: padded.original_offset,
        filter: opts.filter,
        retained_percent: 100.0 * retention.fraction(),
        detail_retained_percent: 100.0 * retention.detail_fraction(),
        report: out.report,
    };
    Ok(FileDenoised { estimate, diagnostics })
}

pub fn denoise_file(path: &Path, method: Method, opts: &DenoiseOptions) -> Result<FileDenoised> {
    let text = std::fs::read_to_string(path)?;
    denoise_series(&parse_series(&text)?, method, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_csv_columns() {
        assert_eq!(parse_series("1\n2.5\n\n# note\n-3e-1\n").unwrap(), vec![1.0, 2.5, -0.3]);
        assert_eq!(parse_series("x,y\n0,1\n1,2\n").unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn bad_row_reports_line() {
        match parse_series("1\n2\nabc\n4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_series_rejected() {
        let y = vec![1.0; 15];
        assert!(matches!(denoise_series(&y, Method::LdBlock, &DenoiseOptions::default()), Err(Error::Length(_))));
    }

    #[test]
    fn constant_series_passes_through() {
        let y = vec![2.5; 100];
        for m in [Method::LdBlock, Method::Nason, Method::VisushrinkHard] {
            let out = denoise_series(&y, m, &DenoiseOptions::default()).unwrap();
            assert_eq!(out.estimate.len(), 100);
            assert!(out.estimate.iter().all(|v| (v - 2.5).abs() < 1e-9), "{m}");
            assert_eq!(out.diagnostics.detail_retained_percent, 0.0);
        }
    }

    #[test]
    fn odd_length_is_padded_to_dyadic() {
        let y: Vec<f64> = (0..314).map(|i| (i as f64 * 0.05).sin()).collect();
        let out = denoise_series(&y, Method::LdBlock, &DenoiseOptions::default()).unwrap();
        assert_eq!(out.diagnostics.n_padded, 512);
        assert_eq!(out.estimate.len(), 314);
    }
}
