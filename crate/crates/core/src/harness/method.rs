use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cv::{ld_block_cv, nason_cv, Retention, SearchConfig, Sweep};
use crate::error::{Error, Result};
use crate::threshold::{estimate_sigma, hybridshrink, sure_profile, sureshrink, universal_threshold, visushrink, Rule};
use crate::wavelet::{clamp_j0, dwt, dyadic_exponent, idwt, FilterBank, FilterName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LdBlock,
    Nason,
    VisushrinkHard,
    VisushrinkSoft,
    Sureshrink,
    Hybridshrink,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::LdBlock,
        Method::Nason,
        Method::VisushrinkHard,
        Method::VisushrinkSoft,
        Method::Sureshrink,
        Method::Hybridshrink,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::LdBlock => "ld_block",
            Method::Nason => "nason",
            Method::VisushrinkHard => "visushrink_hard",
            Method::VisushrinkSoft => "visushrink_soft",
            Method::Sureshrink => "sureshrink",
            Method::Hybridshrink => "hybridshrink",
        }
    }

    pub fn is_visushrink(self) -> bool {
        matches!(self, Method::VisushrinkHard | Method::VisushrinkSoft)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

/// Settings shared by every method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseOptions {
    pub filter: FilterName,
    /// Coarsest thresholded level is `J - j0_offset`.
    pub j0_offset: usize,
    /// Termwise rule for the cross-validated global method.
    pub rule: Rule,
    pub search: SearchConfig,
}

impl Default for DenoiseOptions {
    fn default() -> Self {
        DenoiseOptions { filter: FilterName::La8, j0_offset: 4, rule: Rule::Hard, search: SearchConfig::default() }
    }
}

/// Per-level threshold report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelThreshold {
    pub level: usize,
    /// 1 for the finest level.
    pub from_top: usize,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_uncorrected: Option<f64>,
    /// `sqrt(lambda / L)` for block thresholds, `lambda` otherwise.
    pub standardized: f64,
}

/// What a method chose while denoising one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub j0: usize,
    pub levels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_lambda: Option<f64>,
    pub thresholds: Vec<LevelThreshold>,
    pub retention: Retention,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub objective_trace: Vec<Sweep>,
}

#[derive(Debug, Clone)]
pub struct Denoised {
    pub estimate: Vec<f64>,
    pub report: MethodReport,
}

/// Runs one method on a dyadic-length series.
pub fn denoise(y: &[f64], method: Method, opts: &DenoiseOptions) -> Result<Denoised> {
    let levels = dyadic_exponent(y.len())
        .filter(|&j| j >= 1)
        .ok_or_else(|| Error::Length(format!("series length {} is not a power of two >= 2", y.len())))?;
    let filter = FilterBank::new(opts.filter);
    let j0 = clamp_j0(levels, opts.j0_offset);
    match method {
        Method::LdBlock => {
            let fit = ld_block_cv(y, &filter, j0, &opts.search)?;
            let standardized = fit.standardized();
            let thresholds = fit
                .profile
                .levels()
                .zip(standardized)
                .map(|(j, s)| LevelThreshold {
                    level: j,
                    from_top: levels - j,
                    lambda: fit.profile.get(j),
                    lambda_uncorrected: Some(fit.uncorrected.get(j)),
                    standardized: s,
                })
                .collect();
            let report = MethodReport {
                method,
                j0: fit.j0,
                levels,
                block_len: Some(fit.block_len),
                global_lambda: None,
                thresholds,
                retention: fit.retention,
                objective_trace: fit.sweeps,
            };
            Ok(Denoised { estimate: fit.estimate, report })
        }
        Method::Nason => {
            let j0 = j0.max(1);
            let fit = nason_cv(y, &filter, j0, opts.rule, &opts.search)?;
            let mut report =
                termwise_report(method, j0, levels, vec![fit.lambda; levels - j0], Some(fit.lambda), fit.retention);
            report.thresholds.iter_mut().for_each(|t| t.lambda_uncorrected = Some(fit.lambda_half));
            Ok(Denoised { estimate: fit.estimate, report })
        }
        Method::VisushrinkHard | Method::VisushrinkSoft => {
            let rule = if method == Method::VisushrinkHard { Rule::Hard } else { Rule::Soft };
            let d = dwt(y, &filter, j0)?;
            let lambda = universal_threshold(estimate_sigma(&d), y.len());
            let out = visushrink(&d, rule);
            let retention = Retention::measure(&d, &out);
            Ok(Denoised {
                estimate: idwt(&out)?,
                report: termwise_report(method, j0, levels, vec![lambda; levels - j0], Some(lambda), retention),
            })
        }
        Method::Sureshrink | Method::Hybridshrink => {
            let d = dwt(y, &filter, j0)?;
            let hybrid = method == Method::Hybridshrink;
            let profile = sure_profile(&d, estimate_sigma(&d), hybrid);
            let out = if hybrid { hybridshrink(&d) } else { sureshrink(&d) };
            let retention = Retention::measure(&d, &out);
            Ok(Denoised { estimate: idwt(&out)?, report: termwise_report(method, j0, levels, profile.values, None, retention) })
        }
    }
}

fn termwise_report(
    method: Method,
    j0: usize,
    levels: usize,
    lambdas: Vec<f64>,
    global_lambda: Option<f64>,
    retention: Retention,
) -> MethodReport {
    let thresholds = lambdas
        .into_iter()
        .zip(j0..)
        .map(|(lambda, level)| LevelThreshold {
            level,
            from_top: levels - level,
            lambda,
            lambda_uncorrected: None,
            standardized: lambda,
        })
        .collect();
    MethodReport {
        method,
        j0,
        levels,
        block_len: None,
        global_lambda,
        thresholds,
        retention,
        objective_trace: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("cmws".parse::<Method>().is_err());
    }

    #[test]
    fn every_method_runs() {
        let y: Vec<f64> = (0..256).map(|i| ((i as f64) * 0.1).sin() + 0.1 * ((i * 7919 % 13) as f64 - 6.0)).collect();
        for m in Method::ALL {
            let out = denoise(&y, m, &DenoiseOptions::default()).unwrap();
            assert_eq!(out.estimate.len(), y.len());
            assert_eq!(out.report.method, m);
            assert!(!out.report.thresholds.is_empty());
        }
    }
}
