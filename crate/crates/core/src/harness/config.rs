//! Flat `key = value` simulation config.
//!
//! ```text
//! # lines starting with '#' are comments; lists are comma separated
//! functions   = corner, heavisine, wave
//! sizes       = 1024, 2048
//! snrs        = 3, 5
//! noise       = t3, lognormal
//! methods     = ld_block, nason, visushrink_hard
//! reps        = 100
//! filter      = la8
//! j0_offset   = 4
//! rule        = hard
//! master_seed = 20240101
//! alpha       = 0.05
//! ```
//!
//! Optional search keys: `grid_points`, `refine_rounds`,
//! `max_outer_iters`, `convergence_tol`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cv::SearchConfig;
use crate::error::{Error, Result};
use crate::harness::method::{DenoiseOptions, Method};
use crate::signals::{NoiseFamily, TestFunction};
use crate::threshold::Rule;
use crate::wavelet::{dyadic_exponent, FilterName};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub functions: Vec<TestFunction>,
    pub sizes: Vec<usize>,
    pub snrs: Vec<f64>,
    pub noise_families: Vec<NoiseFamily>,
    pub methods: Vec<Method>,
    pub reps: usize,
    pub filter: FilterName,
    pub j0_offset: usize,
    pub rule: Rule,
    pub master_seed: u64,
    pub alpha: f64,
    pub search: SearchConfig,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            functions: TestFunction::ALL.to_vec(),
            sizes: vec![512, 1024, 2048],
            snrs: vec![3.0, 5.0],
            noise_families: vec![NoiseFamily::T3, NoiseFamily::Lognormal],
            methods: vec![Method::LdBlock, Method::Nason, Method::VisushrinkHard],
            reps: 100,
            filter: FilterName::La8,
            j0_offset: 4,
            rule: Rule::Hard,
            master_seed: 1,
            alpha: 0.05,
            search: SearchConfig::default(),
        }
    }
}

fn parse_list<T: FromStr<Err = E>, E>(key: &str, value: &str, line: usize) -> Result<Vec<T>>
where
    E: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| Error::Parse { line, msg: format!("{key}: {e}") }))
        .collect()
}

fn parse_one<T: FromStr<Err = E>, E>(key: &str, value: &str, line: usize) -> Result<T>
where
    E: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| Error::Parse { line, msg: format!("{key}: {e}") })
}

impl SimulationConfig {
    /// Parses the config text; keys not given keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimulationConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, msg: format!("expected 'key = value', got '{content}'") })?;
            let key = key.trim();
            match key {
                "functions" => cfg.functions = parse_list(key, value, line)?,
                "sizes" => cfg.sizes = parse_list(key, value, line)?,
                "snrs" => cfg.snrs = parse_list(key, value, line)?,
                "noise" | "noise_families" => cfg.noise_families = parse_list(key, value, line)?,
                "methods" => cfg.methods = parse_list(key, value, line)?,
                "reps" => cfg.reps = parse_one(key, value, line)?,
                "filter" => cfg.filter = parse_one(key, value, line)?,
                "j0_offset" => cfg.j0_offset = parse_one(key, value, line)?,
                "rule" => cfg.rule = parse_one(key, value, line)?,
                "master_seed" | "seed" => cfg.master_seed = parse_one(key, value, line)?,
                "alpha" => cfg.alpha = parse_one(key, value, line)?,
                "grid_points" => cfg.search.grid_points = parse_one(key, value, line)?,
                "refine_rounds" => cfg.search.refine_rounds = parse_one(key, value, line)?,
                "max_outer_iters" => cfg.search.max_outer_iters = parse_one(key, value, line)?,
                "convergence_tol" => cfg.search.convergence_tol = parse_one(key, value, line)?,
                other => return Err(Error::Parse { line, msg: format!("unknown key '{other}'") }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 2 {
            return Err(Error::Config(format!("reps must be >= 2, got {}", self.reps)));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| dyadic_exponent(n).is_none() || n < 16) {
            return Err(Error::Config(format!("size {n} is not a power of two >= 16")));
        }
        if !self.methods.iter().any(|m| m.is_visushrink()) {
            return Err(Error::Config("methods must include visushrink_hard or visushrink_soft".into()));
        }
        if self.functions.is_empty() || self.sizes.is_empty() || self.snrs.is_empty() || self.noise_families.is_empty() {
            return Err(Error::Config("functions, sizes, snrs and noise must be nonempty".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        self.search.validate()
    }

    /// Method whose mean MSE is the ratio denominator.
    pub fn baseline(&self) -> Method {
        if self.methods.contains(&Method::VisushrinkHard) {
            Method::VisushrinkHard
        } else {
            Method::VisushrinkSoft
        }
    }

    pub fn denoise_options(&self) -> DenoiseOptions {
        DenoiseOptions { filter: self.filter, j0_offset: self.j0_offset, rule: self.rule, search: self.search }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_example() {
        let text = "# table grid\nfunctions = corner, heavisine\nsizes = 1024, 2048\nsnrs = 5\nnoise = t3\n\
                    methods = ld_block, nason, visushrink_hard\nreps = 100\nfilter = la8\nj0_offset = 4\n\
                    master_seed = 7  # trailing comment\n";
        let cfg = SimulationConfig::parse(text).unwrap();
        assert_eq!(cfg.functions, vec![TestFunction::Corner, TestFunction::Heavisine]);
        assert_eq!(cfg.sizes, vec![1024, 2048]);
        assert_eq!(cfg.snrs, vec![5.0]);
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.baseline(), Method::VisushrinkHard);
    }

    #[test]
    fn reports_bad_lines() {
        match SimulationConfig::parse("reps = 10\nsizes = 1000\n") {
            Err(Error::Config(msg)) => assert!(msg.contains("1000")),
            other => panic!("{other:?}"),
        }
        match SimulationConfig::parse("reps = 10\nbogus = 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(SimulationConfig::parse("methods = ld_block, nason\n").is_err());
        assert!(SimulationConfig::parse("reps = 1\n").is_err());
    }
}
