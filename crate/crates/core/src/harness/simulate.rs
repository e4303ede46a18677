//! Paired Monte-Carlo comparison of denoising methods.

use rayon::prelude::*;

use crate::error::Result;
use crate::harness::config::SimulationConfig;
use crate::harness::method::{denoise, Method};
use crate::harness::stats::{mean, paired_t_p_value, sample_sd};
use crate::harness::table::{CellError, ResultRow, ResultTable};
use crate::signals::{mse, sample_noise, scale_to_snr, stable_hash, substream, NoiseFamily, NoiseSpec, TestFunction};

/// One `(function, n, snr, noise)` combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub function: TestFunction,
    pub n: usize,
    pub snr: f64,
    pub noise: NoiseFamily,
}

impl Cell {
    /// Key for the cell's noise substreams.
    pub fn key(&self) -> u64 {
        stable_hash(&format!("{}/{}/{}/{}", self.function, self.n, self.snr, self.noise))
    }
}

pub fn cells(cfg: &SimulationConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for &function in &cfg.functions {
        for &n in &cfg.sizes {
            for &snr in &cfg.snrs {
                for &noise in &cfg.noise_families {
                    out.push(Cell { function, n, snr, noise });
                }
            }
        }
    }
    out
}

/// The noisy series for one repetition of a cell.
pub fn noisy_realization(cell: &Cell, truth: &[f64], master_seed: u64, rep: usize) -> Result<Vec<f64>> {
    let mut rng = substream(master_seed, cell.key(), rep as u64);
    let noise = sample_noise(cell.noise, cell.n, &mut rng);
    scale_to_snr(truth, &noise, cell.snr)
}

/// Per-repetition MSE of every method, in config order.
fn run_rep(cfg: &SimulationConfig, cell: &Cell, truth: &[f64], rep: usize) -> Result<Vec<f64>> {
    let y = noisy_realization(cell, truth, cfg.master_seed, rep)?;
    let opts = cfg.denoise_options();
    cfg.methods
        .iter()
        .map(|&m| mse(&denoise(&y, m, &opts)?.estimate, truth))
        .collect()
}

/// Runs every valid cell. Invalid cells are reported in
/// [`ResultTable::errors`] without stopping the run. Output is identical
/// for any rayon thread count.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let mut errors = Vec::new();
    let mut valid = Vec::new();
    for cell in cells(cfg) {
        let spec = NoiseSpec { family: cell.noise, snr: Some(cell.snr), seed: cfg.master_seed };
        match spec.validate().and_then(|_| crate::signals::test_function(cell.function, cell.n)) {
            Ok(truth) => valid.push((cell, truth)),
            Err(e) => errors.push(CellError::new(&cell, e.to_string())),
        }
    }

    let tasks: Vec<(usize, usize)> = (0..valid.len()).flat_map(|c| (0..cfg.reps).map(move |r| (c, r))).collect();
    let results: Vec<Result<Vec<f64>>> = tasks
        .par_iter()
        .map(|&(c, rep)| {
            let (cell, truth) = &valid[c];
            run_rep(cfg, cell, truth, rep)
        })
        .collect();

    let mut rows = Vec::new();
    let mut results = results.into_iter();
    for (cell, _) in &valid {
        let chunk: Vec<_> = results.by_ref().take(cfg.reps).collect();
        match chunk.into_iter().collect::<Result<Vec<Vec<f64>>>>() {
            Ok(per_rep) => rows.extend(summarize(cfg, cell, &per_rep)),
            Err(e) => errors.push(CellError::new(cell, e.to_string())),
        }
    }
    Ok(ResultTable { rows, errors, alpha: cfg.alpha })
}

fn summarize(cfg: &SimulationConfig, cell: &Cell, per_rep: &[Vec<f64>]) -> Vec<ResultRow> {
    let by_method: Vec<Vec<f64>> =
        (0..cfg.methods.len()).map(|k| per_rep.iter().map(|r| r[k]).collect()).collect();
    let means: Vec<f64> = by_method.iter().map(|v| mean(v)).collect();
    let baseline = cfg.methods.iter().position(|&m| m == cfg.baseline()).expect("baseline validated");
    let leader = means
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("at least one method");
    cfg.methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let p_value = if k == leader { 1.0 } else { paired_t_p_value(&by_method[k], &by_method[leader]) };
            ResultRow {
                function: cell.function,
                n: cell.n,
                snr: cell.snr,
                noise: cell.noise,
                method,
                mean_mse: means[k],
                sd_mse: sample_sd(&by_method[k]),
                ratio: if k == baseline { 1.0 } else { means[k] / means[baseline] },
                p_value,
                leader_tie: k == leader || p_value >= cfg.alpha,
            }
        })
        .collect()
}

/// Mean MSE of `method` in the given cell, if present.
pub fn lookup(table: &ResultTable, function: TestFunction, n: usize, snr: f64, noise: NoiseFamily, method: Method) -> Option<&ResultRow> {
    table
        .rows
        .iter()
        .find(|r| r.function == function && r.n == n && r.snr == snr && r.noise == noise && r.method == method)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> SimulationConfig {
        SimulationConfig {
            functions: vec![TestFunction::Wave],
            sizes: vec![256],
            snrs: vec![5.0],
            noise_families: vec![NoiseFamily::T3],
            methods: vec![Method::VisushrinkHard],
            reps: 2,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn baseline_only_has_unit_ratio() {
        let t = run_simulation(&small_cfg()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].ratio, 1.0);
        assert!(t.rows[0].mean_mse > 0.0);
    }

    #[test]
    fn cauchy_cells_are_reported_not_fatal() {
        let cfg = SimulationConfig { noise_families: vec![NoiseFamily::T3, NoiseFamily::Cauchy], ..small_cfg() };
        let t = run_simulation(&cfg).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.errors.len(), 1);
        assert!(t.errors[0].cell.contains("cauchy"));
    }

    #[test]
    fn methods_share_the_noise_realization() {
        let cfg = small_cfg();
        let cell = cells(&cfg)[0];
        let truth = crate::signals::test_function(cell.function, cell.n).unwrap();
        let a = noisy_realization(&cell, &truth, cfg.master_seed, 1).unwrap();
        let b = noisy_realization(&cell, &truth, cfg.master_seed, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, noisy_realization(&cell, &truth, cfg.master_seed, 0).unwrap());
    }

    #[test]
    fn leader_and_ratios() {
        let cfg = SimulationConfig {
            methods: vec![Method::LdBlock, Method::Nason, Method::VisushrinkHard],
            reps: 4,
            ..small_cfg()
        };
        let t = run_simulation(&cfg).unwrap();
        assert_eq!(t.rows.len(), 3);
        let base = &t.rows[2];
        assert_eq!(base.ratio, 1.0);
        for r in &t.rows {
            assert!((r.ratio - r.mean_mse / base.mean_mse).abs() < 1e-12 || r.method == Method::VisushrinkHard);
            assert!((0.0..=1.0).contains(&r.p_value));
            assert!(r.sd_mse >= 0.0);
        }
        assert!(t.rows.iter().any(|r| r.p_value == 1.0 && r.leader_tie));
    }
}
