//! Threshold rules and the classical baseline estimators.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::WaveletDecomposition;

/// Normal consistency constant for the median absolute deviation.
pub const MAD_SCALE: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Soft,
    Hard,
}

impl Rule {
    pub fn apply(self, c: f64, lambda: f64) -> f64 {
        match self {
            Rule::Soft => soft_threshold(c, lambda),
            Rule::Hard => hard_threshold(c, lambda),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Soft => "soft",
            Rule::Hard => "hard",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "soft" => Ok(Rule::Soft),
            "hard" => Ok(Rule::Hard),
            other => Err(Error::Config(format!("unknown threshold rule '{other}'"))),
        }
    }
}

/// Whether thresholds compare against coefficient magnitudes or block
/// sums of squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Amplitude,
    SumOfSquares,
}

/// One threshold per detail level `j0..J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdProfile {
    pub j0: usize,
    pub values: Vec<f64>,
    pub scale: Scale,
}

impl ThresholdProfile {
    pub fn constant(j0: usize, levels: usize, lambda: f64, scale: Scale) -> Self {
        ThresholdProfile { j0, values: vec![lambda; levels - j0], scale }
    }

    /// Finest covered level plus one.
    pub fn end(&self) -> usize {
        self.j0 + self.values.len()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values[j - self.j0]
    }

    pub fn set(&mut self, j: usize, lambda: f64) {
        self.values[j - self.j0] = lambda;
    }

    pub fn levels(&self) -> Range<usize> {
        self.j0..self.end()
    }

    /// Same values re-indexed so that the finest level becomes `new_end - 1`.
    pub fn shifted_to_end(&self, new_end: usize) -> Self {
        ThresholdProfile {
            j0: new_end - self.values.len(),
            values: self.values.clone(),
            scale: self.scale,
        }
    }
}

pub fn soft_threshold(c: f64, lambda: f64) -> f64 {
    c.signum() * (c.abs() - lambda).max(0.0)
}

/// Keep-or-kill; `|c| == lambda` is killed.
pub fn hard_threshold(c: f64, lambda: f64) -> f64 {
    if c.abs() > lambda {
        c
    } else {
        0.0
    }
}

/// `sigma * sqrt(2 ln n)`.
pub fn universal_threshold(sigma: f64, n: usize) -> f64 {
    sigma * (2.0 * (n as f64).ln()).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

/// Median absolute deviation about the median, unscaled.
pub fn mad(values: &[f64]) -> f64 {
    let m = median(values);
    let dev: Vec<f64> = values.iter().map(|v| (v - m).abs()).collect();
    median(&dev)
}

/// Noise level from the finest detail level: `MAD / 0.6745`.
pub fn estimate_sigma(d: &WaveletDecomposition) -> f64 {
    mad(d.finest()) / MAD_SCALE
}

/// SURE-minimizing soft threshold for one level, on the amplitude scale.
///
/// Candidates are `0` and every `|c_k| / sigma`; the risk estimate
/// `m - 2 #{|x_k| <= t} + sum min(x_k^2, t^2)` is piecewise quadratic and
/// increasing between candidates, so the minimum over the candidates is
/// the global minimum. Ties go to the smaller threshold.
pub fn sure_level_threshold(coeffs: &[f64], sigma: f64) -> f64 {
    let m = coeffs.len();
    if m == 0 || sigma <= 0.0 {
        return 0.0;
    }
    let mut sq: Vec<f64> = coeffs.iter().map(|c| (c / sigma) * (c / sigma)).collect();
    sq.sort_by(f64::total_cmp);

    // t = 0: nothing at or below 0 except exact zeros
    let zeros = sq.iter().take_while(|&&s| s == 0.0).count();
    let mut best_risk = m as f64 - 2.0 * zeros as f64;
    let mut best_sq = 0.0;

    let mut prefix = 0.0;
    let mut i = 0;
    while i < m {
        // group equal values so the count includes all ties
        let t2 = sq[i];
        let mut k = i;
        while k < m && sq[k] == t2 {
            prefix += sq[k];
            k += 1;
        }
        let below = k;
        let risk = m as f64 - 2.0 * below as f64 + prefix + (m - below) as f64 * t2;
        if risk < best_risk {
            best_risk = risk;
            best_sq = t2;
        }
        i = k;
    }
    best_sq.sqrt() * sigma
}

/// Sparsity test used by HybridShrink:
/// `2^-j sum(d^2/s^2 - 1) <= 2^(-j/2) (log2 2^j)^(3/2)`.
pub fn level_is_sparse(coeffs: &[f64], sigmas: &[f64]) -> bool {
    let len = coeffs.len();
    if len == 0 {
        return true;
    }
    let j = (len as f64).log2();
    let lhs = coeffs
        .iter()
        .zip(sigmas)
        .map(|(d, s)| d * d / (s * s) - 1.0)
        .sum::<f64>()
        / len as f64;
    let rhs = (-j / 2.0).exp2() * j.powf(1.5);
    lhs <= rhs
}

/// Dyadic block length closest to `ln n`, ties broken upward.
pub fn block_length(n: usize) -> usize {
    let target = (n.max(2) as f64).ln();
    let mut best = 2usize;
    let mut candidate = 2usize;
    while (candidate as f64) < 2.0 * target + 2.0 {
        if (candidate as f64 - target).abs() <= (best as f64 - target).abs() {
            best = candidate;
        }
        candidate *= 2;
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub block_len: usize,
    pub j0: usize,
    /// `blocks[j - j0]` partitions level `j`.
    pub blocks: Vec<Vec<Range<usize>>>,
}

impl BlockPartition {
    pub fn level(&self, j: usize) -> &[Range<usize>] {
        &self.blocks[j - self.j0]
    }

    /// Threshold a block of `len` coefficients is compared against; short
    /// blocks are prorated.
    pub fn block_threshold(&self, len: usize, lambda: f64) -> f64 {
        prorate(len, self.block_len, lambda)
    }
}

fn prorate(len: usize, block_len: usize, lambda: f64) -> f64 {
    if len == block_len {
        lambda
    } else {
        lambda * len as f64 / block_len as f64
    }
}

/// Contiguous blocks of length `L = block_length(n)` over levels `j0..J`.
pub fn make_block_partition(levels: usize, j0: usize, n: usize) -> BlockPartition {
    let block_len = block_length(n);
    let blocks = (j0..levels)
        .map(|j| {
            let size = 1usize << j;
            (0..size)
                .step_by(block_len)
                .map(|start| start..(start + block_len).min(size))
                .collect()
        })
        .collect();
    BlockPartition { block_len, j0, blocks }
}

/// Keeps a block when its sum of squares exceeds `lambda` (prorated for a
/// short block), otherwise zeroes it.
pub fn block_project(coeffs: &[f64], blocks: &[Range<usize>], block_len: usize, lambda: f64) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    block_project_in_place(&mut out, blocks, block_len, lambda);
    out
}

pub fn block_project_in_place(coeffs: &mut [f64], blocks: &[Range<usize>], block_len: usize, lambda: f64) {
    for b in blocks {
        let energy: f64 = coeffs[b.clone()].iter().map(|c| c * c).sum();
        if energy <= prorate(b.len(), block_len, lambda) {
            coeffs[b.clone()].iter_mut().for_each(|c| *c = 0.0);
        }
    }
}

/// Smallest threshold that kills a block: its energy scaled up when short.
pub fn block_score(coeffs: &[f64], block: &Range<usize>, block_len: usize) -> f64 {
    let energy: f64 = coeffs[block.clone()].iter().map(|c| c * c).sum();
    energy * block_len as f64 / block.len() as f64
}

/// Applies a termwise profile to the detail levels it covers.
pub fn apply_termwise(d: &WaveletDecomposition, profile: &ThresholdProfile, rule: Rule) -> WaveletDecomposition {
    let mut out = d.clone();
    for j in profile.levels() {
        let lambda = profile.get(j);
        out.level_mut(j).iter_mut().for_each(|c| *c = rule.apply(*c, lambda));
    }
    out
}

/// Applies a sum-of-squares profile blockwise.
pub fn apply_blockwise(d: &WaveletDecomposition, profile: &ThresholdProfile, partition: &BlockPartition) -> WaveletDecomposition {
    let mut out = d.clone();
    for j in profile.levels() {
        let lambda = profile.get(j);
        block_project_in_place(out.level_mut(j), partition.level(j), partition.block_len, lambda);
    }
    out
}

/// Universal threshold with the MAD noise estimate, applied to every
/// detail level.
pub fn visushrink(d: &WaveletDecomposition, rule: Rule) -> WaveletDecomposition {
    let lambda = universal_threshold(estimate_sigma(d), d.len());
    let profile = ThresholdProfile::constant(d.j0, d.levels, lambda, Scale::Amplitude);
    apply_termwise(d, &profile, rule)
}

/// Per-level SURE thresholds (soft).
pub fn sureshrink(d: &WaveletDecomposition) -> WaveletDecomposition {
    let sigma = estimate_sigma(d);
    apply_termwise(d, &sure_profile(d, sigma, false), Rule::Soft)
}

/// SURE per level, falling back to the universal threshold of the level
/// length on levels that fail the sparsity test.
pub fn hybridshrink(d: &WaveletDecomposition) -> WaveletDecomposition {
    let sigma = estimate_sigma(d);
    apply_termwise(d, &sure_profile(d, sigma, true), Rule::Soft)
}

/// Thresholds chosen by SureShrink (`hybrid = false`) or HybridShrink.
pub fn sure_profile(d: &WaveletDecomposition, sigma: f64, hybrid: bool) -> ThresholdProfile {
    let values = d
        .detail_levels()
        .map(|(_, coeffs)| {
            if sigma <= 0.0 {
                0.0
            } else if hybrid && level_is_sparse(coeffs, &vec![sigma; coeffs.len()]) {
                universal_threshold(sigma, coeffs.len())
            } else {
                sure_level_threshold(coeffs, sigma)
            }
        })
        .collect();
    ThresholdProfile { j0: d.j0, values, scale: Scale::Amplitude }
}
