//! Even-odd cross-validated threshold selection.
//!
//! The series is split into its odd- and even-indexed halves. Each half is
//! transformed, thresholded and reconstructed; a reconstruction from one
//! half is interpolated onto the sample positions of the other half and
//! scored against it. Two estimators are built on this:
//!
//! * [`nason_cv`]: one global term-by-term threshold minimizing the
//!   data-versus-reconstruction statistic, rescaled to the full length.
//! * [`ld_block_cv`]: one block threshold per resolution level, chosen by a
//!   top-down cascade followed by coordinate-wise refinement of a statistic
//!   that also penalizes disagreement between the two reconstructions,
//!   then rescaled level by level.
//!
//! For the level-dependent method, thresholds found on the half-length
//! series are indexed by their distance from the finest level, so
//! half-data level `j` carries the threshold for full-data level `j + 1`.
//! The global method keeps the same coarsest level on both lengths.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::threshold::{
    apply_blockwise, apply_termwise, block_project_in_place, block_score, make_block_partition, BlockPartition,
    Rule, Scale, ThresholdProfile,
};
use crate::wavelet::{dwt, dyadic_exponent, idwt, inverse_into, FilterBank, WaveletDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvMode {
    TermByTerm(Rule),
    Block,
}

impl CvMode {
    pub fn scale(self) -> Scale {
        match self {
            CvMode::TermByTerm(_) => Scale::Amplitude,
            CvMode::Block => Scale::SumOfSquares,
        }
    }
}

/// Which terms enter the cross-validation statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// Reconstruction-versus-data terms only.
    DataOnly,
    /// Data terms plus the disagreement between the two reconstructions.
    WithAgreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub refine_rounds: usize,
    pub max_outer_iters: usize,
    pub convergence_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { grid_points: 64, refine_rounds: 2, max_outer_iters: 5, convergence_tol: 1e-6 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 8 {
            return Err(Error::Config(format!("grid_points must be >= 8, got {}", self.grid_points)));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::Config("convergence_tol must be positive".into()));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::Config("max_outer_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Splits `y` into `(even, odd)` using 1-based positions:
/// even = (y2, y4, .., yn), odd = (y1, y3, .., y(n-1)).
pub fn split_even_odd(y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if dyadic_exponent(y.len()).is_none() || y.len() < 4 {
        return Err(Error::Length(format!(
            "even-odd split needs a power-of-two length >= 4, got {}",
            y.len()
        )));
    }
    let even = y.iter().skip(1).step_by(2).copied().collect();
    let odd = y.iter().step_by(2).copied().collect();
    Ok((even, odd))
}

/// Inverse of [`split_even_odd`].
pub fn interleave(even: &[f64], odd: &[f64]) -> Vec<f64> {
    odd.iter().zip(even).flat_map(|(&o, &e)| [o, e]).collect()
}

/// Midpoints of neighbouring samples with periodic wrap:
/// `out[i] = (r[i] + r[i+1 mod m]) / 2`.
pub fn interpolate_half(r: &[f64]) -> Vec<f64> {
    let m = r.len();
    (0..m).map(|i| 0.5 * (r[i] + r[(i + 1) % m])).collect()
}

/// Everything the cross-validation statistic needs about one series.
#[derive(Debug, Clone)]
pub struct CvContext {
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
    pub d_even: WaveletDecomposition,
    pub d_odd: WaveletDecomposition,
    pub partition: BlockPartition,
    pub mode: CvMode,
    pub statistic: Statistic,
}

impl CvContext {
    /// `half_j0` is the coarsest thresholded level of the half-length
    /// transforms.
    pub fn new(y: &[f64], filter: &FilterBank, half_j0: usize, mode: CvMode, statistic: Statistic) -> Result<Self> {
        let (even, odd) = split_even_odd(y)?;
        let d_even = dwt(&even, filter, half_j0)?;
        let d_odd = dwt(&odd, filter, half_j0)?;
        let partition = make_block_partition(d_even.levels, half_j0, even.len());
        Ok(CvContext { even, odd, d_even, d_odd, partition, mode, statistic })
    }

    /// Half-data detail levels, coarse to fine.
    pub fn levels(&self) -> RangeInclusive<usize> {
        self.d_even.j0..=self.d_even.levels - 1
    }

    pub fn zero_profile(&self) -> ThresholdProfile {
        ThresholdProfile::constant(self.d_even.j0, self.d_even.levels, 0.0, self.mode.scale())
    }

    /// Upper end of the search range over `levels`: the largest block
    /// sum of squares (or coefficient magnitude, term by term) in either half.
    pub fn range_hi(&self, levels: &[usize]) -> f64 {
        let mut hi = 0.0f64;
        for d in [&self.d_even, &self.d_odd] {
            for &j in levels {
                let coeffs = d.level(j);
                match self.mode {
                    CvMode::Block => {
                        for b in self.partition.level(j) {
                            hi = hi.max(block_score(coeffs, b, self.partition.block_len));
                        }
                    }
                    CvMode::TermByTerm(_) => {
                        hi = coeffs.iter().fold(hi, |acc, c| acc.max(c.abs()));
                    }
                }
            }
        }
        hi
    }
}

/// Scratch space for repeated objective evaluations.
struct Evaluator<'a> {
    ctx: &'a CvContext,
    even_coeffs: Vec<Vec<f64>>,
    odd_coeffs: Vec<Vec<f64>>,
    rec_even: Vec<f64>,
    rec_odd: Vec<f64>,
    scratch: Vec<f64>,
    evaluations: usize,
}

impl<'a> Evaluator<'a> {
    fn new(ctx: &'a CvContext) -> Self {
        let m = ctx.even.len();
        Evaluator {
            ctx,
            even_coeffs: ctx.d_even.details.clone(),
            odd_coeffs: ctx.d_odd.details.clone(),
            rec_even: vec![0.0; m],
            rec_odd: vec![0.0; m],
            scratch: vec![0.0; m],
            evaluations: 0,
        }
    }

    fn reconstruct(&mut self, profile: &ThresholdProfile) {
        let ctx = self.ctx;
        for (d, coeffs, rec) in [
            (&ctx.d_even, &mut self.even_coeffs, &mut self.rec_even),
            (&ctx.d_odd, &mut self.odd_coeffs, &mut self.rec_odd),
        ] {
            for (i, (dst, src)) in coeffs.iter_mut().zip(&d.details).enumerate() {
                let j = d.j0 + i;
                dst.copy_from_slice(src);
                if j < profile.j0 || j >= profile.end() {
                    continue;
                }
                let lambda = profile.get(j);
                match ctx.mode {
                    CvMode::Block => {
                        block_project_in_place(dst, ctx.partition.level(j), ctx.partition.block_len, lambda)
                    }
                    CvMode::TermByTerm(rule) => dst.iter_mut().for_each(|c| *c = rule.apply(*c, lambda)),
                }
            }
            inverse_into(&d.coarse, coeffs.iter().map(Vec::as_slice), &d.filter, rec, &mut self.scratch);
        }
    }

    fn objective(&mut self, profile: &ThresholdProfile) -> f64 {
        self.evaluations += 1;
        self.reconstruct(profile);
        let ctx = self.ctx;
        let m = ctx.even.len();
        let (re, ro) = (&self.rec_even, &self.rec_odd);
        let mut data = 0.0;
        let mut agreement = 0.0;
        for i in 0..m {
            let next = if i + 1 == m { 0 } else { i + 1 };
            // odd reconstruction at even position i
            let odd_at_even = 0.5 * (ro[i] + ro[next]);
            // even reconstruction at odd position i + 1
            let even_at_odd = 0.5 * (re[i] + re[next]);
            let a = odd_at_even - ctx.even[i];
            let b = even_at_odd - ctx.odd[next];
            let c = odd_at_even - re[i];
            data += a * a + b * b;
            agreement += c * c;
        }
        match ctx.statistic {
            Statistic::DataOnly => 0.5 * data,
            Statistic::WithAgreement => 0.5 * data + 0.5 * agreement,
        }
    }
}

/// The cross-validation statistic for one profile over the half-data levels.
pub fn cv_objective(ctx: &CvContext, profile: &ThresholdProfile) -> f64 {
    Evaluator::new(ctx).objective(profile)
}

/// Grid search over `[0, range_hi]` followed by `refine_rounds` rounds of
/// step halving around the incumbent. Ties resolve to the smaller value.
/// Returns `(argmin, min)`.
pub fn grid_minimize(mut f: impl FnMut(f64) -> f64, range_hi: f64, cfg: &SearchConfig) -> (f64, f64) {
    if !(range_hi > 0.0) {
        return (0.0, f(0.0));
    }
    let step = range_hi / (cfg.grid_points - 1) as f64;
    let mut best = (0.0, f(0.0));
    for i in 1..cfg.grid_points {
        let lambda = if i + 1 == cfg.grid_points { range_hi } else { step * i as f64 };
        let value = f(lambda);
        if value < best.1 {
            best = (lambda, value);
        }
    }
    let mut h = step;
    for _ in 0..cfg.refine_rounds {
        h *= 0.5;
        let center = best.0;
        for lambda in [center - h, center + h] {
            if !(0.0..=range_hi).contains(&lambda) {
                continue;
            }
            let value = f(lambda);
            if value < best.1 || (value == best.1 && lambda < best.0) {
                best = (lambda, value);
            }
        }
    }
    best
}

fn search_with_value(
    eval: &mut Evaluator<'_>,
    levels: &[usize],
    fixed: &ThresholdProfile,
    range_hi: f64,
    cfg: &SearchConfig,
) -> (f64, f64) {
    let mut trial = fixed.clone();
    grid_minimize(
        |lambda| {
            for &j in levels {
                trial.set(j, lambda);
            }
            eval.objective(&trial)
        },
        range_hi,
        cfg,
    )
}

/// Minimizes the statistic over one threshold shared by `levels`, with
/// `fixed` supplying every other level.
pub fn search_threshold(
    ctx: &CvContext,
    levels: &[usize],
    fixed: &ThresholdProfile,
    range_hi: f64,
    cfg: &SearchConfig,
) -> Result<f64> {
    if levels.is_empty() {
        return Err(Error::Usage("search_threshold needs at least one level".into()));
    }
    cfg.validate()?;
    let mut eval = Evaluator::new(ctx);
    Ok(search_with_value(&mut eval, levels, fixed, range_hi, cfg).0)
}

/// Top-down cascade: a global search fixes the finest level, then the
/// remaining levels are searched jointly and the finest of them fixed,
/// until the coarsest level is searched alone.
pub fn initial_cascade(ctx: &CvContext, cfg: &SearchConfig) -> Result<ThresholdProfile> {
    cfg.validate()?;
    let mut eval = Evaluator::new(ctx);
    Ok(cascade(&mut eval, cfg))
}

fn cascade(eval: &mut Evaluator<'_>, cfg: &SearchConfig) -> ThresholdProfile {
    let ctx = eval.ctx;
    let mut profile = ctx.zero_profile();
    let j0 = *ctx.levels().start();
    for top in ctx.levels().rev() {
        let levels: Vec<usize> = (j0..=top).collect();
        let range_hi = ctx.range_hi(&levels);
        let (lambda, _) = search_with_value(eval, &levels, &profile, range_hi, cfg);
        for &j in &levels {
            profile.set(j, lambda);
        }
    }
    profile
}

/// One pass of [`coordinate_refine`] over all levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub objective_before: f64,
    /// Statistic after each single-level update, finest level first.
    pub objective_after_update: Vec<f64>,
    pub max_relative_change: f64,
}

/// Re-optimizes each level's threshold with the others held fixed, finest
/// level first, until the largest relative change in a sweep drops below
/// the tolerance. A level keeps its threshold unless the search finds a
/// strictly lower statistic, so the statistic never increases.
pub fn coordinate_refine(
    ctx: &CvContext,
    profile: &ThresholdProfile,
    cfg: &SearchConfig,
) -> Result<(ThresholdProfile, Vec<Sweep>)> {
    cfg.validate()?;
    let mut eval = Evaluator::new(ctx);
    Ok(refine(&mut eval, profile.clone(), cfg))
}

fn refine(eval: &mut Evaluator<'_>, mut profile: ThresholdProfile, cfg: &SearchConfig) -> (ThresholdProfile, Vec<Sweep>) {
    let ctx = eval.ctx;
    let mut sweeps = Vec::new();
    let mut current = eval.objective(&profile);
    for _ in 0..cfg.max_outer_iters {
        let mut sweep = Sweep { objective_before: current, objective_after_update: Vec::new(), max_relative_change: 0.0 };
        for j in ctx.levels().rev() {
            let old = profile.get(j);
            let range_hi = ctx.range_hi(&[j]);
            let (candidate, value) = search_with_value(eval, &[j], &profile, range_hi, cfg);
            if value < current {
                profile.set(j, candidate);
                current = value;
                let change = if old == 0.0 { f64::INFINITY } else { (candidate - old).abs() / old.abs() };
                sweep.max_relative_change = sweep.max_relative_change.max(change);
            }
            sweep.objective_after_update.push(current);
        }
        let done = sweep.max_relative_change < cfg.convergence_tol;
        sweeps.push(sweep);
        if done {
            break;
        }
    }
    (profile, sweeps)
}

/// Rescales a global threshold found on `n/2` points to `n` points:
/// `lambda * (1 - ln 2 / ln n)^(-1/2)`.
pub fn nason_correction(lambda: f64, n: usize) -> f64 {
    lambda / (1.0 - std::f64::consts::LN_2 / (n as f64).ln()).sqrt()
}

/// Rescales each level of a full-data sum-of-squares profile: level `j`
/// (which holds `2^j` coefficients) is multiplied by
/// `(1 - ln 2 / ln 2^j)^(-1)`. Requires `2^j > 2`.
pub fn ld_correction(profile: &ThresholdProfile, n: usize) -> Result<ThresholdProfile> {
    let levels = dyadic_exponent(n).ok_or_else(|| Error::Length(format!("{n} is not a power of two")))?;
    let mut out = profile.clone();
    for j in profile.levels() {
        // paper-style index: 1 for the finest level
        let from_top = levels - j;
        let points = n as f64 / (from_top as f64).exp2();
        if points <= 2.0 {
            return Err(Error::Config(format!(
                "level correction undefined for level {j}: n / 2^{from_top} = {points} <= 2"
            )));
        }
        let factor = 1.0 / (1.0 - std::f64::consts::LN_2 / points.ln());
        out.set(j, profile.get(j) * factor);
    }
    Ok(out)
}

/// Coefficient survival counts after thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Retention {
    pub total: usize,
    pub retained: usize,
    pub detail_total: usize,
    pub detail_retained: usize,
}

impl Retention {
    /// Counts coefficients of `thresholded` that are numerically nonzero,
    /// relative to the largest coefficient of `original`.
    pub fn measure(original: &WaveletDecomposition, thresholded: &WaveletDecomposition) -> Self {
        let biggest = original
            .coarse
            .iter()
            .chain(original.details.iter().flatten())
            .fold(0.0f64, |acc, c| acc.max(c.abs()));
        let tol = biggest * 1e-12;
        let alive = |c: &f64| c.abs() > tol;
        let coarse = thresholded.coarse.iter().filter(|c| alive(c)).count();
        let detail_retained = thresholded.details.iter().flatten().filter(|c| alive(c)).count();
        let detail_total = thresholded.details.iter().map(Vec::len).sum();
        Retention {
            total: thresholded.len(),
            retained: coarse + detail_retained,
            detail_total,
            detail_retained,
        }
    }

    pub fn fraction(&self) -> f64 {
        self.retained as f64 / self.total as f64
    }

    pub fn detail_fraction(&self) -> f64 {
        if self.detail_total == 0 {
            0.0
        } else {
            self.detail_retained as f64 / self.detail_total as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct NasonFit {
    pub estimate: Vec<f64>,
    /// Threshold applied to the full data, after the length correction.
    pub lambda: f64,
    pub lambda_half: f64,
    pub retention: Retention,
    pub thresholded: WaveletDecomposition,
}

/// Global term-by-term even-odd cross-validation.
pub fn nason_cv(y: &[f64], filter: &FilterBank, j0: usize, rule: Rule, cfg: &SearchConfig) -> Result<NasonFit> {
    cfg.validate()?;
    let n = y.len();
    let d = dwt(y, filter, j0)?;
    if n < 4 {
        return Err(Error::Length(format!("cross-validation needs at least 4 samples, got {n}")));
    }
    // the halves keep the same primary resolution; they just have one
    // detail level fewer
    let half_j0 = j0.min(d.levels.saturating_sub(2));
    let ctx = CvContext::new(y, filter, half_j0, CvMode::TermByTerm(rule), Statistic::DataOnly)?;
    let levels: Vec<usize> = ctx.levels().collect();
    let lambda_half = search_threshold(&ctx, &levels, &ctx.zero_profile(), ctx.range_hi(&levels), cfg)?;
    let lambda = nason_correction(lambda_half, n);
    let profile = ThresholdProfile::constant(j0, d.levels, lambda, Scale::Amplitude);
    let thresholded = apply_termwise(&d, &profile, rule);
    let estimate = idwt(&thresholded)?;
    let retention = Retention::measure(&d, &thresholded);
    Ok(NasonFit { estimate, lambda, lambda_half, retention, thresholded })
}

#[derive(Debug, Clone)]
pub struct LdBlockFit {
    pub estimate: Vec<f64>,
    /// Full-data thresholds after the level correction (sum-of-squares scale).
    pub profile: ThresholdProfile,
    /// Full-data thresholds before the correction.
    pub uncorrected: ThresholdProfile,
    /// Output of the cascade, before refinement, on full-data levels.
    pub cascade: ThresholdProfile,
    pub sweeps: Vec<Sweep>,
    /// Block length used on the full data.
    pub block_len: usize,
    pub retention: Retention,
    pub thresholded: WaveletDecomposition,
    pub j0: usize,
}

impl LdBlockFit {
    /// `sqrt(lambda_j / L)`, comparable to a term-by-term threshold.
    pub fn standardized(&self) -> Vec<f64> {
        self.profile.values.iter().map(|&l| (l / self.block_len as f64).sqrt()).collect()
    }
}

/// Smallest coarse level the level-dependent correction can handle.
pub const LD_BLOCK_MIN_J0: usize = 2;

/// Level-dependent block thresholding with even-odd cross-validation.
/// `j0` is raised to [`LD_BLOCK_MIN_J0`] when smaller.
pub fn ld_block_cv(y: &[f64], filter: &FilterBank, j0: usize, cfg: &SearchConfig) -> Result<LdBlockFit> {
    cfg.validate()?;
    let n = y.len();
    let levels = dyadic_exponent(n)
        .ok_or_else(|| Error::Length(format!("signal length {n} is not a power of two")))?;
    if n < 16 {
        return Err(Error::Length(format!("level-dependent block thresholding needs n >= 16, got {n}")));
    }
    let j0 = j0.max(LD_BLOCK_MIN_J0);
    let d = dwt(y, filter, j0)?;
    let ctx = CvContext::new(y, filter, j0 - 1, CvMode::Block, Statistic::WithAgreement)?;

    let mut eval = Evaluator::new(&ctx);
    let initial = cascade(&mut eval, cfg);
    let (half_profile, sweeps) = refine(&mut eval, initial.clone(), cfg);

    let uncorrected = half_profile.shifted_to_end(levels);
    let profile = ld_correction(&uncorrected, n)?;
    let partition = make_block_partition(levels, j0, n);
    let thresholded = apply_blockwise(&d, &profile, &partition);
    let estimate = idwt(&thresholded)?;
    let retention = Retention::measure(&d, &thresholded);
    Ok(LdBlockFit {
        estimate,
        profile,
        uncorrected,
        cascade: initial.shifted_to_end(levels),
        sweeps,
        block_len: partition.block_len,
        retention,
        thresholded,
        j0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::build_filter;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noisy(n: usize, seed: u64, amp: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| (i as f64 / n as f64 * 6.0).sin() * 3.0 + amp * rng.gen_range(-1.0..1.0))
            .collect()
    }

    #[test]
    fn split_examples() {
        let (e, o) = split_even_odd(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e, vec![2.0, 4.0]);
        assert_eq!(o, vec![1.0, 3.0]);
        let y = noisy(64, 1, 1.0);
        let (e, o) = split_even_odd(&y).unwrap();
        assert_eq!(interleave(&e, &o), y);
        let (e, o) = split_even_odd(&noisy(512, 2, 1.0)).unwrap();
        assert_eq!((e.len(), o.len()), (256, 256));
        assert!(split_even_odd(&[1.0, 2.0]).is_err());
        assert!(split_even_odd(&[1.0; 12]).is_err());
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(interpolate_half(&[2.0; 8]), vec![2.0; 8]);
        assert_eq!(interpolate_half(&[0.0, 2.0, 0.0, 2.0]), vec![1.0; 4]);
        let ramp: Vec<f64> = (0..8).map(f64::from).collect();
        let out = interpolate_half(&ramp);
        for i in 0..7 {
            assert_eq!(out[i], i as f64 + 0.5);
        }
        assert_eq!(out[7], 3.5);
    }

    #[test]
    fn corrections() {
        assert!((nason_correction(1.0, 1024) - 1.054_092_553).abs() < 1e-8);
        assert!((nason_correction(1.0, 512) - 1.060_660_172).abs() < 1e-8);
        assert_eq!(nason_correction(0.0, 512), 0.0);

        let profile = ThresholdProfile { j0: 6, values: vec![1.0; 4], scale: Scale::SumOfSquares };
        let c = ld_correction(&profile, 1024).unwrap();
        assert!((c.get(9) - 1.125).abs() < 1e-12);
        assert!((c.get(8) - 8.0 / 7.0).abs() < 1e-12);
        let zero = ThresholdProfile { values: vec![0.0; 4], ..profile.clone() };
        assert_eq!(ld_correction(&zero, 1024).unwrap().values, vec![0.0; 4]);
        let bad = ThresholdProfile { j0: 1, values: vec![1.0; 9], scale: Scale::SumOfSquares };
        assert!(matches!(ld_correction(&bad, 1024), Err(Error::Config(_))));
    }

    #[test]
    fn grid_minimize_ties_and_bounds() {
        let cfg = SearchConfig::default();
        assert_eq!(grid_minimize(|_| 1.0, 10.0, &cfg).0, 0.0);
        assert_eq!(grid_minimize(|_| 1.0, 0.0, &cfg).0, 0.0);
        // plateau beyond 4 -> smallest plateau point found by refinement
        let (x, _) = grid_minimize(|l| if l >= 4.0 { 0.0 } else { 1.0 }, 63.0, &cfg);
        assert!((4.0..=4.5).contains(&x), "{x}");
    }

    #[test]
    fn planted_minimum_is_found() {
        let cfg = SearchConfig::default();
        let range_hi = 10.0;
        let bound = range_hi / (cfg.grid_points as f64 * (cfg.refine_rounds as f64).exp2());
        for k in 0..50 {
            let target = 0.173 * k as f64 + 0.05;
            let (x, _) = grid_minimize(|l| (l - target).powi(2), range_hi, &cfg);
            assert!((x - target).abs() <= bound, "target {target}: got {x}");
            assert!((0.0..=range_hi).contains(&x));
        }
    }

    #[test]
    fn empty_level_set_is_usage_error() {
        let ctx = CvContext::new(&noisy(64, 3, 1.0), &build_filter("haar").unwrap(), 2, CvMode::Block, Statistic::WithAgreement)
            .unwrap();
        let err = search_threshold(&ctx, &[], &ctx.zero_profile(), 1.0, &SearchConfig::default());
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn zero_details_give_zero_thresholds() {
        let y = vec![1.5; 128];
        let ctx =
            CvContext::new(&y, &build_filter("haar").unwrap(), 2, CvMode::Block, Statistic::WithAgreement).unwrap();
        let p = initial_cascade(&ctx, &SearchConfig::default()).unwrap();
        assert!(p.values.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn single_level_cascade_is_one_search() {
        let y = noisy(64, 4, 1.0);
        let f = build_filter("la8").unwrap();
        // half length 32 => J' = 5; j0 = J' - 1 leaves one detail level
        let ctx = CvContext::new(&y, &f, 4, CvMode::Block, Statistic::WithAgreement).unwrap();
        let cfg = SearchConfig::default();
        let p = initial_cascade(&ctx, &cfg).unwrap();
        let direct = search_threshold(&ctx, &[4], &ctx.zero_profile(), ctx.range_hi(&[4]), &cfg).unwrap();
        assert_eq!(p.values, vec![direct]);
    }

    #[test]
    fn refine_never_increases_objective() {
        let f = build_filter("la8").unwrap();
        let cfg = SearchConfig::default();
        for seed in 0..10 {
            let y = noisy(256, seed, 2.0);
            let ctx = CvContext::new(&y, &f, 3, CvMode::Block, Statistic::WithAgreement).unwrap();
            let start = initial_cascade(&ctx, &cfg).unwrap();
            let (out, sweeps) = coordinate_refine(&ctx, &start, &cfg).unwrap();
            let mut prev = cv_objective(&ctx, &start);
            for s in &sweeps {
                for &v in &s.objective_after_update {
                    assert!(v <= prev);
                    prev = v;
                }
            }
            assert_eq!(cv_objective(&ctx, &out), prev);
        }
    }

    #[test]
    fn refined_profile_is_a_fixed_point() {
        let f = build_filter("la8").unwrap();
        let cfg = SearchConfig::default();
        let y = noisy(256, 11, 2.0);
        let ctx = CvContext::new(&y, &f, 3, CvMode::Block, Statistic::WithAgreement).unwrap();
        let start = initial_cascade(&ctx, &cfg).unwrap();
        let (once, _) = coordinate_refine(&ctx, &start, &cfg).unwrap();
        let (twice, sweeps) = coordinate_refine(&ctx, &once, &cfg).unwrap();
        assert_eq!(once, twice);
        assert_eq!(sweeps.len(), 1);
    }

    #[test]
    fn ld_block_zero_input() {
        let fit = ld_block_cv(&[0.0; 256], &build_filter("la8").unwrap(), 4, &SearchConfig::default()).unwrap();
        assert!(fit.estimate.iter().all(|&v| v == 0.0));
        assert!(fit.profile.values.iter().all(|&l| l == 0.0));
        assert_eq!(fit.retention.retained, 0);
    }

    #[test]
    fn nason_constant_signal_passes_through() {
        let y = vec![2.5; 256];
        let fit = nason_cv(&y, &build_filter("la8").unwrap(), 4, Rule::Hard, &SearchConfig::default()).unwrap();
        assert!(fit.estimate.iter().all(|v| (v - 2.5).abs() < 1e-10));
        assert_eq!(fit.retention.detail_retained, 0);
    }

    #[test]
    fn ld_block_is_keep_or_kill() {
        let f = build_filter("la8").unwrap();
        let y = noisy(512, 5, 1.5);
        let fit = ld_block_cv(&y, &f, 5, &SearchConfig::default()).unwrap();
        let d = dwt(&y, &f, fit.j0).unwrap();
        let partition = make_block_partition(d.levels, fit.j0, y.len());
        for j in fit.j0..d.levels {
            for b in partition.level(j) {
                let kept = &fit.thresholded.level(j)[b.clone()];
                let orig = &d.level(j)[b.clone()];
                assert!(kept == orig || kept.iter().all(|&c| c == 0.0));
            }
        }
        assert_eq!(idwt(&fit.thresholded).unwrap(), fit.estimate);
    }

    #[test]
    fn ld_block_is_deterministic() {
        let f = build_filter("la8").unwrap();
        let y = noisy(512, 6, 1.5);
        let a = ld_block_cv(&y, &f, 5, &SearchConfig::default()).unwrap();
        let b = ld_block_cv(&y, &f, 5, &SearchConfig::default()).unwrap();
        assert_eq!(a.profile, b.profile);
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn ld_block_rejects_short_input() {
        let f = build_filter("haar").unwrap();
        assert!(matches!(ld_block_cv(&[1.0; 8], &f, 0, &SearchConfig::default()), Err(Error::Length(_))));
        assert!(ld_block_cv(&noisy(16, 1, 1.0), &f, 0, &SearchConfig::default()).is_ok());
    }

    #[test]
    fn config_validation() {
        let cfg = SearchConfig { grid_points: 4, ..SearchConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = SearchConfig { convergence_tol: 0.0, ..SearchConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
