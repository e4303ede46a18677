//! Orthonormal filter banks, the periodic discrete wavelet transform and
//! reflection padding for series of non-dyadic length.
//!
//! Coefficients are laid out the usual way: `coarse` holds the `2^j0`
//! scaling coefficients and `details[j - j0]` holds the `2^j` wavelet
//! coefficients of level `j`, for `j = j0..J`. The transform matrix is
//! orthogonal, so `idwt(dwt(y)) == y` up to rounding and energy is preserved.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Haar scaling filter.
const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

/// Daubechies least-asymmetric scaling filter of length 8 ("la8", also
/// known as symlet 4), in the ordering used by waveslim.
const LA8: [f64; 8] = [
    -0.075_765_714_789_356_68,
    -0.029_635_527_645_960_39,
    0.497_618_667_632_562_90,
    0.803_738_751_805_386_00,
    0.297_857_795_605_605_05,
    -0.099_219_543_576_956_36,
    -0.012_603_967_262_263_83,
    0.032_223_100_604_078_15,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterName {
    Haar,
    La8,
}

impl FilterName {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterName::Haar => "haar",
            FilterName::La8 => "la8",
        }
    }
}

impl fmt::Display for FilterName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" => Ok(FilterName::Haar),
            "la8" => Ok(FilterName::La8),
            other => Err(Error::Config(format!("unknown filter '{other}' (expected haar or la8)"))),
        }
    }
}

/// Quadrature-mirror filter pair. The wavelet filter is derived from the
/// scaling filter by `g[l] = (-1)^l h[L-1-l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    name: FilterName,
    scaling: Vec<f64>,
    wavelet: Vec<f64>,
}

impl FilterBank {
    pub fn new(name: FilterName) -> Self {
        let scaling: Vec<f64> = match name {
            FilterName::Haar => HAAR.to_vec(),
            FilterName::La8 => LA8.to_vec(),
        };
        let len = scaling.len();
        let wavelet = (0..len)
            .map(|l| {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                sign * scaling[len - 1 - l]
            })
            .collect();
        FilterBank { name, scaling, wavelet }
    }

    pub fn name(&self) -> FilterName {
        self.name
    }

    pub fn scaling_taps(&self) -> &[f64] {
        &self.scaling
    }

    pub fn wavelet_taps(&self) -> &[f64] {
        &self.wavelet
    }

    pub fn len(&self) -> usize {
        self.scaling.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaling.is_empty()
    }
}

/// Looks up a filter bank by name (`haar` or `la8`).
pub fn build_filter(name: &str) -> Result<FilterBank> {
    Ok(FilterBank::new(name.parse()?))
}

/// Returns `J` when `n == 2^J` (with `n >= 1`).
pub fn dyadic_exponent(n: usize) -> Option<usize> {
    if n.is_power_of_two() {
        Some(n.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Default coarsest thresholded level, `J - 4`, clamped to `[0, J-1]`.
pub fn default_j0(levels: usize) -> usize {
    clamp_j0(levels, 4)
}

/// `J - offset` clamped to `[0, J-1]`.
pub fn clamp_j0(levels: usize, offset: usize) -> usize {
    levels.saturating_sub(offset).min(levels.saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    pub coarse: Vec<f64>,
    /// `details[i]` holds level `j0 + i`.
    pub details: Vec<Vec<f64>>,
    pub levels: usize,
    pub j0: usize,
    pub filter: FilterBank,
}

impl WaveletDecomposition {
    /// Total number of samples, `2^J`.
    pub fn len(&self) -> usize {
        1 << self.levels
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn level(&self, j: usize) -> &[f64] {
        &self.details[j - self.j0]
    }

    pub fn level_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.details[j - self.j0]
    }

    pub fn finest(&self) -> &[f64] {
        self.details.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Detail levels `j0..J` paired with their coefficients.
    pub fn detail_levels(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.details.iter().enumerate().map(move |(i, d)| (self.j0 + i, d.as_slice()))
    }

    /// Squared Euclidean norm of all coefficients.
    pub fn energy(&self) -> f64 {
        self.coarse.iter().chain(self.details.iter().flatten()).map(|c| c * c).sum()
    }

    /// Copy with every detail coefficient set to zero.
    pub fn zero_details(&self) -> Self {
        let mut out = self.clone();
        out.details.iter_mut().for_each(|d| d.iter_mut().for_each(|c| *c = 0.0));
        out
    }

    fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.j0 >= self.levels {
            return Err(Error::Structure(format!(
                "j0 = {} must lie in [0, J-1] with J = {}",
                self.j0, self.levels
            )));
        }
        if self.coarse.len() != 1 << self.j0 {
            return Err(Error::Structure(format!(
                "coarse level has {} coefficients, expected {}",
                self.coarse.len(),
                1usize << self.j0
            )));
        }
        if self.details.len() != self.levels - self.j0 {
            return Err(Error::Structure(format!(
                "expected {} detail levels, found {}",
                self.levels - self.j0,
                self.details.len()
            )));
        }
        for (j, d) in self.detail_levels() {
            if d.len() != 1 << j {
                return Err(Error::Structure(format!(
                    "level {j} has {} coefficients, expected {}",
                    d.len(),
                    1usize << j
                )));
            }
        }
        Ok(())
    }
}

/// One analysis step with periodic wrap: `x` (even length `m`) into
/// `approx` and `detail`, each of length `m / 2`.
pub(crate) fn analysis_step(x: &[f64], filter: &FilterBank, approx: &mut [f64], detail: &mut [f64]) {
    let m = x.len();
    let h = filter.scaling_taps();
    let g = filter.wavelet_taps();
    for k in 0..m / 2 {
        let mut a = 0.0;
        let mut d = 0.0;
        let base = 2 * k;
        for (l, (&hl, &gl)) in h.iter().zip(g).enumerate() {
            let v = x[(base + l) % m];
            a += hl * v;
            d += gl * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// Transpose of [`analysis_step`]; writes `2 * approx.len()` samples to `out`.
pub(crate) fn synthesis_step(approx: &[f64], detail: &[f64], filter: &FilterBank, out: &mut [f64]) {
    let m = out.len();
    let h = filter.scaling_taps();
    let g = filter.wavelet_taps();
    out.iter_mut().for_each(|v| *v = 0.0);
    if filter.len() <= m {
        for k in 0..m / 2 {
            let (a, d) = (approx[k], detail[k]);
            let base = 2 * k;
            for (l, (&hl, &gl)) in h.iter().zip(g).enumerate() {
                let idx = base + l;
                let idx = if idx >= m { idx - m } else { idx };
                out[idx] += hl * a + gl * d;
            }
        }
    } else {
        for k in 0..m / 2 {
            let (a, d) = (approx[k], detail[k]);
            for (l, (&hl, &gl)) in h.iter().zip(g).enumerate() {
                out[(2 * k + l) % m] += hl * a + gl * d;
            }
        }
    }
}

/// Forward periodic DWT down to level `j0`.
pub fn dwt(y: &[f64], filter: &FilterBank, j0: usize) -> Result<WaveletDecomposition> {
    let levels = dyadic_exponent(y.len())
        .filter(|&j| j >= 1)
        .ok_or_else(|| Error::Length(format!("signal length {} is not a power of two >= 2", y.len())))?;
    if j0 >= levels {
        return Err(Error::Config(format!("j0 = {j0} must be at most J-1 = {}", levels - 1)));
    }
    let mut details = vec![Vec::new(); levels - j0];
    let mut current = y.to_vec();
    for j in (j0..levels).rev() {
        let half = 1 << j;
        let mut approx = vec![0.0; half];
        let mut detail = vec![0.0; half];
        analysis_step(&current, filter, &mut approx, &mut detail);
        details[j - j0] = detail;
        current = approx;
    }
    Ok(WaveletDecomposition { coarse: current, details, levels, j0, filter: filter.clone() })
}

/// Inverse periodic DWT.
pub fn idwt(d: &WaveletDecomposition) -> Result<Vec<f64>> {
    d.validate()?;
    let mut out = vec![0.0; d.len()];
    let mut scratch = vec![0.0; d.len()];
    inverse_into(&d.coarse, d.details.iter().map(Vec::as_slice), &d.filter, &mut out, &mut scratch);
    Ok(out)
}

/// Allocation-free inverse used on hot paths. `details` must yield levels
/// from coarse to fine; `out` and `scratch` must have the full length.
pub(crate) fn inverse_into<'a>(
    coarse: &[f64],
    details: impl Iterator<Item = &'a [f64]>,
    filter: &FilterBank,
    out: &mut [f64],
    scratch: &mut [f64],
) {
    let mut len = coarse.len();
    scratch[..len].copy_from_slice(coarse);
    for detail in details {
        debug_assert_eq!(detail.len(), len);
        synthesis_step(&scratch[..len], detail, filter, &mut out[..2 * len]);
        len *= 2;
        scratch[..len].copy_from_slice(&out[..len]);
    }
    out[..len].copy_from_slice(&scratch[..len]);
}

/// A series extended by reflection to the next dyadic length.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedSignal {
    pub padded: Vec<f64>,
    pub original_offset: usize,
    pub original_length: usize,
}

impl PaddedSignal {
    /// The portion of `series` (same length as `padded`) that lines up with
    /// the original observations.
    pub fn extract<'a>(&self, series: &'a [f64]) -> &'a [f64] {
        &series[self.original_offset..self.original_offset + self.original_length]
    }
}

/// Mirrors `data` about both ends (the boundary sample is not repeated) up
/// to the smallest power of two at least as long as the input. The extra
/// samples are split evenly, with the odd one going to the end.
pub fn reflect_pad(data: &[f64]) -> Result<PaddedSignal> {
    let len = data.len();
    if len < 2 {
        return Err(Error::Length(format!("reflection padding needs at least 2 samples, got {len}")));
    }
    let target = len.next_power_of_two();
    let offset = (target - len) / 2;
    let period = 2 * (len - 1) as i64;
    let padded = (0..target)
        .map(|i| {
            let mut r = (i as i64 - offset as i64).rem_euclid(period);
            if r >= len as i64 {
                r = period - r;
            }
            data[r as usize]
        })
        .collect();
    Ok(PaddedSignal { padded, original_offset: offset, original_length: len })
}
