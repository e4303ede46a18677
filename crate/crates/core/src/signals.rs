//! Test functions, noise generation and error metrics for simulations.
//!
//! Functions are sampled at `x_i = i / n` for `i = 1..=n`.
//!
//! | id | definition |
//! |----|------------|
//! | blip | `0.32 + 0.6x + 0.3 exp(-100(x-0.3)^2)` on `[0, 0.8]`, `-0.28 + 0.6x + 0.3 exp(-100(x-1.3)^2)` on `(0.8, 1]` |
//! | blocks | `sum h_j K(x - t_j)`, `K(u) = (1 + sgn u) / 2` |
//! | bumps | `sum h_j K((x - t_j) / w_j)`, `K(u) = (1 + abs(u))^-4` |
//! | corner | `623.87 x^3 (1 - 2x)` on `[0, 0.5]`, `187.161 (0.125 - x^3) x^4` on `(0.5, 0.8]`, `3708.470441 (x - 1)^3` on `(0.8, 1]` |
//! | doppler | `sqrt(x(1-x)) sin(2.1 pi / (x + 0.05))` |
//! | heavisine | `4 sin(4 pi x) - sgn(x - 0.3) - sgn(0.72 - x)` |
//! | spikes | `15.6676 (e^(-500(x-0.23)^2) + 2e^(-2000(x-0.33)^2) + 4e^(-8000(x-0.47)^2) + 3e^(-16000(x-0.69)^2) + e^(-32000(x-0.83)^2))` |
//! | wave | `0.5 + 0.2 cos(4 pi x) + 0.1 cos(24 pi x)` |
//!
//! Blocks and bumps use the Donoho-Johnstone jump locations `t_j` and
//! heights `h_j` (and widths `w_j` for bumps) without rescaling.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, LogNormal, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DJ_LOCATIONS: [f64; 11] = [0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81];
const BLOCKS_HEIGHTS: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const BUMPS_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMPS_WIDTHS: [f64; 11] = [0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    Blip,
    Blocks,
    Bumps,
    Corner,
    Doppler,
    Heavisine,
    Spikes,
    Wave,
}

impl TestFunction {
    pub const ALL: [TestFunction; 8] = [
        TestFunction::Blip,
        TestFunction::Blocks,
        TestFunction::Bumps,
        TestFunction::Corner,
        TestFunction::Doppler,
        TestFunction::Heavisine,
        TestFunction::Spikes,
        TestFunction::Wave,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TestFunction::Blip => "blip",
            TestFunction::Blocks => "blocks",
            TestFunction::Bumps => "bumps",
            TestFunction::Corner => "corner",
            TestFunction::Doppler => "doppler",
            TestFunction::Heavisine => "heavisine",
            TestFunction::Spikes => "spikes",
            TestFunction::Wave => "wave",
        }
    }

    /// Value at a single point of `[0, 1]`.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            TestFunction::Blip => {
                if x <= 0.8 {
                    0.32 + 0.6 * x + 0.3 * (-100.0 * (x - 0.3).powi(2)).exp()
                } else {
                    -0.28 + 0.6 * x + 0.3 * (-100.0 * (x - 1.3).powi(2)).exp()
                }
            }
            TestFunction::Blocks => DJ_LOCATIONS
                .iter()
                .zip(BLOCKS_HEIGHTS)
                .map(|(&t, h)| h * 0.5 * (1.0 + sgn(x - t)))
                .sum(),
            TestFunction::Bumps => DJ_LOCATIONS
                .iter()
                .zip(BUMPS_HEIGHTS)
                .zip(BUMPS_WIDTHS)
                .map(|((&t, h), w)| h * (1.0 + ((x - t) / w).abs()).powi(-4))
                .sum(),
            TestFunction::Corner => {
                if x <= 0.5 {
                    623.87 * x.powi(3) * (1.0 - 2.0 * x)
                } else if x <= 0.8 {
                    187.161 * (0.125 - x.powi(3)) * x.powi(4)
                } else {
                    3708.470441 * (x - 1.0).powi(3)
                }
            }
            TestFunction::Doppler => {
                let eps = 0.05;
                (x * (1.0 - x)).sqrt() * (2.0 * PI * (1.0 + eps) / (x + eps)).sin()
            }
            TestFunction::Heavisine => 4.0 * (4.0 * PI * x).sin() - sgn(x - 0.3) - sgn(0.72 - x),
            TestFunction::Spikes => {
                15.6676
                    * ((-500.0 * (x - 0.23).powi(2)).exp()
                        + 2.0 * (-2000.0 * (x - 0.33).powi(2)).exp()
                        + 4.0 * (-8000.0 * (x - 0.47).powi(2)).exp()
                        + 3.0 * (-16000.0 * (x - 0.69).powi(2)).exp()
                        + (-32000.0 * (x - 0.83).powi(2)).exp())
            }
            TestFunction::Wave => 0.5 + 0.2 * (4.0 * PI * x).cos() + 0.1 * (24.0 * PI * x).cos(),
        }
    }
}

/// Sign with `sgn(0) = 0`.
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        TestFunction::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown test function '{s}'")))
    }
}

/// `id` sampled at `i / n`, `i = 1..=n`.
pub fn test_function(id: TestFunction, n: usize) -> Result<Vec<f64>> {
    if n < 8 {
        return Err(Error::Length(format!("test functions need n >= 8, got {n}")));
    }
    Ok((1..=n).map(|i| id.eval(i as f64 / n as f64)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFamily {
    Normal,
    T3,
    Lognormal,
    Cauchy,
}

impl NoiseFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseFamily::Normal => "normal",
            NoiseFamily::T3 => "t3",
            NoiseFamily::Lognormal => "lognormal",
            NoiseFamily::Cauchy => "cauchy",
        }
    }

    pub fn has_finite_variance(self) -> bool {
        !matches!(self, NoiseFamily::Cauchy)
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(NoiseFamily::Normal),
            "t3" => Ok(NoiseFamily::T3),
            "lognormal" => Ok(NoiseFamily::Lognormal),
            "cauchy" => Ok(NoiseFamily::Cauchy),
            other => Err(Error::Config(format!("unknown noise family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub family: NoiseFamily,
    pub snr: Option<f64>,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match (self.family.has_finite_variance(), self.snr) {
            (false, Some(_)) => Err(Error::Config(format!("SNR is undefined for {} noise", self.family))),
            (_, Some(snr)) if !(snr > 0.0) => Err(Error::Config(format!("SNR must be positive, got {snr}"))),
            _ => Ok(()),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// `n` iid draws. Lognormal draws are centred by subtracting `e^(1/2)`;
/// no scaling is applied to any family.
pub fn sample_noise<R: Rng + ?Sized>(family: NoiseFamily, n: usize, rng: &mut R) -> Vec<f64> {
    match family {
        NoiseFamily::Normal => (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        NoiseFamily::T3 => {
            let t = StudentT::new(3.0).expect("valid degrees of freedom");
            (0..n).map(|_| t.sample(rng)).collect()
        }
        NoiseFamily::Lognormal => {
            let ln = LogNormal::new(0.0, 1.0).expect("valid lognormal");
            let mean = 0.5f64.exp();
            (0..n).map(|_| ln.sample(rng) - mean).collect()
        }
        NoiseFamily::Cauchy => {
            let c = Cauchy::new(0.0, 1.0).expect("valid cauchy");
            (0..n).map(|_| c.sample(rng)).collect()
        }
    }
}

/// Population standard deviation.
pub fn population_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `f + noise * sd(f) / (snr * sd(noise))`, so the realized ratio of
/// standard deviations equals `snr`.
pub fn scale_to_snr(f: &[f64], noise: &[f64], snr: f64) -> Result<Vec<f64>> {
    if f.len() != noise.len() {
        return Err(Error::Usage(format!("signal has {} samples, noise has {}", f.len(), noise.len())));
    }
    if !(snr > 0.0) {
        return Err(Error::Config(format!("SNR must be positive, got {snr}")));
    }
    let sd_f = population_sd(f);
    let sd_e = population_sd(noise);
    if !(sd_f > 0.0) || !(sd_e > 0.0) {
        return Err(Error::Config("zero-variance signal or noise cannot be scaled to an SNR".into()));
    }
    let k = sd_f / (snr * sd_e);
    Ok(f.iter().zip(noise).map(|(s, e)| s + k * e).collect())
}

pub fn mse(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() || truth.is_empty() {
        return Err(Error::Usage(format!(
            "mse needs equal nonempty lengths, got {} and {}",
            estimate.len(),
            truth.len()
        )));
    }
    Ok(estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / truth.len() as f64)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for repetition `rep` of the stream identified by `key`.
/// Each `(master, key)` pair selects a seed and `rep` selects a ChaCha
/// stream, so draws do not depend on execution order.
pub fn substream(master: u64, key: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master ^ splitmix64(key)));
    rng.set_stream(rep);
    rng
}

/// FNV-1a, used for stable cell keys.
pub fn stable_hash(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}
