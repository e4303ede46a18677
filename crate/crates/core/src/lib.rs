//! Wavelet denoising with thresholds chosen by even/odd cross-validation,
//! either one global term-by-term threshold or level-dependent block
//! thresholds, plus the classical baselines and a simulation harness.

pub mod cv;
pub mod error;
pub mod harness;
pub mod signals;
pub mod threshold;
pub mod wavelet;

pub use error::{Error, Result};
pub use threshold::{Rule, ThresholdProfile};
pub use wavelet::{FilterBank, FilterName, WaveletDecomposition};
