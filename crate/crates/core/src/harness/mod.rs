//! Simulation study, result tables and file denoising.

pub mod config;
pub mod denoise_file;
pub mod method;
pub mod simulate;
pub mod stats;
pub mod table;

pub use config::SimulationConfig;
pub use denoise_file::{denoise_file, denoise_series, parse_series, Diagnostics, FileDenoised};
pub use method::{denoise, DenoiseOptions, Denoised, LevelThreshold, Method, MethodReport};
pub use simulate::{cells, lookup, noisy_realization, run_simulation, Cell};
pub use table::{emit_table, parse_table, CellError, ResultRow, ResultTable, TableFormat};
