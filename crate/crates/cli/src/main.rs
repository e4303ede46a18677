use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use wavecv_core::harness::table::sig6;
use wavecv_core::harness::{denoise_file, emit_table, run_simulation, DenoiseOptions, Method, SimulationConfig, TableFormat};
use wavecv_core::signals::{sample_noise, scale_to_snr, test_function, NoiseFamily, NoiseSpec, TestFunction};
use wavecv_core::{FilterName, Rule};

#[derive(Parser)]
#[command(name = "wavecv", version, about = "Cross-validated wavelet thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo comparison described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// csv or markdown
        #[arg(long, default_value = "csv")]
        format: TableFormat,
        /// Worker threads (default: all cores). Does not affect the output.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Denoise a one-column series of any length >= 16.
    Denoise {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "la8")]
        filter: FilterName,
        #[arg(long, default_value = "hard")]
        rule: Rule,
        #[arg(long = "j0-offset", default_value_t = 4)]
        j0_offset: usize,
        #[arg(long)]
        out: PathBuf,
        /// Write threshold and retention details as JSON.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Write a test function, optionally with noise, as CSV (x, f, y).
    GenSignals {
        #[arg(long)]
        function: TestFunction,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        noise: Option<NoiseFamily>,
        #[arg(long, default_value_t = 5.0)]
        snr: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn simulate(config: PathBuf, out: PathBuf, format: TableFormat, threads: Option<usize>) -> Result<()> {
    let text = std::fs::read_to_string(&config).with_context(|| format!("cannot read {}", config.display()))?;
    let cfg = SimulationConfig::parse(&text).with_context(|| format!("in {}", config.display()))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    let table = pool.install(|| run_simulation(&cfg))?;
    for e in &table.errors {
        eprintln!("warning: skipped cell {}: {}", e.cell, e.message);
    }
    if table.rows.is_empty() {
        bail!("no cell could be simulated");
    }
    let mut w = create(&out)?;
    emit_table(&table, format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn gen_signals(
    function: TestFunction,
    n: usize,
    noise: Option<NoiseFamily>,
    snr: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let f = test_function(function, n)?;
    let y = match noise {
        Some(family) => {
            let spec = NoiseSpec { family, snr: Some(snr), seed };
            spec.validate()?;
            scale_to_snr(&f, &sample_noise(family, n, &mut spec.rng()), snr)?
        }
        None => f.clone(),
    };
    let mut w: Box<dyn Write> = match &out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    writeln!(w, "x,f,y")?;
    for (i, (fi, yi)) in f.iter().zip(&y).enumerate() {
        writeln!(w, "{},{},{}", sig6((i + 1) as f64 / n as f64), fi, yi)?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, format, threads } => simulate(config, out, format, threads),
        Command::Denoise { input, method, filter, rule, j0_offset, out, diagnostics } => {
            let opts = DenoiseOptions { filter, rule, j0_offset, ..DenoiseOptions::default() };
            let res = denoise_file(&input, method, &opts).with_context(|| format!("denoising {}", input.display()))?;
            let mut w = create(&out)?;
            writeln!(w, "estimate")?;
            for v in &res.estimate {
                writeln!(w, "{v}")?;
            }
            w.flush()?;
            if let Some(path) = diagnostics {
                let mut d = create(&path)?;
                serde_json::to_writer_pretty(&mut d, &res.diagnostics)?;
                writeln!(d)?;
                d.flush()?;
            }
            Ok(())
        }
        Command::GenSignals { function, n, noise, snr, seed, out } => gen_signals(function, n, noise, snr, seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
