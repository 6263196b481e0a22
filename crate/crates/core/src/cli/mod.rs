//! The `cgsws` command-line front end.
//!
//! Exit codes: `0` success, `1` a self-check failed, `2` usage or input error.
//! Every command accepts `--config FILE` with `key = value` lines whose keys
//! are the long flag names; flags given on the command line take precedence.
//! The default seed is read from `CGSWS_SEED` when `--seed` is absent.

mod io;
mod selfcheck;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use io::{
    pad_symmetric, parse_coefficients, parse_config, parse_signal, read_coefficients, read_signal, write_coefficients,
    write_signal, COEFF_HEADER,
};
pub use selfcheck::{run_selfcheck, CheckLevel, CheckResult, SelfcheckReport};

use crate::bench::{self, estimate_full, BenchmarkSpec, Method, TestSignal};
use crate::distributions::{chain_stream, RngStream};
use crate::sampler::SamplerConfig;
use crate::transform::{self, default_j0, load_filters, SUPPORTED_FILTERS};
use crate::Error;

pub const SEED_ENV: &str = "CGSWS_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cgsws",
    version,
    about = "Bayesian wavelet denoising with complex Daubechies wavelets"
)]
pub struct Cli {
    /// key=value file with defaults for the command's flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Denoise a single-column CSV signal.
    Denoise(DenoiseArgs),
    /// Run a replicated simulation study on a test function.
    Bench(BenchArgs),
    /// Forward or inverse transform to and from `j,k,re,im` rows.
    Transform(TransformArgs),
    /// Run the built-in correctness checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
struct SamplerArgs {
    /// Filter name (default scd3).
    #[arg(long)]
    wavelet: Option<String>,
    /// Gibbs sweeps including burn-in.
    #[arg(long)]
    iters: Option<usize>,
    /// Sweeps discarded before averaging.
    #[arg(long)]
    burnin: Option<usize>,
    /// Coarsest level; defaults to floor(log2(ln n) + 1).
    #[arg(long)]
    j0: Option<usize>,
    /// Master seed; falls back to CGSWS_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// cgsws, cmws-hard or ceb.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    /// Single-column CSV, optional header line.
    input: PathBuf,
    /// Output CSV; defaults to `<input>.denoised.csv`. The JSON sidecar is
    /// written next to it.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Reflect the signal up to the next power of two and trim the output.
    #[arg(long)]
    pad: bool,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// blocks, bumps, doppler or heavisine.
    #[arg(long)]
    signal: Option<String>,
    /// Signal length, a power of two.
    #[arg(long)]
    n: Option<usize>,
    /// Signal standard deviation over the unit noise standard deviation.
    #[arg(long)]
    snr: Option<f64>,
    /// Monte-Carlo replications.
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads for replications.
    #[arg(long)]
    workers: Option<usize>,
    /// Output prefix: writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Study defaults: `desk` (20 reps, 4000/2000 sweeps) or `full`
    /// (100 reps, 10000/5000). Explicit flags still override.
    #[arg(long)]
    scale: Option<String>,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// Signal CSV (forward) or coefficient CSV (inverse).
    input: PathBuf,
    /// Filter name (default scd3).
    #[arg(long)]
    wavelet: Option<String>,
    /// Coarsest level for the forward direction.
    #[arg(long)]
    j0: Option<usize>,
    /// `forward` (signal to coefficients) or `inverse`.
    #[arg(long)]
    direction: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    /// `quick` or `full`.
    #[arg(long)]
    level: Option<String>,
}

/// A failed command: message for stderr and the exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::usage(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::usage(format!("cannot write {}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Flag values backed by the config file.
struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let file = match path {
            Some(p) => io::read_config(p)?,
            None => BTreeMap::new(),
        };
        Ok(Settings { file })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key '{key}' = '{raw}': {e}"))),
            None => Ok(None),
        }
    }

    fn seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = self.get(flag, "seed")? {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(raw) => raw
                .trim()
                .parse()
                .map_err(|e| CliError::usage(format!("{SEED_ENV}='{raw}': {e}"))),
            Err(_) => Ok(0),
        }
    }

    fn sampler(&self, args: &SamplerArgs, defaults: SamplerConfig) -> CliResult<(SamplerConfig, Method)> {
        let config = SamplerConfig {
            iters: self.get(args.iters, "iters")?.unwrap_or(defaults.iters),
            burnin: self.get(args.burnin, "burnin")?.unwrap_or(defaults.burnin),
            seed: self.seed(args.seed)?,
            j0: self.get(args.j0, "j0")?.or(defaults.j0),
            wavelet: self.get(args.wavelet.clone(), "wavelet")?.unwrap_or(defaults.wavelet),
            a: self.get(None, "a")?.unwrap_or(defaults.a),
            w: self.get(None, "w")?.unwrap_or(defaults.w),
            reg: self.get(None, "reg")?.unwrap_or(defaults.reg),
            trace_thin: self.get(None, "trace-thin")?.or(defaults.trace_thin),
        };
        config.validate()?;
        let method: Method = self
            .get(args.method.clone(), "method")?
            .unwrap_or_else(|| "cgsws".to_string())
            .parse()?;
        Ok((config, method))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();

    let result = Settings::load(cli.config.as_deref()).and_then(|settings| match &cli.command {
        Command::Denoise(args) => cmd_denoise(args, &settings),
        Command::Bench(args) => cmd_bench(args, &settings),
        Command::Transform(args) => cmd_transform(args, &settings),
        Command::Selfcheck(args) => cmd_selfcheck(args, &settings),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[derive(Serialize)]
struct DenoiseSidecar<'a> {
    input: &'a Path,
    output: &'a Path,
    method: Method,
    config: &'a SamplerConfig,
    n: usize,
    padded_n: usize,
    j0: usize,
    sigma2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_mean: Option<&'a [f64]>,
    imag_residual: f64,
    wall_time_secs: f64,
}

fn default_output(input: &Path) -> PathBuf {
    let mut name = input.file_name().map(OsString::from).unwrap_or_else(|| "signal".into());
    name.push(".denoised.csv");
    input.with_file_name(name)
}

fn cmd_denoise(args: &DenoiseArgs, settings: &Settings) -> CliResult<i32> {
    let start = Instant::now();
    let (config, method) = settings.sampler(&args.sampler, SamplerConfig::default())?;
    let pad = args.pad || settings.get(None::<bool>, "pad")?.unwrap_or(false);
    let signal = read_signal(&args.input)?;
    let n = signal.len();
    let (work, original) = if n.is_power_of_two() && n >= 8 {
        (signal, n)
    } else if pad {
        pad_symmetric(&signal)
    } else {
        return Err(CliError::usage(format!(
            "{}: length {n} is not a power of two (at least 8); use --pad to extend it",
            args.input.display()
        )));
    };

    let mut rng = RngStream::new(config.seed, chain_stream(0));
    let est = estimate_full(&work, method, &config, &mut rng)?;
    let output = match &args.output {
        Some(p) => p.clone(),
        None => settings
            .get(None::<PathBuf>, "output")?
            .unwrap_or_else(|| default_output(&args.input)),
    };
    let file = File::create(&output).map_err(|e| io_error(&output, e))?;
    let mut w = BufWriter::new(file);
    write_signal(&est.signal[..original], &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| io_error(&output, e))?;

    let sidecar_path = output.with_extension("json");
    let sidecar = DenoiseSidecar {
        input: &args.input,
        output: &output,
        method,
        config: &config,
        n: original,
        padded_n: work.len(),
        j0: est.j0,
        sigma2: est.sigma2,
        eps_mean: est.eps.as_deref(),
        imag_residual: est.imag_residual,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    let file = File::create(&sidecar_path).map_err(|e| io_error(&sidecar_path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &sidecar)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", sidecar_path.display())))?;
    println!(
        "denoised {} samples with {method} in {:.1}s -> {}",
        original,
        sidecar.wall_time_secs,
        output.display()
    );
    Ok(EXIT_OK)
}

fn cmd_bench(args: &BenchArgs, settings: &Settings) -> CliResult<i32> {
    let signal: TestSignal = settings
        .get(args.signal.clone(), "signal")?
        .unwrap_or_else(|| "doppler".into())
        .parse()?;
    let n = settings.get(args.n, "n")?.unwrap_or(256);
    let snr = settings.get(args.snr, "snr")?.unwrap_or(5.0);
    let base = match settings.get(args.scale.clone(), "scale")?.as_deref() {
        None | Some("desk") => BenchmarkSpec::desk(signal, n, snr, 0),
        Some("full") => BenchmarkSpec::full(signal, n, snr, 0),
        Some(other) => return Err(CliError::usage(format!("unknown scale '{other}' (desk or full)"))),
    };
    let (sampler, method) = settings.sampler(&args.sampler, base.sampler.clone())?;
    let spec = BenchmarkSpec {
        reps: settings.get(args.reps, "reps")?.unwrap_or(base.reps),
        workers: settings.get(args.workers, "workers")?,
        method,
        seed: sampler.seed,
        sampler,
        ..base
    };
    let result = bench::run_benchmark(&spec)?;
    if let Some(prefix) = settings.get(args.out.clone(), "out")? {
        let csv = prefix.with_extension("csv");
        let json = prefix.with_extension("json");
        let file = File::create(&csv).map_err(|e| io_error(&csv, e))?;
        bench::write_csv(&result, BufWriter::new(file)).map_err(|e| io_error(&csv, e))?;
        let file = File::create(&json).map_err(|e| io_error(&json, e))?;
        bench::write_json(&result, BufWriter::new(file)).map_err(|e| io_error(&json, e))?;
    }
    println!(
        "{} n={} snr={} method={} reps={} AMSE={:.6}",
        spec.signal, spec.n, spec.snr, spec.method, spec.reps, result.amse
    );
    Ok(EXIT_OK)
}

fn cmd_transform(args: &TransformArgs, settings: &Settings) -> CliResult<i32> {
    let wavelet = settings
        .get(args.wavelet.clone(), "wavelet")?
        .unwrap_or_else(|| "scd3".into());
    let filters = load_filters(&wavelet)?;
    let direction = settings
        .get(args.direction.clone(), "direction")?
        .unwrap_or_else(|| "forward".into());
    let mut buf = Vec::new();
    match direction.as_str() {
        "forward" => {
            let x = read_signal(&args.input)?;
            let j0 = settings.get(args.j0, "j0")?.unwrap_or_else(|| default_j0(x.len()));
            let tree = transform::forward(&x, j0, &filters)?;
            write_coefficients(&tree, &mut buf).expect("writing to memory");
        }
        "inverse" => {
            let tree = read_coefficients(&args.input)?;
            let rec = transform::inverse(&tree, &filters)?;
            if rec.imag_residual > 1e-8 {
                log::warn!("reconstruction has imaginary residual {:.3e}", rec.imag_residual);
            }
            write_signal(&rec.signal, &mut buf).expect("writing to memory");
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown direction '{other}' (forward or inverse)"
            )))
        }
    }
    match settings.get(args.output.clone(), "output")? {
        Some(path) => std::fs::write(&path, &buf).map_err(|e| io_error(&path, e))?,
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| CliError::usage(format!("cannot write to stdout: {e}")))?,
    }
    Ok(EXIT_OK)
}

fn cmd_selfcheck(args: &SelfcheckArgs, settings: &Settings) -> CliResult<i32> {
    let level: CheckLevel = settings
        .get(args.level.clone(), "level")?
        .unwrap_or_else(|| "quick".into())
        .parse()?;
    let filters = SUPPORTED_FILTERS
        .iter()
        .map(|name| load_filters(name))
        .collect::<crate::Result<Vec<_>>>()?;
    let report = run_selfcheck(level, &filters);
    println!("{report}");
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}
