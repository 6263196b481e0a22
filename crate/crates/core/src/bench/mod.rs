//! Simulation study: test functions, SNR protocol, AMSE and the replication
//! harness, plus the joint-distribution (Geweke) check of the sampler.

mod geweke;
mod signals;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use geweke::{geweke_harness, GewekeConfig, GewekeReport, GewekeStat};
pub use signals::{make_test_signal, rescale_snr, sample_sd, sample_signal, TestSignal};

use crate::baselines::{ceb_posterior_mean, cmws_hard, ThresholdRule};
use crate::distributions::{chain_stream, noise_stream, sample_normal, RngStream};
use crate::sampler::{denoise_with_rng, SamplerConfig};
use crate::transform::{self, default_j0, load_filters};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "cgsws")]
    Cgsws,
    #[serde(rename = "cmws-hard")]
    CmwsHard,
    #[serde(rename = "ceb")]
    Ceb,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Cgsws => "cgsws",
            Method::CmwsHard => "cmws-hard",
            Method::Ceb => "ceb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Cgsws, Method::CmwsHard, Method::Ceb]
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}' (expected cgsws, cmws-hard or ceb)")))
    }
}

/// Mean squared error `1/n Σ (x_i - y_i)²`.
pub fn mse(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() || truth.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "estimate has {} samples, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    Ok(estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / truth.len() as f64)
}

/// `1/(M n) Σ_k Σ_i (f̂_k(t_i) - f(t_i))²`.
pub fn amse(estimates: &[Vec<f64>], truth: &[f64]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::ShapeMismatch("no estimates".into()));
    }
    let total = estimates.iter().map(|e| mse(e, truth)).sum::<Result<f64>>()?;
    Ok(total / estimates.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub signal: TestSignal,
    pub n: usize,
    pub snr: f64,
    pub reps: usize,
    pub method: Method,
    pub seed: u64,
    pub sampler: SamplerConfig,
    /// Worker threads; `None` uses the global rayon pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl BenchmarkSpec {
    /// Desk-scale study: 20 replications of 4000 sweeps with 2000 burn-in.
    pub fn desk(signal: TestSignal, n: usize, snr: f64, seed: u64) -> Self {
        BenchmarkSpec {
            signal,
            n,
            snr,
            reps: 20,
            method: Method::Cgsws,
            seed,
            sampler: SamplerConfig {
                iters: 4000,
                burnin: 2000,
                seed,
                ..SamplerConfig::default()
            },
            workers: None,
        }
    }

    /// Full-scale study: 100 replications of 10,000 sweeps with 5000 burn-in.
    pub fn full(signal: TestSignal, n: usize, snr: f64, seed: u64) -> Self {
        let mut spec = Self::desk(signal, n, snr, seed);
        spec.reps = 100;
        spec.sampler.iters = 10_000;
        spec.sampler.burnin = 5000;
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.n));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter("at least one replication is required".into()));
        }
        if !(self.snr > 0.0) || !self.snr.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "snr must be positive, got {}",
                self.snr
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("worker count must be positive".into()));
        }
        self.sampler.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub spec: BenchmarkSpec,
    pub amse: f64,
    /// MSE of replication `r` at index `r`.
    pub mse: Vec<f64>,
    pub wall_time_secs: f64,
}

/// Output of one denoising run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub signal: Vec<f64>,
    pub imag_residual: f64,
    pub j0: usize,
    /// Posterior mean of `σ²` for the sampler, the MAD estimate otherwise.
    pub sigma2: f64,
    /// Per-level posterior mean of `ε_j` (sampler) or fitted `ε̂_j` (CEB).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
}

/// Denoises `y` with `method`; `rng` drives the sampler only.
pub fn estimate_full(y: &[f64], method: Method, config: &SamplerConfig, rng: &mut RngStream) -> Result<Estimate> {
    if method == Method::Cgsws {
        let out = denoise_with_rng(y, config, rng)?;
        return Ok(Estimate {
            signal: out.estimate,
            imag_residual: out.imag_residual,
            j0: out.j0,
            sigma2: out.summary.sigma2_mean,
            eps: Some(out.summary.eps_mean),
        });
    }
    let filters = load_filters(&config.wavelet)?;
    let n = y.len();
    let j0 = config.j0.unwrap_or_else(|| default_j0(n));
    let tree = transform::forward(y, j0, &filters)?;
    let noise = transform::noise_scale(n, j0, &filters)?;
    let sigma2 = crate::sampler::estimate_sigma2_mad(&tree)?.max(f64::MIN_POSITIVE);
    let (shrunk, eps) = match method {
        Method::CmwsHard => (cmws_hard(&tree, sigma2, &noise, &ThresholdRule::universal(n))?, None),
        Method::Ceb => {
            let (tree, params) = ceb_posterior_mean(&tree, sigma2, &noise)?;
            (tree, Some(params.iter().map(|p| p.eps).collect()))
        }
        Method::Cgsws => unreachable!(),
    };
    let rec = transform::inverse(&shrunk, &filters)?;
    Ok(Estimate {
        signal: rec.signal,
        imag_residual: rec.imag_residual,
        j0,
        sigma2,
        eps,
    })
}

pub fn estimate(y: &[f64], method: Method, config: &SamplerConfig, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(estimate_full(y, method, config, rng)?.signal)
}

/// Replication `r`: unit-variance noise from noise stream `r`, sampler on
/// chain stream `r`, both under the master seed.
pub fn run_replication(spec: &BenchmarkSpec, truth: &[f64], r: usize) -> Result<f64> {
    let mut noise_rng = RngStream::new(spec.seed, noise_stream(r as u64));
    let y: Vec<f64> = truth.iter().map(|f| f + sample_normal(&mut noise_rng)).collect();
    let mut chain_rng = RngStream::new(spec.seed, chain_stream(r as u64));
    let est = estimate(&y, spec.method, &spec.sampler, &mut chain_rng)?;
    mse(&est, truth)
}

pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkResult> {
    spec.validate()?;
    let start = Instant::now();
    let truth = rescale_snr(&sample_signal(spec.signal, spec.n)?, spec.snr)?;
    let run = || -> Result<Vec<f64>> {
        (0..spec.reps)
            .into_par_iter()
            .map(|r| run_replication(spec, &truth, r))
            .collect()
    };
    let mse = match spec.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let amse = mse.iter().sum::<f64>() / mse.len() as f64;
    log::info!(
        "{} n={} snr={} {}: AMSE {amse:.4} over {} replications",
        spec.signal,
        spec.n,
        spec.snr,
        spec.method,
        spec.reps
    );
    Ok(BenchmarkResult {
        spec: spec.clone(),
        amse,
        mse,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

pub const CSV_HEADER: &str = "signal,n,snr,method,iters,burnin,seed,rep,mse,amse";

/// Header plus one row per replication.
pub fn write_csv<W: Write>(result: &BenchmarkResult, mut out: W) -> std::io::Result<()> {
    let s = &result.spec;
    writeln!(out, "{CSV_HEADER}")?;
    for (r, m) in result.mse.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.17e},{:.17e}",
            s.signal, s.n, s.snr, s.method, s.sampler.iters, s.sampler.burnin, s.seed, r, m, result.amse
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(result: &BenchmarkResult, out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(out, result).map_err(std::io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amse_hand_values() {
        let truth = vec![0.0, 1.0, 2.0, 3.0];
        assert_eq!(amse(std::slice::from_ref(&truth), &truth).unwrap(), 0.0);
        let shifted: Vec<f64> = truth.iter().map(|v| v + 1.0).collect();
        assert_eq!(amse(&[shifted], &truth).unwrap(), 1.0);
        // (1 + 0 + 4 + 0)/4 and (0 + 9 + 0 + 1)/4, averaged
        let a = vec![1.0, 1.0, 4.0, 3.0];
        let b = vec![0.0, 4.0, 2.0, 2.0];
        assert!((amse(&[a, b], &truth).unwrap() - 1.875).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch() {
        assert!(amse(&[vec![0.0; 3]], &[0.0; 4]).is_err());
        assert!(amse(&[], &[0.0; 4]).is_err());
    }

    #[test]
    fn methods_parse() {
        assert_eq!("cmws-hard".parse::<Method>().unwrap(), Method::CmwsHard);
        assert!("x".parse::<Method>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut spec = BenchmarkSpec::desk(TestSignal::Blocks, 100, 3.0, 0);
        assert!(spec.validate().is_err());
        spec.n = 64;
        spec.reps = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn baselines_beat_identity() {
        for method in [Method::CmwsHard, Method::Ceb] {
            let spec = BenchmarkSpec {
                method,
                reps: 3,
                ..BenchmarkSpec::desk(TestSignal::Heavisine, 256, 7.0, 1)
            };
            let res = run_benchmark(&spec).unwrap();
            assert!(res.amse < 1.0, "{method}: {}", res.amse);
        }
    }
}
