//! The Donoho–Johnstone test functions and the SNR protocol.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const BREAKS: [f64; 11] = [0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81];
const BLOCKS_HEIGHTS: [f64; 11] = [4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2];
const BUMPS_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMPS_WIDTHS: [f64; 11] = [0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestSignal {
    Blocks,
    Bumps,
    Doppler,
    Heavisine,
}

impl TestSignal {
    pub const ALL: [TestSignal; 4] = [
        TestSignal::Blocks,
        TestSignal::Bumps,
        TestSignal::Doppler,
        TestSignal::Heavisine,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TestSignal::Blocks => "blocks",
            TestSignal::Bumps => "bumps",
            TestSignal::Doppler => "doppler",
            TestSignal::Heavisine => "heavisine",
        }
    }

    /// Value at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            // right-continuous steps: the jump at t_j is already taken at t = t_j
            TestSignal::Blocks => BREAKS
                .iter()
                .zip(BLOCKS_HEIGHTS)
                .filter(|(&tj, _)| t >= tj)
                .map(|(_, h)| h)
                .sum(),
            TestSignal::Bumps => BREAKS
                .iter()
                .zip(BUMPS_HEIGHTS.iter().zip(BUMPS_WIDTHS))
                .map(|(&tj, (&h, w))| h * (1.0 + ((t - tj) / w).abs()).powi(-4))
                .sum(),
            TestSignal::Doppler => (t * (1.0 - t)).max(0.0).sqrt() * (2.0 * PI * 1.05 / (t + 0.05)).sin(),
            TestSignal::Heavisine => 4.0 * (4.0 * PI * t).sin() - sign(t - 0.3) - sign(0.72 - t),
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl fmt::Display for TestSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestSignal::ALL
            .into_iter()
            .find(|sig| sig.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown test signal '{s}' (expected one of blocks, bumps, doppler, heavisine)"
                ))
            })
    }
}

/// Samples `name` at `t_i = i/n`, `i = 0, …, n-1`.
pub fn make_test_signal(name: &str, n: usize) -> Result<Vec<f64>> {
    let signal: TestSignal = name.parse()?;
    sample_signal(signal, n)
}

pub fn sample_signal(signal: TestSignal, n: usize) -> Result<Vec<f64>> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "signal length must be at least 8, got {n}"
        )));
    }
    Ok((0..n).map(|i| signal.eval(i as f64 / n as f64)).collect())
}

/// Sample standard deviation (divisor `n - 1`).
pub fn sample_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Scales `f` so that its sample standard deviation is `snr`; with unit noise
/// variance this is the signal-to-noise ratio.
pub fn rescale_snr(f: &[f64], snr: f64) -> Result<Vec<f64>> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::InvalidParameter(format!("snr must be positive, got {snr}")));
    }
    if f.len() < 2 {
        return Err(Error::InvalidParameter("signal needs at least two samples".into()));
    }
    let sd = sample_sd(f);
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::InvalidParameter("cannot rescale a constant signal".into()));
    }
    Ok(f.iter().map(|v| v * snr / sd).collect())
}
