//! Built-in correctness checks run by `cgsws selfcheck`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::{geweke_harness, run_benchmark, BenchmarkSpec, GewekeConfig, TestSignal};
use crate::distributions::{
    sample_beta, sample_gamma, sample_gig, sample_inv_gamma, sample_inv_wishart, GigParams, InvGammaParams,
    InvWishartParams, RngStream,
};
use crate::linalg::Sym2;
use crate::transform::{build_matrix, forward, inverse, noise_scale, ComplexFilterPair};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckLevel {
    Quick,
    Full,
}

impl FromStr for CheckLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quick" => Ok(CheckLevel::Quick),
            "full" => Ok(CheckLevel::Full),
            _ => Err(Error::InvalidParameter(format!(
                "unknown check level '{s}' (quick or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub level: CheckLevel,
    pub checks: Vec<CheckResult>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SelfcheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{tag}] {} ({:.2}s): {}", c.name, c.seconds, c.detail)?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

struct Runner {
    checks: Vec<CheckResult>,
}

impl Runner {
    fn check(&mut self, name: impl Into<String>, f: impl FnOnce() -> std::result::Result<String, String>) {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
}

fn within(name: &str, value: f64, tol: f64) -> std::result::Result<String, String> {
    if value.is_finite() && value <= tol {
        Ok(format!("{name} = {value:.3e} <= {tol:.0e}"))
    } else {
        Err(format!("{name} = {value:.3e} exceeds {tol:.0e}"))
    }
}

/// Mean of `draws` samples against `mean`, judged in standard errors.
fn moment_check(
    draws: usize,
    mean: f64,
    sd: f64,
    mut sample: impl FnMut() -> f64,
) -> std::result::Result<String, String> {
    let total: f64 = (0..draws).map(|_| sample()).sum();
    let z = (total / draws as f64 - mean) / (sd / (draws as f64).sqrt());
    if z.abs() < 5.0 {
        Ok(format!("sample mean z = {z:.2}"))
    } else {
        Err(format!("sample mean z = {z:.2} against mean {mean}"))
    }
}

fn pseudo_signal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed, 7);
    (0..n).map(|_| crate::distributions::sample_normal(&mut rng)).collect()
}

/// Runs the checks against `filters`; the first filter drives the transform
/// checks.
pub fn run_selfcheck(level: CheckLevel, filters: &[ComplexFilterPair]) -> SelfcheckReport {
    let mut r = Runner { checks: Vec::new() };
    for f in filters {
        r.check(format!("filter {}", f.name()), || {
            f.validate()
                .map(|_| "invariants hold".to_string())
                .map_err(|e| e.to_string())
        });
    }
    if let Some(f) = filters.first() {
        r.check("unitarity n=64", || {
            let w = build_matrix(64, 2, f).map_err(|e| e.to_string())?;
            within("max |W W^H - I|", w.unitarity_error(), 1e-9)
        });
        r.check("round trip n=256", || {
            let mut worst: f64 = 0.0;
            for seed in 0..10 {
                let x = pseudo_signal(256, seed);
                let tree = forward(&x, 3, f).map_err(|e| e.to_string())?;
                let rec = inverse(&tree, f).map_err(|e| e.to_string())?;
                let err = x
                    .iter()
                    .zip(&rec.signal)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(err).max(rec.imag_residual);
            }
            within("max reconstruction error", worst, 1e-9)
        });
        r.check("noise covariance traces", || {
            let ns = noise_scale(256, 3, f).map_err(|e| e.to_string())?;
            let dev = ns.levels.iter().map(|s| (s.trace() - 1.0).abs()).fold(0.0, f64::max);
            within("max |tr(Sigma_j) - 1|", dev, 1e-10)
        });
    }

    let mut rng = RngStream::new(11, 0);
    r.check("gamma moments", || {
        let (shape, scale) = (1.5, 8.0);
        moment_check(20_000, shape * scale, shape.sqrt() * scale, || {
            sample_gamma(shape, scale, &mut rng)
        })
    });
    r.check("beta moments", || {
        let (a, b): (f64, f64) = (3.0, 5.0);
        let var = a * b / ((a + b).powi(2) * (a + b + 1.0));
        moment_check(20_000, a / (a + b), var.sqrt(), || sample_beta(a, b, &mut rng))
    });
    r.check("inverse gamma moments", || {
        let p = InvGammaParams::new(6.0, 0.5).map_err(|e| e.to_string())?;
        let (mean, var) = (p.mean().unwrap_or(f64::NAN), p.variance().unwrap_or(f64::NAN));
        moment_check(20_000, mean, var.sqrt(), || sample_inv_gamma(&p, &mut rng))
    });
    for (a, b) in [(0.25, 0.3), (0.25, 5.0), (0.25, 200.0)] {
        r.check(format!("GIG moments a={a} b={b}"), || {
            let p = GigParams::new(a, b, 0.5).map_err(|e| e.to_string())?;
            moment_check(20_000, p.mean(), p.variance().sqrt(), || sample_gig(&p, &mut rng))
        });
    }
    r.check("inverse Wishart mean", || {
        let p = InvWishartParams::new(Sym2::new(7.0, 2.0, 5.0), 12.0).map_err(|e| e.to_string())?;
        let m = p.mean();
        let draws = 20_000;
        let mut acc = Sym2::ZERO;
        for _ in 0..draws {
            acc = acc.add(&sample_inv_wishart(&p, &mut rng));
        }
        let rel = acc.scale(1.0 / draws as f64).max_abs_diff(&m) / m.trace();
        within("relative deviation of the mean", rel, 2e-2)
    });

    if level == CheckLevel::Full {
        r.check("Geweke joint distribution", || {
            let report = geweke_harness(&GewekeConfig::default()).map_err(|e| e.to_string())?;
            let worst = report.max_abs_z();
            if worst < 4.0 {
                Ok(format!("max |z| = {worst:.2} over {} statistics", report.stats.len()))
            } else {
                Err(format!("max |z| = {worst:.2}: {:?}", report.stats))
            }
        });
        r.check("AMSE spot check doppler n=256 snr=5", || {
            let target = 0.3119;
            let res =
                run_benchmark(&BenchmarkSpec::desk(TestSignal::Doppler, 256, 5.0, 2024)).map_err(|e| e.to_string())?;
            let rel = (res.amse - target).abs() / target;
            if rel <= 0.25 {
                Ok(format!("AMSE {:.4} vs {target} ({:.1}% off)", res.amse, 100.0 * rel))
            } else {
                Err(format!("AMSE {:.4} vs {target} ({:.1}% off)", res.amse, 100.0 * rel))
            }
        });
    }
    SelfcheckReport {
        level,
        checks: r.checks,
    }
}
