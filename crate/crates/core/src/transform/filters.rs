//! Wavelet filter tables.
//!
//! The symmetric complex Daubechies filter with three vanishing moments
//! (`scd3`) is the closed-form solution of Lina & Mayrand (1995), scaled so
//! that the low-pass taps sum to √2:
//!
//! ```text
//! h = (1 / (32√2)) · [ -3 - i√15,  5 - i√15,  30 + 2i√15,
//!                      30 + 2i√15, 5 - i√15,  -3 - i√15 ]
//! ```
//!
//! High-pass taps follow the quadrature-mirror rule
//! `g_k = (-1)^k · conj(h_{L-1-k})`.

use num_complex::Complex64;
use std::f64::consts::SQRT_2;

use crate::{Error, Result};

/// Filters accepted by [`load_filters`].
pub const SUPPORTED_FILTERS: &[&str] = &["scd3", "haar", "db2"];

const QMF_TOL: f64 = 1e-10;

/// Low-pass / high-pass pair for the periodic complex transform.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFilterPair {
    name: String,
    low_pass: Vec<Complex64>,
    high_pass: Vec<Complex64>,
}

impl ComplexFilterPair {
    /// Builds a validated pair from low-pass taps; the high-pass is derived.
    pub fn new(name: impl Into<String>, low_pass: Vec<Complex64>) -> Result<Self> {
        let pair = Self::from_taps_unchecked(name, low_pass);
        pair.validate()?;
        Ok(pair)
    }

    /// Builds a pair without checking the QMF invariants.
    ///
    /// Used by self-checks that need to exercise the validation on corrupted
    /// tables.
    pub fn from_taps_unchecked(name: impl Into<String>, low_pass: Vec<Complex64>) -> Self {
        let len = low_pass.len();
        let high_pass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                low_pass[len - 1 - k].conj() * sign
            })
            .collect();
        ComplexFilterPair {
            name: name.into(),
            low_pass,
            high_pass,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn low_pass(&self) -> &[Complex64] {
        &self.low_pass
    }

    pub fn high_pass(&self) -> &[Complex64] {
        &self.high_pass
    }

    pub fn len(&self) -> usize {
        self.low_pass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low_pass.is_empty()
    }

    /// True when every tap has a zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.low_pass.iter().all(|h| h.im == 0.0)
    }

    /// Checks DC normalization, the vanishing moment, orthonormality under
    /// even shifts and the symmetry of complex filters.
    pub fn validate(&self) -> Result<()> {
        let fail = |invariant: &'static str, deviation: f64| Error::FilterInvariant {
            filter: self.name.clone(),
            invariant,
            deviation,
        };
        let len = self.low_pass.len();
        if len < 2 || !len.is_multiple_of(2) {
            return Err(fail("even filter length >= 2", len as f64));
        }

        let dc: Complex64 = self.low_pass.iter().sum();
        let dev = (dc - Complex64::new(SQRT_2, 0.0)).norm();
        if dev >= QMF_TOL {
            return Err(fail("sum(h) = sqrt(2)", dev));
        }

        let hp_sum: Complex64 = self.high_pass.iter().sum();
        if hp_sum.norm() >= QMF_TOL {
            return Err(fail("sum(g) = 0", hp_sum.norm()));
        }

        let max_shift = (len / 2) as isize;
        for m in -max_shift..=max_shift {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..len as isize {
                let l = k + 2 * m;
                if (0..len as isize).contains(&l) {
                    acc += self.low_pass[k as usize] * self.low_pass[l as usize].conj();
                }
            }
            let target = if m == 0 { 1.0 } else { 0.0 };
            let dev = (acc - target).norm();
            if dev >= QMF_TOL {
                return Err(fail("sum_k h_k conj(h_{k+2m}) = delta_m", dev));
            }
        }

        if !self.is_real() {
            let dev = (0..len)
                .map(|k| (self.low_pass[k] - self.low_pass[len - 1 - k]).norm())
                .fold(0.0, f64::max);
            if dev >= QMF_TOL {
                return Err(fail("h_k = h_{L-1-k}", dev));
            }
        }
        Ok(())
    }
}

fn scd3_taps() -> Vec<Complex64> {
    let s = 15f64.sqrt();
    let c = 1.0 / (32.0 * SQRT_2);
    let outer = Complex64::new(-3.0 * c, -s * c);
    let inner = Complex64::new(5.0 * c, -s * c);
    let centre = Complex64::new(30.0 * c, 2.0 * s * c);
    vec![outer, inner, centre, centre, inner, outer]
}

fn real_taps(taps: &[f64]) -> Vec<Complex64> {
    taps.iter().map(|&t| Complex64::new(t, 0.0)).collect()
}

/// Loads and validates a named filter pair.
pub fn load_filters(name: &str) -> Result<ComplexFilterPair> {
    let taps = match name {
        "scd3" => scd3_taps(),
        "haar" => real_taps(&[1.0 / SQRT_2, 1.0 / SQRT_2]),
        "db2" => {
            let s3 = 3f64.sqrt();
            let d = 4.0 * SQRT_2;
            real_taps(&[(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d])
        }
        _ => {
            return Err(Error::UnknownFilter {
                name: name.to_string(),
                supported: SUPPORTED_FILTERS.join(", "),
            })
        }
    };
    ComplexFilterPair::new(name, taps)
}
