//! Periodic complex wavelet transform.
//!
//! The forward transform is the orthonormal pyramid
//!
//! ```text
//! a_{j-1,k} = Σ_l h_l a_{j,(2k+l) mod 2^j}
//! d_{j-1,k} = Σ_l g_l a_{j,(2k+l) mod 2^j}
//! ```
//!
//! starting from the (real) signal at the finest level. With `W` the resulting
//! linear map, the inverse is `conj(W)'`, and for a real input its output is
//! real up to rounding.

mod filters;
mod matrix;

use num_complex::Complex64;

pub use filters::{load_filters, ComplexFilterPair, SUPPORTED_FILTERS};
pub use matrix::{
    build_matrix, build_matrix_capped, noise_covariance, noise_scale, ComplexMatrix, NoiseScale, DENSE_CAP,
};

use crate::{Error, Result};

/// Coefficients of a periodic decomposition down to level `j0`.
///
/// `details[i]` holds level `j0 + i`, which has `2^(j0+i)` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTree {
    pub n: usize,
    pub j0: usize,
    pub approx: Vec<Complex64>,
    pub details: Vec<Vec<Complex64>>,
}

impl CoeffTree {
    /// All-zero tree of the given shape.
    pub fn zeros(n: usize, j0: usize) -> Result<Self> {
        let levels = check_shape(n, j0)?;
        Ok(CoeffTree {
            n,
            j0,
            approx: vec![Complex64::new(0.0, 0.0); 1 << j0],
            details: (j0..levels).map(|j| vec![Complex64::new(0.0, 0.0); 1 << j]).collect(),
        })
    }

    /// `J = log2(n)`.
    pub fn levels(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    /// Finest detail level `J - 1`.
    pub fn finest_level(&self) -> usize {
        self.levels() - 1
    }

    /// Detail coefficients at dyadic level `j`.
    pub fn detail(&self, j: usize) -> &[Complex64] {
        &self.details[j - self.j0]
    }

    pub fn detail_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.details[j - self.j0]
    }

    /// Number of detail coefficients, `2^J - 2^J0`.
    pub fn detail_count(&self) -> usize {
        self.details.iter().map(Vec::len).sum()
    }

    /// Coefficients in transform-matrix order: approximation block, then
    /// detail levels from coarse to fine, each in natural `k` order.
    pub fn flatten(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n);
        out.extend_from_slice(&self.approx);
        for level in &self.details {
            out.extend_from_slice(level);
        }
        out
    }

    /// Inverse of [`CoeffTree::flatten`].
    pub fn from_flat(n: usize, j0: usize, flat: &[Complex64]) -> Result<Self> {
        let levels = check_shape(n, j0)?;
        if flat.len() != n {
            return Err(Error::MalformedTree(format!(
                "expected {n} coefficients, got {}",
                flat.len()
            )));
        }
        let mut offset = 1 << j0;
        let approx = flat[..offset].to_vec();
        let details = (j0..levels)
            .map(|j| {
                let level = flat[offset..offset + (1 << j)].to_vec();
                offset += 1 << j;
                level
            })
            .collect();
        Ok(CoeffTree { n, j0, approx, details })
    }

    /// Sum of squared moduli of every coefficient.
    pub fn energy(&self) -> f64 {
        self.approx.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + self.details.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Checks that level sizes are consistent with `n` and `j0`.
    pub fn validate(&self) -> Result<()> {
        let levels = check_shape(self.n, self.j0)?;
        if self.approx.len() != 1 << self.j0 {
            return Err(Error::MalformedTree(format!(
                "approximation block has {} coefficients, expected {}",
                self.approx.len(),
                1usize << self.j0
            )));
        }
        if self.details.len() != levels - self.j0 {
            return Err(Error::MalformedTree(format!(
                "{} detail levels, expected {}",
                self.details.len(),
                levels - self.j0
            )));
        }
        for (i, level) in self.details.iter().enumerate() {
            let j = self.j0 + i;
            if level.len() != 1 << j {
                return Err(Error::MalformedTree(format!(
                    "level {j} has {} coefficients, expected {}",
                    level.len(),
                    1usize << j
                )));
            }
        }
        Ok(())
    }
}

/// Output of [`inverse`]: the real part of the synthesis and the largest
/// discarded imaginary component.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub signal: Vec<f64>,
    pub imag_residual: f64,
}

/// Validates `(n, j0)` and returns `J = log2(n)`.
pub(crate) fn check_shape(n: usize, j0: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let levels = n.trailing_zeros() as usize;
    if j0 < 1 || j0 >= levels {
        return Err(Error::LevelOutOfRange { j0, levels });
    }
    Ok(levels)
}

/// Default coarsest level `max(1, ⌊log2(ln n) + 1⌋)`, clamped below `log2(n)`.
pub fn default_j0(n: usize) -> usize {
    let levels = n.max(2).trailing_zeros() as usize;
    let j0 = ((n as f64).ln().log2() + 1.0).floor().max(1.0) as usize;
    j0.min(levels.saturating_sub(1)).max(1)
}

fn analysis_step(input: &[Complex64], filters: &ComplexFilterPair) -> (Vec<Complex64>, Vec<Complex64>) {
    let m = input.len();
    let half = m / 2;
    let h = filters.low_pass();
    let g = filters.high_pass();
    let mut approx = vec![Complex64::new(0.0, 0.0); half];
    let mut detail = vec![Complex64::new(0.0, 0.0); half];
    for k in 0..half {
        let mut a = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for l in 0..h.len() {
            let x = input[(2 * k + l) % m];
            a += h[l] * x;
            d += g[l] * x;
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

fn synthesis_step(approx: &[Complex64], detail: &[Complex64], filters: &ComplexFilterPair) -> Vec<Complex64> {
    let half = approx.len();
    let m = 2 * half;
    let h = filters.low_pass();
    let g = filters.high_pass();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..half {
        for l in 0..h.len() {
            out[(2 * k + l) % m] += h[l].conj() * approx[k] + g[l].conj() * detail[k];
        }
    }
    out
}

/// Forward transform of a real signal down to coarsest level `j0`.
pub fn forward(signal: &[f64], j0: usize, filters: &ComplexFilterPair) -> Result<CoeffTree> {
    let input: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward_complex(&input, j0, filters)
}

/// Forward transform of a complex input; `forward` is the real special case.
pub fn forward_complex(signal: &[Complex64], j0: usize, filters: &ComplexFilterPair) -> Result<CoeffTree> {
    let n = signal.len();
    let levels = check_shape(n, j0)?;
    let mut current = signal.to_vec();
    let mut details = Vec::with_capacity(levels - j0);
    for _ in j0..levels {
        let (approx, detail) = analysis_step(&current, filters);
        details.push(detail);
        current = approx;
    }
    details.reverse();
    Ok(CoeffTree {
        n,
        j0,
        approx: current,
        details,
    })
}

/// Full complex synthesis `conj(W)' c`.
pub fn inverse_complex(tree: &CoeffTree, filters: &ComplexFilterPair) -> Result<Vec<Complex64>> {
    tree.validate()?;
    let mut current = tree.approx.clone();
    for detail in &tree.details {
        current = synthesis_step(&current, detail, filters);
    }
    Ok(current)
}

/// Inverse transform; returns the real part and the imaginary residual.
pub fn inverse(tree: &CoeffTree, filters: &ComplexFilterPair) -> Result<Reconstruction> {
    let full = inverse_complex(tree, filters)?;
    let imag_residual = full.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    Ok(Reconstruction {
        signal: full.iter().map(|c| c.re).collect(),
        imag_residual,
    })
}
