//! Dense transform matrix and the noise covariance it induces.
//!
//! For white noise `e ~ N(0, σ²I)` and `ε = W e`, write `W = R + iI`. Since
//! `W conj(W)' = I`, `RR' + II' = I` and `RI' = IR'`, which gives
//!
//! ```text
//! Cov(Re ε, Re ε) = σ² (I + Re(WW')) / 2
//! Cov(Im ε, Im ε) = σ² (I - Re(WW')) / 2
//! Cov(Re ε, Im ε) = σ² Im(WW') / 2
//! ```
//!
//! The cross term carries a plus sign because coefficients are `W x` with
//! unconjugated analysis filters; the conjugate convention flips it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_shape, forward, inverse_complex, CoeffTree, ComplexFilterPair};
use crate::linalg::Sym2;
use crate::{Error, Result};

/// Largest `n` for which [`build_matrix`] materializes `W`.
pub const DENSE_CAP: usize = 4096;

const CONSTANCY_TOL: f64 = 1e-8;
const UNITARY_ROW_TOL: f64 = 1e-8;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_real(&self, x: &[f64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(w, &xv)| w * xv).sum())
            .collect()
    }

    /// `W W'` without conjugation.
    pub fn gram_transpose(&self) -> ComplexMatrix {
        self.gram(false)
    }

    /// `W conj(W)'`.
    pub fn gram_conjugate(&self) -> ComplexMatrix {
        self.gram(true)
    }

    fn gram(&self, conjugate: bool) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let s: Complex64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| if conjugate { a * b.conj() } else { a * b })
                    .sum();
                out.set(i, j, s);
                out.set(j, i, if conjugate { s.conj() } else { s });
            }
        }
        out
    }

    /// `max |W conj(W)' - I|` over all entries.
    pub fn unitarity_error(&self) -> f64 {
        let g = self.gram_conjugate();
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.rows {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.get(i, j) - target).norm());
            }
        }
        worst
    }
}

/// [`build_matrix_capped`] with the default [`DENSE_CAP`].
pub fn build_matrix(n: usize, j0: usize, filters: &ComplexFilterPair) -> Result<ComplexMatrix> {
    build_matrix_capped(n, j0, filters, DENSE_CAP)
}

/// Dense `W` with `W x = flatten(forward(x))`.
///
/// Column `i` is the transform of the `i`-th canonical basis vector; rows
/// follow the [`CoeffTree::flatten`] order.
pub fn build_matrix_capped(n: usize, j0: usize, filters: &ComplexFilterPair, cap: usize) -> Result<ComplexMatrix> {
    check_shape(n, j0)?;
    if n > cap {
        return Err(Error::MatrixTooLarge { n, cap });
    }
    let mut w = ComplexMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e[col] = 1.0;
        let coeffs = forward(&e, j0, filters)?.flatten();
        for (row, c) in coeffs.into_iter().enumerate() {
            w.set(row, col, c);
        }
        e[col] = 0.0;
    }
    Ok(w)
}

/// Per-level unit-noise covariance `Σ_j` of `(Re d_jk, Im d_jk)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseScale {
    pub j0: usize,
    /// `levels[i]` is `Σ_{j0+i}`.
    pub levels: Vec<Sym2>,
}

impl NoiseScale {
    pub fn level(&self, j: usize) -> &Sym2 {
        &self.levels[j - self.j0]
    }
}

fn sigma_from_square(square: Complex64) -> Sym2 {
    Sym2::new(0.5 * (1.0 + square.re), 0.5 * square.im, 0.5 * (1.0 - square.re))
}

/// Collects per-coefficient covariances level by level and checks that each
/// level is constant in `k`.
fn collect_levels(n: usize, j0: usize, mut row_square: impl FnMut(usize) -> Result<Complex64>) -> Result<NoiseScale> {
    let levels = check_shape(n, j0)?;
    let mut out = Vec::with_capacity(levels - j0);
    let mut offset = 1usize << j0;
    for j in j0..levels {
        let size = 1usize << j;
        let representative = sigma_from_square(row_square(offset)?);
        for k in 1..size {
            let sigma = sigma_from_square(row_square(offset + k)?);
            let deviation = sigma.max_abs_diff(&representative);
            if deviation > CONSTANCY_TOL {
                return Err(Error::NoiseCovariance { level: j, deviation });
            }
        }
        out.push(representative);
        offset += size;
    }
    Ok(NoiseScale { j0, levels: out })
}

/// `Σ_j` from the diagonal of `W W'` of a dense transform matrix.
pub fn noise_covariance(w: &ComplexMatrix, j0: usize) -> Result<NoiseScale> {
    let n = w.rows();
    if w.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "transform matrix is {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    for i in 0..n {
        let norm: f64 = w.row(i).iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > UNITARY_ROW_TOL {
            return Err(Error::InvalidParameter(format!(
                "transform matrix is not unitary: row {i} has squared norm {norm}"
            )));
        }
    }
    collect_levels(n, j0, |i| Ok(w.row(i).iter().map(|c| c * c).sum()))
}

/// `Σ_j` without materializing `W`.
///
/// Row `i` of `W` is `conj(conj(W)' e_i)`, a single synthesis of a unit
/// coefficient, so each diagonal entry of `W W'` costs `O(n)`.
pub fn noise_scale(n: usize, j0: usize, filters: &ComplexFilterPair) -> Result<NoiseScale> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut flat = vec![zero; n];
    collect_levels(n, j0, |i| {
        flat[i] = one;
        let unit = CoeffTree::from_flat(n, j0, &flat)?;
        flat[i] = zero;
        let synth = inverse_complex(&unit, filters)?;
        // sum of conj(s)^2 = conj(sum of s^2)
        Ok(synth.iter().map(|s| s * s).sum::<Complex64>().conj())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::load_filters;

    #[test]
    fn small_matrix_is_unitary() {
        let f = load_filters("scd3").unwrap();
        let w = build_matrix(8, 1, &f).unwrap();
        assert!(w.unitarity_error() < 1e-9);
    }

    #[test]
    fn cap_is_enforced() {
        let f = load_filters("haar").unwrap();
        assert!(matches!(
            build_matrix_capped(64, 2, &f, 32),
            Err(Error::MatrixTooLarge { n: 64, cap: 32 })
        ));
    }

    #[test]
    fn traces_are_one() {
        let f = load_filters("scd3").unwrap();
        let w = build_matrix(64, 2, &f).unwrap();
        let ns = noise_covariance(&w, 2).unwrap();
        for s in &ns.levels {
            assert!((s.trace() - 1.0).abs() < 1e-10);
            assert!(s.is_spd());
        }
    }

    #[test]
    fn real_filters_give_degenerate_scale() {
        let f = load_filters("db2").unwrap();
        let w = build_matrix(32, 2, &f).unwrap();
        let ns = noise_covariance(&w, 2).unwrap();
        for s in &ns.levels {
            assert!(s.max_abs_diff(&Sym2::diag(1.0, 0.0)) < 1e-12);
        }
    }

    #[test]
    fn fast_path_matches_dense() {
        let f = load_filters("scd3").unwrap();
        for (n, j0) in [(16, 1), (64, 3), (256, 3)] {
            let dense = noise_covariance(&build_matrix(n, j0, &f).unwrap(), j0).unwrap();
            let fast = noise_scale(n, j0, &f).unwrap();
            for (a, b) in dense.levels.iter().zip(&fast.levels) {
                assert!(a.max_abs_diff(b) < 1e-12);
            }
        }
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let mut w = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            w.set(i, i, Complex64::new(2.0, 0.0));
        }
        assert!(noise_covariance(&w, 1).is_err());
    }
}
