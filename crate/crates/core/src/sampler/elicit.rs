//! Data-driven hyperparameters.
//!
//! `σ̂²` is the robust MAD estimate at the finest level, `a = 2` and
//! `b = 1/σ̂²` put the prior mean of `σ²` at `σ̂²`, and `A_j = (w - 3) Ĉ_j`
//! puts the inverse-Wishart prior mean at `Ĉ_j = Cov(d_j) - σ̂²Σ_j`.

use crate::linalg::Sym2;
use crate::transform::{CoeffTree, NoiseScale};
use crate::{Error, Result};

use super::Hyperparams;

const MAD_SCALE: f64 = 0.6745;

/// Relative floor on `σ̂²` (against the mean detail energy) so that a
/// noiseless input still yields a finite `b`.
const SIGMA2_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElicitOptions {
    pub a: f64,
    pub w: f64,
    /// Ridge added on top of `|λ_min|` when `Ĉ_j` is not SPD, relative to
    /// `trace(Cov(d_j))`.
    pub reg: f64,
}

impl Default for ElicitOptions {
    fn default() -> Self {
        ElicitOptions {
            a: 2.0,
            w: 10.0,
            reg: 1e-6,
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Median absolute deviation about the median.
pub fn mad(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let centre = median(&mut v);
    let mut dev: Vec<f64> = values.iter().map(|x| (x - centre).abs()).collect();
    median(&mut dev)
}

/// `σ̂² = MAD(Re d / 0.6745)² + MAD(Im d / 0.6745)²` at the finest level.
pub fn estimate_sigma2_mad(tree: &CoeffTree) -> Result<f64> {
    tree.validate()?;
    let finest = tree.detail(tree.finest_level());
    if finest.len() < 2 {
        return Err(Error::MalformedTree(
            "finest detail level needs at least two coefficients".into(),
        ));
    }
    let re: Vec<f64> = finest.iter().map(|c| c.re / MAD_SCALE).collect();
    let im: Vec<f64> = finest.iter().map(|c| c.im / MAD_SCALE).collect();
    Ok(mad(&re).powi(2) + mad(&im).powi(2))
}

/// Unbiased sample covariance of the `(Re, Im)` pairs at one level.
pub fn sample_covariance(points: &[num_complex::Complex64]) -> Sym2 {
    let m = points.len() as f64;
    let mean_re = points.iter().map(|c| c.re).sum::<f64>() / m;
    let mean_im = points.iter().map(|c| c.im).sum::<f64>() / m;
    let mut acc = Sym2::ZERO;
    for c in points {
        acc = acc.add(&Sym2::outer([c.re - mean_re, c.im - mean_im]));
    }
    acc.scale(1.0 / (m - 1.0))
}

/// Shifts the spectrum so the smallest eigenvalue is `ridge` when the
/// matrix is not already SPD.
pub fn regularize_spd(m: Sym2, ridge: f64) -> Sym2 {
    let (lo, _) = m.eigenvalues();
    if lo > 0.0 && m.is_spd() {
        m
    } else {
        let shift = lo.abs() + ridge;
        m.add(&Sym2::IDENTITY.scale(shift))
    }
}

/// `Ĉ_j = Cov(d_j) - σ̂²Σ_j`, regularized to SPD, for each detail level.
pub fn estimate_cj(tree: &CoeffTree, sigma2_hat: f64, noise: &NoiseScale, reg: f64) -> Result<Vec<Sym2>> {
    tree.validate()?;
    if noise.j0 != tree.j0 || noise.levels.len() != tree.details.len() {
        return Err(Error::ShapeMismatch(
            "noise scale does not match the coefficient tree".into(),
        ));
    }
    let mut out = Vec::with_capacity(tree.details.len());
    for (i, level) in tree.details.iter().enumerate() {
        if level.len() < 3 {
            return Err(Error::MalformedTree(format!(
                "level {} has {} coefficients; covariance estimation needs at least 3",
                tree.j0 + i,
                level.len()
            )));
        }
        let cov = sample_covariance(level);
        let raw = cov.sub(&noise.levels[i].scale(sigma2_hat));
        let mut ridge = reg * cov.trace();
        if !(ridge > 0.0) {
            ridge = reg * sigma2_hat;
        }
        if !(ridge > 0.0) {
            ridge = reg;
        }
        out.push(regularize_spd(raw, ridge));
    }
    Ok(out)
}

/// MAD estimate with a floor relative to the mean detail energy.
pub(crate) fn floored_sigma2(tree: &CoeffTree) -> Result<f64> {
    let raw = estimate_sigma2_mad(tree)?;
    let energy = tree.details.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>() / tree.detail_count() as f64;
    let floor = SIGMA2_FLOOR * energy.max(1.0);
    Ok(raw.max(floor))
}

/// Hyperparameters with the default `a = 2`, `w = 10`.
pub fn elicit(tree: &CoeffTree, noise: &NoiseScale) -> Result<Hyperparams> {
    elicit_with(tree, noise, &ElicitOptions::default())
}

pub fn elicit_with(tree: &CoeffTree, noise: &NoiseScale, opts: &ElicitOptions) -> Result<Hyperparams> {
    if !(opts.w > 3.0) {
        return Err(Error::InvalidParameter(format!(
            "inverse Wishart degrees of freedom must exceed 3, got {}",
            opts.w
        )));
    }
    if opts.w <= 4.0 {
        log::warn!(
            "w = {} is at the least-informative end; the default w = 10 is usually better behaved",
            opts.w
        );
    }
    let sigma2_hat = floored_sigma2(tree)?;
    let c_hat = estimate_cj(tree, sigma2_hat, noise, opts.reg)?;
    let hp = Hyperparams {
        a: opts.a,
        b: 1.0 / sigma2_hat,
        w: opts.w,
        a_j: c_hat.iter().map(|c| c.scale(opts.w - 3.0)).collect(),
        j0: tree.j0,
    };
    hp.validate()?;
    Ok(hp)
}
