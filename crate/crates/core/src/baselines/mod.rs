//! Comparison estimators sharing the transform, `σ̂²` and `Σ_j` machinery.
//!
//! * CMWS-Hard keeps a coefficient whole when its thresholding statistic
//!   `d'(σ̂²Σ_j)⁻¹d` exceeds `λ` and zeroes it otherwise, so kept coefficients
//!   retain their phase.
//! * CEB fits, per level, a point-mass / bivariate-normal mixture by maximum
//!   marginal likelihood and returns the posterior mean
//!   `p̂ · V̂(V̂ + σ̂²Σ_j)⁻¹ d`.
//!
//! The threshold default (`2 ln n`) and the optimizer are implementation
//! choices.

pub mod nelder_mead;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::binormal_ln_pdf;
use crate::linalg::{Sym2, Vec2};
use crate::sampler::{regularize_spd, sample_covariance};
use crate::transform::{CoeffTree, NoiseScale};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub lambda: f64,
}

impl ThresholdRule {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be non-negative, got {lambda}"
            )));
        }
        Ok(ThresholdRule { lambda })
    }

    /// `λ = 2 ln n`.
    pub fn universal(n: usize) -> Self {
        ThresholdRule {
            lambda: 2.0 * (n as f64).ln(),
        }
    }
}

fn noise_inverses(tree: &CoeffTree, sigma2: f64, noise: &NoiseScale) -> Result<Vec<(Sym2, Sym2)>> {
    tree.validate()?;
    if noise.j0 != tree.j0 || noise.levels.len() != tree.details.len() {
        return Err(Error::ShapeMismatch(
            "noise scale does not match the coefficient tree".into(),
        ));
    }
    noise
        .levels
        .iter()
        .map(|s| {
            let scaled = s.scale(sigma2);
            scaled
                .inverse()
                .filter(|_| scaled.is_spd())
                .map(|inv| (scaled, inv))
                .ok_or_else(|| Error::NotPositiveDefinite(format!("scaled noise covariance {scaled:?}")))
        })
        .collect()
}

/// Thresholding statistic `d'(σ̂²Σ_j)⁻¹d`.
pub fn threshold_statistic(d: Complex64, noise_inv: &Sym2) -> f64 {
    noise_inv.quad_form([d.re, d.im])
}

pub fn cmws_hard(tree: &CoeffTree, sigma2: f64, noise: &NoiseScale, rule: &ThresholdRule) -> Result<CoeffTree> {
    let inverses = noise_inverses(tree, sigma2, noise)?;
    let mut out = tree.clone();
    for (level, (_, inv)) in out.details.iter_mut().zip(&inverses) {
        for c in level.iter_mut() {
            if threshold_statistic(*c, inv) <= rule.lambda {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(out)
}

/// Fitted mixture for one level: weight `ε̂` on the slab `N₂(0, V̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CebLevelParams {
    pub eps: f64,
    pub v: Sym2,
}

/// `Σ_k ln[(1-ε) f(d|0, S) + ε f(d|0, S + V)]`.
pub fn ceb_level_loglik(coeffs: &[Vec2], noise_cov: &Sym2, eps: f64, v: &Sym2) -> f64 {
    let slab = noise_cov.add(v);
    let mut total = 0.0;
    for &d in coeffs {
        let (Ok(l0), Ok(l1)) = (binormal_ln_pdf(d, noise_cov), binormal_ln_pdf(d, &slab)) else {
            return f64::NEG_INFINITY;
        };
        let a = (1.0 - eps).ln() + l0;
        let b = eps.ln() + l1;
        let top = a.max(b);
        total += top + ((a - top).exp() + (b - top).exp()).ln();
    }
    total
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn decode(u: &[f64]) -> CebLevelParams {
    let l11 = u[1].exp();
    let l21 = u[2];
    let l22 = u[3].exp();
    CebLevelParams {
        eps: logistic(u[0]),
        v: Sym2::new(l11 * l11, l11 * l21, l21 * l21 + l22 * l22),
    }
}

fn encode(params: &CebLevelParams) -> Option<Vec<f64>> {
    let (l11, l21, l22) = params.v.cholesky()?;
    let eps = params.eps.clamp(1e-6, 1.0 - 1e-6);
    Some(vec![(eps / (1.0 - eps)).ln(), l11.ln(), l21, l22.ln()])
}

/// Maximizes the level marginal likelihood over `(logit ε, log-Cholesky V)`
/// with Nelder–Mead from three starting points.
pub fn fit_ceb_level(coeffs: &[Vec2], noise_cov: &Sym2) -> CebLevelParams {
    let points: Vec<Complex64> = coeffs.iter().map(|d| Complex64::new(d[0], d[1])).collect();
    let cov = if points.len() >= 2 {
        sample_covariance(&points)
    } else {
        *noise_cov
    };
    let ridge = 1e-6 * cov.trace().max(noise_cov.trace());
    let moment = regularize_spd(cov.sub(noise_cov), ridge);
    let fallback = CebLevelParams { eps: 0.5, v: moment };

    let objective = |u: &[f64]| {
        let p = decode(u);
        -ceb_level_loglik(coeffs, noise_cov, p.eps, &p.v)
    };
    let starts = [
        CebLevelParams { eps: 0.5, v: moment },
        CebLevelParams {
            eps: 0.1,
            v: regularize_spd(cov, ridge),
        },
        CebLevelParams {
            eps: 0.9,
            v: *noise_cov,
        },
    ];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &starts {
        let Some(u0) = encode(start) else { continue };
        let m = nelder_mead::minimize(objective, &u0, 0.5, 1e-10, 4000);
        if m.value.is_finite() && best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value));
        }
    }
    match best {
        Some((u, _)) => decode(&u),
        None => {
            log::warn!("CEB marginal likelihood optimization failed; using the moment estimate");
            fallback
        }
    }
}

/// `p̂ · V(V + S)⁻¹ d`, with `p̂` the posterior probability of the slab.
pub fn ceb_shrink(d: Vec2, noise_cov: &Sym2, params: &CebLevelParams) -> Vec2 {
    if params.eps <= 0.0 {
        return [0.0, 0.0];
    }
    let slab = noise_cov.add(&params.v);
    let p = if params.eps >= 1.0 {
        1.0
    } else {
        match (binormal_ln_pdf(d, noise_cov), binormal_ln_pdf(d, &slab)) {
            (Ok(l0), Ok(l1)) => {
                let a = (1.0 - params.eps).ln() + l0;
                let b = params.eps.ln() + l1;
                1.0 / (1.0 + (a - b).exp())
            }
            _ => return [0.0, 0.0],
        }
    };
    let Some(slab_inv) = slab.inverse() else {
        return [0.0, 0.0];
    };
    let m = params.v.mul_vec(slab_inv.mul_vec(d));
    [p * m[0], p * m[1]]
}

/// Per-level empirical-Bayes fit followed by the posterior mean.
pub fn ceb_posterior_mean(
    tree: &CoeffTree,
    sigma2: f64,
    noise: &NoiseScale,
) -> Result<(CoeffTree, Vec<CebLevelParams>)> {
    let inverses = noise_inverses(tree, sigma2, noise)?;
    let mut out = tree.clone();
    let mut fitted = Vec::with_capacity(tree.details.len());
    for (level, (noise_cov, _)) in out.details.iter_mut().zip(&inverses) {
        let coeffs: Vec<Vec2> = level.iter().map(|c| [c.re, c.im]).collect();
        let params = fit_ceb_level(&coeffs, noise_cov);
        for (c, d) in level.iter_mut().zip(&coeffs) {
            let t = ceb_shrink(*d, noise_cov, &params);
            *c = Complex64::new(t[0], t[1]);
        }
        fitted.push(params);
    }
    Ok((out, fitted))
}
