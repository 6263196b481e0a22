//! Random variates and densities in the parameterizations the sampler uses.
//!
//! Two conventions differ from common library defaults and are easy to get
//! wrong:
//!
//! * The inverse gamma `IG(a, b)` has density `∝ x^(-a-1) exp(-1/(b x))`, so
//!   `b` sits in the denominator of the exponent and the mean is
//!   `1 / (b (a - 1))`. Equivalently `1/X ~ Gamma(shape a, scale b)`.
//! * `Ga(3/2, 8)` uses scale 8 (mean 12).

mod bessel;
mod gig;
mod rng;

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{LN_2, PI};

pub use bessel::{bessel_k, ln_bessel_k};
pub use rng::{chain_stream, noise_stream, RngStream};

use crate::linalg::{Sym2, Vec2};
use crate::{Error, Result};

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

/// Inverse gamma with density `∝ x^(-a-1) exp(-1/(b x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl InvGammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        positive("inverse gamma shape", shape)?;
        positive("inverse gamma scale", scale)?;
        Ok(InvGammaParams { shape, scale })
    }

    /// `1 / (b (a - 1))` for `a > 1`.
    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| 1.0 / (self.scale * (self.shape - 1.0)))
    }

    /// `1 / (b² (a - 1)² (a - 2))` for `a > 2`.
    pub fn variance(&self) -> Option<f64> {
        let a = self.shape;
        (a > 2.0).then(|| 1.0 / (self.scale.powi(2) * (a - 1.0).powi(2) * (a - 2.0)))
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (a, b) = (self.shape, self.scale);
        -ln_gamma(a) - a * b.ln() - (a + 1.0) * x.ln() - 1.0 / (b * x)
    }
}

/// `GIG(a, b, p)`: density `(a/b)^(p/2) / (2 K_p(√(ab))) x^(p-1) e^{-(ax + b/x)/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    pub a: f64,
    pub b: f64,
    pub p: f64,
}

impl GigParams {
    pub fn new(a: f64, b: f64, p: f64) -> Result<Self> {
        positive("GIG a", a)?;
        positive("GIG b", b)?;
        if !p.is_finite() {
            return Err(Error::InvalidParameter(format!("GIG index must be finite, got {p}")));
        }
        Ok(GigParams { a, b, p })
    }

    /// `√(b/a) K_{p+1}(√(ab)) / K_p(√(ab))`
    pub fn mean(&self) -> f64 {
        let omega = (self.a * self.b).sqrt();
        (self.b / self.a).sqrt() * (ln_bessel_k(self.p + 1.0, omega) - ln_bessel_k(self.p, omega)).exp()
    }

    pub fn variance(&self) -> f64 {
        let omega = (self.a * self.b).sqrt();
        let eta2 = self.b / self.a;
        let lk = ln_bessel_k(self.p, omega);
        let m1 = (ln_bessel_k(self.p + 1.0, omega) - lk).exp();
        let m2 = (ln_bessel_k(self.p + 2.0, omega) - lk).exp();
        eta2 * (m2 - m1 * m1)
    }

    /// `ln[(a/b)^(p/2) / (2 K_p(√(ab)))]`; costs one Bessel evaluation.
    pub fn ln_normalizer(&self) -> f64 {
        let (a, b, p) = (self.a, self.b, self.p);
        0.5 * p * (a / b).ln() - LN_2 - ln_bessel_k(p, (a * b).sqrt())
    }

    /// Unnormalized log density `(p-1) ln x - (ax + b/x)/2`.
    pub fn ln_kernel(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (self.p - 1.0) * x.ln() - 0.5 * (self.a * x + self.b / x)
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.ln_normalizer() + self.ln_kernel(x)
    }
}

/// 2×2 inverse Wishart: density `∝ |C|^{-(w+3)/2} exp(-tr(A C⁻¹)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvWishartParams {
    pub scale: Sym2,
    pub dof: f64,
}

impl InvWishartParams {
    pub fn new(scale: Sym2, dof: f64) -> Result<Self> {
        if !scale.is_spd() {
            return Err(Error::NotPositiveDefinite(format!("inverse Wishart scale {scale:?}")));
        }
        if !(dof > 3.0) || !dof.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "inverse Wishart degrees of freedom must exceed 3, got {dof}"
            )));
        }
        Ok(InvWishartParams { scale, dof })
    }

    /// `A / (w - 3)`
    pub fn mean(&self) -> Sym2 {
        self.scale.scale(1.0 / (self.dof - 3.0))
    }
}

pub fn sample_inv_gamma<R: Rng + ?Sized>(params: &InvGammaParams, rng: &mut R) -> f64 {
    1.0 / sample_gamma(params.shape, params.scale, rng)
}

pub fn sample_gig<R: Rng + ?Sized>(params: &GigParams, rng: &mut R) -> f64 {
    let omega = (params.a * params.b).sqrt();
    let eta = (params.b / params.a).sqrt();
    let y = gig::standard_gig(params.p.abs(), omega, rng);
    if params.p < 0.0 {
        eta / y
    } else {
        eta * y
    }
}

/// Bartlett decomposition of the Wishart draw `C⁻¹ ~ W(A⁻¹, w)`.
pub fn sample_inv_wishart<R: Rng + ?Sized>(params: &InvWishartParams, rng: &mut R) -> Sym2 {
    let psi = params.scale.inverse().expect("inverse Wishart scale validated as SPD");
    let (l11, l21, l22) = psi.cholesky().expect("inverse of an SPD matrix is SPD");
    let c1 = sample_gamma(0.5 * params.dof, 2.0, rng).sqrt();
    let c2 = sample_gamma(0.5 * (params.dof - 1.0), 2.0, rng).sqrt();
    let n21: f64 = rng.sample(StandardNormal);
    // M = L B with B = [[c1, 0], [n21, c2]]; wishart = M M'
    let m11 = l11 * c1;
    let m21 = l21 * c1 + l22 * n21;
    let m22 = l22 * c2;
    let wishart = Sym2::new(m11 * m11, m11 * m21, m21 * m21 + m22 * m22);
    wishart
        .inverse()
        .unwrap_or(Sym2::new(f64::INFINITY, 0.0, f64::INFINITY))
}

pub fn sample_bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p
}

pub fn sample_beta<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> f64 {
    Beta::new(alpha, beta)
        .expect("beta parameters must be positive")
        .sample(rng)
}

/// Gamma with the given shape and scale (mean `shape * scale`).
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, scale)
        .expect("gamma parameters must be positive")
        .sample(rng)
}

pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Bivariate normal; fails when `cov` is not SPD.
pub fn sample_binormal<R: Rng + ?Sized>(mean: Vec2, cov: &Sym2, rng: &mut R) -> Result<Vec2> {
    let (l11, l21, l22) = cov
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite(format!("binormal covariance {cov:?}")))?;
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    Ok([mean[0] + l11 * z1, mean[1] + l21 * z1 + l22 * z2])
}

pub fn gamma_ln_pdf(x: f64, shape: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    -ln_gamma(shape) - shape * scale.ln() + (shape - 1.0) * x.ln() - x / scale
}

/// Log density of `N₂(0, cov)` at `d`.
pub fn binormal_ln_pdf(d: Vec2, cov: &Sym2) -> Result<f64> {
    let inv = cov
        .inverse()
        .filter(|_| cov.is_spd())
        .ok_or_else(|| Error::NotPositiveDefinite(format!("covariance {cov:?}")))?;
    Ok(-(2.0 * PI).ln() - 0.5 * cov.det().ln() - 0.5 * inv.quad_form(d))
}

/// `ln f(d | 0, σ²Σ_j)`, the spike (noise-only) likelihood.
pub fn loglik_zero(d: Vec2, sigma2: f64, sigma_j: &Sym2) -> Result<f64> {
    binormal_ln_pdf(d, &sigma_j.scale(sigma2))
}

/// `ln m(d | σ², v, C_j)`: zero-mean binormal with covariance `σ²Σ_j + v C_j`.
pub fn logmarg_signal(d: Vec2, sigma2: f64, sigma_j: &Sym2, v: f64, c_j: &Sym2) -> Result<f64> {
    binormal_ln_pdf(d, &sigma_j.scale(sigma2).add(&c_j.scale(v)))
}
