//! Gibbs sampler over the bivariate mixture model.
//!
//! For each detail coefficient `d_jk = (Re, Im)`:
//!
//! ```text
//! d_jk | θ_jk, σ²      ~ N₂(θ_jk, σ² Σ_j)
//! σ²                   ~ IG(a, b)
//! θ_jk | z, v, C_j     ~ (1 - z_jk) δ₀ + z_jk N₂(0, v_jk C_j)
//! z_jk | ε_j           ~ Ber(ε_j)
//! ε_j                  ~ U(0, 1)
//! v_jk                 ~ Ga(3/2, scale 8)
//! C_j                  ~ IW(A_j, w)
//! ```
//!
//! Integrating `v_jk` out gives the bivariate double exponential slab. One
//! sweep updates `σ²`, then every `z_jk`, every `ε_j`, every `θ_jk`, every
//! `v_jk` and finally every `C_j`, each from its full conditional.

mod chain;
mod elicit;
mod updates;

use serde::{Deserialize, Serialize};

pub use chain::{denoise, denoise_with_rng, run_chain, run_chain_from, ChainTrace, DenoiseResult};
pub use elicit::{
    elicit, elicit_with, estimate_cj, estimate_sigma2_mad, mad, regularize_spd, sample_covariance, ElicitOptions,
};
pub use updates::{
    c_conditional, inclusion_probability, sigma2_conditional, sweep, theta_conditional, update_c, update_sigma2,
    update_theta, update_v, update_z_eps, SweepOptions,
};

use crate::linalg::{Sym2, Vec2};
use crate::transform::{CoeffTree, NoiseScale};
use crate::{Error, Result};

/// Prior mean of `v_jk` under `Ga(3/2, scale 8)`.
pub const V_PRIOR_SHAPE: f64 = 1.5;
pub const V_PRIOR_SCALE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Inverse gamma shape.
    pub a: f64,
    /// Inverse gamma scale in the `exp(-1/(b σ²))` convention.
    pub b: f64,
    /// Inverse Wishart degrees of freedom.
    pub w: f64,
    /// Inverse Wishart scale per detail level, `a_j[i]` for level `j0 + i`.
    pub a_j: Vec<Sym2>,
    pub j0: usize,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 1.0) || !self.a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must exceed 1, got {}", self.a)));
        }
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidParameter(format!("b must be positive, got {}", self.b)));
        }
        if !(self.w > 3.0) || !self.w.is_finite() {
            return Err(Error::InvalidParameter(format!("w must exceed 3, got {}", self.w)));
        }
        for (i, a) in self.a_j.iter().enumerate() {
            if !a.is_spd() {
                return Err(Error::NotPositiveDefinite(format!(
                    "A_j at level {}: {a:?}",
                    self.j0 + i
                )));
            }
        }
        Ok(())
    }

    /// Prior mean of `σ²`, `1 / (b (a - 1))`.
    pub fn sigma2_prior_mean(&self) -> f64 {
        1.0 / (self.b * (self.a - 1.0))
    }

    /// Prior mean of `C_j`, `A_j / (w - 3)`.
    pub fn c_prior_mean(&self, level: usize) -> Sym2 {
        self.a_j[level].scale(1.0 / (self.w - 3.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub iters: usize,
    pub burnin: usize,
    pub seed: u64,
    /// Coarsest level; `None` selects `⌊log2(ln n) + 1⌋`.
    pub j0: Option<usize>,
    pub wavelet: String,
    pub a: f64,
    pub w: f64,
    pub reg: f64,
    /// Keep every `k`-th post-burn-in draw of `σ²` and `ε_j`.
    pub trace_thin: Option<usize>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            iters: 10_000,
            burnin: 5_000,
            seed: 0,
            j0: None,
            wavelet: "scd3".to_string(),
            a: 2.0,
            w: 10.0,
            reg: 1e-6,
            trace_thin: None,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iters <= self.burnin {
            return Err(Error::InvalidParameter(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iters, self.burnin
            )));
        }
        if self.trace_thin == Some(0) {
            return Err(Error::InvalidParameter("trace thinning must be positive".into()));
        }
        Ok(())
    }

    pub fn elicit_options(&self) -> ElicitOptions {
        ElicitOptions {
            a: self.a,
            w: self.w,
            reg: self.reg,
        }
    }
}

/// Observed coefficients of one level and its noise scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelData {
    pub j: usize,
    pub sigma: Sym2,
    pub sigma_inv: Sym2,
    pub coeffs: Vec<Vec2>,
}

/// The sampler's view of a coefficient tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainData {
    pub j0: usize,
    pub levels: Vec<LevelData>,
}

impl ChainData {
    pub fn new(tree: &CoeffTree, noise: &NoiseScale) -> Result<Self> {
        tree.validate()?;
        if noise.j0 != tree.j0 || noise.levels.len() != tree.details.len() {
            return Err(Error::ShapeMismatch(
                "noise scale does not match the coefficient tree".into(),
            ));
        }
        let levels = tree
            .details
            .iter()
            .zip(&noise.levels)
            .enumerate()
            .map(|(i, (coeffs, sigma))| {
                let sigma_inv = sigma.inverse().filter(|_| sigma.is_spd()).ok_or_else(|| {
                    Error::NotPositiveDefinite(format!(
                        "noise scale at level {} is singular ({sigma:?}); real-valued filters \
                         cannot be used with the bivariate model",
                        tree.j0 + i
                    ))
                })?;
                Ok(LevelData {
                    j: tree.j0 + i,
                    sigma: *sigma,
                    sigma_inv,
                    coeffs: coeffs.iter().map(|c| [c.re, c.im]).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainData { j0: tree.j0, levels })
    }

    /// Number of bivariate detail coefficients, `2^J - 2^J0`.
    pub fn detail_count(&self) -> usize {
        self.levels.iter().map(|l| l.coeffs.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelState {
    pub eps: f64,
    pub c: Sym2,
    pub theta: Vec<Vec2>,
    pub z: Vec<bool>,
    pub v: Vec<f64>,
}

/// Full Gibbs state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub sigma2: f64,
    pub levels: Vec<LevelState>,
}

impl ChainState {
    /// Starting point: `σ² = σ̂²`, `ε_j = 1/2`, `C_j = Ĉ_j`, `v = 12`, `z = 1`,
    /// `θ = d`. `σ̂²` and `Ĉ_j` are recovered as the prior means.
    pub fn initial(data: &ChainData, hp: &Hyperparams) -> Self {
        let v0 = V_PRIOR_SHAPE * V_PRIOR_SCALE;
        ChainState {
            sigma2: hp.sigma2_prior_mean(),
            levels: data
                .levels
                .iter()
                .enumerate()
                .map(|(i, level)| LevelState {
                    eps: 0.5,
                    c: hp.c_prior_mean(i),
                    theta: level.coeffs.clone(),
                    z: vec![true; level.coeffs.len()],
                    v: vec![v0; level.coeffs.len()],
                })
                .collect(),
        }
    }

    /// Support constraints that must hold after every sweep.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(format!("sigma2 = {}", self.sigma2));
        }
        for (i, level) in self.levels.iter().enumerate() {
            if !(0.0..=1.0).contains(&level.eps) {
                return Err(format!("eps[{i}] = {}", level.eps));
            }
            if !level.c.is_spd() {
                return Err(format!("C[{i}] = {:?} is not SPD", level.c));
            }
            for (k, (&z, theta)) in level.z.iter().zip(&level.theta).enumerate() {
                if !z && (theta[0] != 0.0 || theta[1] != 0.0) {
                    return Err(format!("theta[{i}][{k}] = {theta:?} with z = 0"));
                }
            }
            if let Some(v) = level.v.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return Err(format!("v in level {i} = {v}"));
            }
        }
        Ok(())
    }
}

/// Posterior means over the kept draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub theta_mean: Vec<Vec<Vec2>>,
    pub sigma2_mean: f64,
    pub eps_mean: Vec<f64>,
    /// Inclusion frequency of each coefficient.
    pub z_mean: Vec<Vec<f64>>,
    pub n_kept: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<ChainTrace>,
}
