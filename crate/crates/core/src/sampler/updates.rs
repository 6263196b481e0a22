//! Full-conditional updates, one per parameter block.

use rand::Rng;

use super::{ChainData, ChainState, Hyperparams, V_PRIOR_SCALE, V_PRIOR_SHAPE};
use crate::distributions::{
    sample_bernoulli, sample_beta, sample_binormal, sample_gamma, sample_gig, sample_inv_gamma, sample_inv_wishart,
    GigParams, InvGammaParams, InvWishartParams,
};
use crate::linalg::{Sym2, Vec2};
use crate::{Error, Result};

/// Knobs for the joint-distribution harness. The default is the correct
/// sampler; anything else deliberately breaks it.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepOptions {
    /// Added to the shape of the `σ²` full conditional.
    pub sigma2_shape_offset: f64,
}

fn numerical(parameter: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Numerical {
        sweep: 0,
        parameter: parameter.into(),
        detail: detail.into(),
    }
}

/// `IG(a + n, [1/b + ½ Σ (d - θ)' Σ_j⁻¹ (d - θ)]⁻¹)`
pub fn sigma2_conditional(state: &ChainState, data: &ChainData, hp: &Hyperparams) -> Result<InvGammaParams> {
    let mut quad = 0.0;
    for (level, st) in data.levels.iter().zip(&state.levels) {
        for (d, theta) in level.coeffs.iter().zip(&st.theta) {
            let r = [d[0] - theta[0], d[1] - theta[1]];
            quad += level.sigma_inv.quad_form(r);
        }
    }
    let n = data.detail_count() as f64;
    InvGammaParams::new(hp.a + n, 1.0 / (1.0 / hp.b + 0.5 * quad))
}

pub fn update_sigma2<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &ChainData,
    hp: &Hyperparams,
    rng: &mut R,
) -> Result<f64> {
    sigma2_step(state, data, hp, rng, 0.0)
}

fn sigma2_step<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &ChainData,
    hp: &Hyperparams,
    rng: &mut R,
    shape_offset: f64,
) -> Result<f64> {
    let mut params = sigma2_conditional(state, data, hp).map_err(|e| numerical("sigma2", e.to_string()))?;
    params.shape += shape_offset;
    let draw = sample_inv_gamma(&params, rng);
    if !(draw > 0.0) || !draw.is_finite() {
        return Err(numerical("sigma2", format!("draw {draw} from {params:?}")));
    }
    state.sigma2 = draw;
    Ok(draw)
}

/// `P(z = 1 | …) = ε m / ((1 - ε) f + ε m)`, evaluated in log space.
///
/// `sigma2_sigma` is `σ²Σ_j` and `logf` is `ln f(d | 0, σ²Σ_j)`.
pub fn inclusion_probability(d: Vec2, sigma2_sigma: &Sym2, logf: f64, v: f64, c: &Sym2, eps: f64) -> Result<f64> {
    if eps <= 0.0 {
        return Ok(0.0);
    }
    if eps >= 1.0 {
        return Ok(1.0);
    }
    let cov = sigma2_sigma.add(&c.scale(v));
    let det = cov.det();
    let inv = cov
        .inverse()
        .ok_or_else(|| numerical("z", format!("marginal covariance {cov:?} is singular")))?;
    let logm = -(2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln() - 0.5 * inv.quad_form(d);
    let l1 = eps.ln() + logm;
    let l0 = (-eps).ln_1p() + logf;
    let top = l0.max(l1);
    let (e0, e1) = ((l0 - top).exp(), (l1 - top).exp());
    let p = e1 / (e0 + e1);
    if p.is_finite() {
        Ok(p)
    } else {
        Err(numerical("z", format!("inclusion probability is {p}")))
    }
}

/// Draws every `z_jk`, then every `ε_j ~ Be(1 + Σz, 1 + Σ(1 - z))`.
pub fn update_z_eps<R: Rng + ?Sized>(state: &mut ChainState, data: &ChainData, rng: &mut R) -> Result<()> {
    let sigma2 = state.sigma2;
    for (level, st) in data.levels.iter().zip(state.levels.iter_mut()) {
        let s = level.sigma.scale(sigma2);
        let s_inv = level.sigma_inv.scale(1.0 / sigma2);
        let log_norm = -(2.0 * std::f64::consts::PI).ln() - 0.5 * s.det().ln();
        for k in 0..level.coeffs.len() {
            let d = level.coeffs[k];
            let logf = log_norm - 0.5 * s_inv.quad_form(d);
            let p = inclusion_probability(d, &s, logf, st.v[k], &st.c, st.eps)?;
            st.z[k] = sample_bernoulli(p, rng);
        }
    }
    for st in state.levels.iter_mut() {
        let active = st.z.iter().filter(|&&z| z).count() as f64;
        let inactive = st.z.len() as f64 - active;
        st.eps = sample_beta(1.0 + active, 1.0 + inactive, rng);
    }
    Ok(())
}

/// Mean and covariance of `θ | z = 1`:
/// `Σ̃ = (Σ_j⁻¹/σ² + C_j⁻¹/v)⁻¹`, `μ̃ = Σ̃ Σ_j⁻¹ d / σ²`.
pub fn theta_conditional(d: Vec2, sigma2: f64, sigma_inv: &Sym2, v: f64, c_inv: &Sym2) -> Result<(Vec2, Sym2)> {
    let precision = sigma_inv.scale(1.0 / sigma2).add(&c_inv.scale(1.0 / v));
    let cov = precision
        .inverse()
        .filter(|m| m.is_spd())
        .ok_or_else(|| numerical("theta", format!("posterior precision {precision:?} is not SPD")))?;
    let weighted = sigma_inv.mul_vec(d);
    let mean = cov.mul_vec([weighted[0] / sigma2, weighted[1] / sigma2]);
    Ok((mean, cov))
}

pub fn update_theta<R: Rng + ?Sized>(state: &mut ChainState, data: &ChainData, rng: &mut R) -> Result<()> {
    let sigma2 = state.sigma2;
    for (level, st) in data.levels.iter().zip(state.levels.iter_mut()) {
        let c_inv =
            st.c.inverse()
                .ok_or_else(|| numerical(format!("theta (level {})", level.j), "C_j is singular"))?;
        for k in 0..level.coeffs.len() {
            if !st.z[k] {
                st.theta[k] = [0.0, 0.0];
                continue;
            }
            let (mean, cov) = theta_conditional(level.coeffs[k], sigma2, &level.sigma_inv, st.v[k], &c_inv)?;
            st.theta[k] = sample_binormal(mean, &cov, rng)
                .map_err(|e| numerical(format!("theta[{}][{k}]", level.j), e.to_string()))?;
        }
    }
    Ok(())
}

/// `Ga(3/2, 8)` when `z = 0`; `GIG(1/4, θ'C⁻¹θ, 1/2)` when `z = 1`.
///
/// A vanishing `θ'C⁻¹θ` with `z = 1` (probability zero) falls back to the
/// prior draw.
pub fn update_v<R: Rng + ?Sized>(state: &mut ChainState, rng: &mut R) -> Result<()> {
    for (i, st) in state.levels.iter_mut().enumerate() {
        let c_inv =
            st.c.inverse()
                .ok_or_else(|| numerical(format!("v (level index {i})"), "C_j is singular"))?;
        for k in 0..st.v.len() {
            let q = if st.z[k] { c_inv.quad_form(st.theta[k]) } else { 0.0 };
            st.v[k] = if st.z[k] && q > f64::MIN_POSITIVE && q.is_finite() {
                sample_gig(&GigParams { a: 0.25, b: q, p: 0.5 }, rng)
            } else {
                sample_gamma(V_PRIOR_SHAPE, V_PRIOR_SCALE, rng)
            };
        }
    }
    Ok(())
}

/// `IW(A_j + Σ z θθ'/v, w + Σ z)` for one level.
pub fn c_conditional(theta: &[Vec2], z: &[bool], v: &[f64], a_j: &Sym2, w: f64) -> Result<InvWishartParams> {
    let mut scale = *a_j;
    let mut dof = w;
    for ((t, &zk), &vk) in theta.iter().zip(z).zip(v) {
        if zk {
            scale = scale.add(&Sym2::outer(*t).scale(1.0 / vk));
            dof += 1.0;
        }
    }
    InvWishartParams::new(scale, dof)
}

pub fn update_c<R: Rng + ?Sized>(state: &mut ChainState, hp: &Hyperparams, rng: &mut R) -> Result<()> {
    for (i, st) in state.levels.iter_mut().enumerate() {
        let params = c_conditional(&st.theta, &st.z, &st.v, &hp.a_j[i], hp.w)
            .map_err(|e| numerical(format!("C (level {})", hp.j0 + i), e.to_string()))?;
        let draw = sample_inv_wishart(&params, rng);
        if !draw.is_spd() {
            return Err(numerical(
                format!("C (level {})", hp.j0 + i),
                format!("draw {draw:?} is not SPD"),
            ));
        }
        st.c = draw;
    }
    Ok(())
}

/// One deterministic-scan sweep: `σ²`, `z`, `ε`, `θ`, `v`, `C`.
pub fn sweep<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &ChainData,
    hp: &Hyperparams,
    rng: &mut R,
    opts: &SweepOptions,
) -> Result<()> {
    sigma2_step(state, data, hp, rng, opts.sigma2_shape_offset)?;
    update_z_eps(state, data, rng)?;
    update_theta(state, data, rng)?;
    update_v(state, rng)?;
    update_c(state, hp, rng)?;
    Ok(())
}
