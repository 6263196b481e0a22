use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{elicit_with, sweep, ChainData, ChainState, Hyperparams, PosteriorSummary, SamplerConfig, SweepOptions};
use crate::distributions::{chain_stream, RngStream};
use crate::linalg::Vec2;
use crate::transform::{self, default_j0, load_filters, CoeffTree, NoiseScale};
use crate::{Error, Result};

/// Thinned post-burn-in draws kept for diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub thin: usize,
    pub sigma2: Vec<f64>,
    /// `eps[t][i]`: draw `t` of `ε` at level `j0 + i`.
    pub eps: Vec<Vec<f64>>,
}

/// Runs the sampler from the default initial state.
pub fn run_chain(
    data: &CoeffTree,
    noise: &NoiseScale,
    hp: &Hyperparams,
    config: &SamplerConfig,
    rng: &mut RngStream,
) -> Result<PosteriorSummary> {
    let chain_data = ChainData::new(data, noise)?;
    hp.validate()?;
    if hp.a_j.len() != chain_data.levels.len() || hp.j0 != chain_data.j0 {
        return Err(Error::ShapeMismatch(
            "hyperparameters do not match the coefficient tree".into(),
        ));
    }
    let state = ChainState::initial(&chain_data, hp);
    run_chain_from(&chain_data, state, hp, config, rng, &SweepOptions::default())
}

/// Runs `config.iters` sweeps from `state`, averaging the draws after burn-in.
pub fn run_chain_from(
    data: &ChainData,
    mut state: ChainState,
    hp: &Hyperparams,
    config: &SamplerConfig,
    rng: &mut RngStream,
    opts: &SweepOptions,
) -> Result<PosteriorSummary> {
    config.validate()?;
    let mut theta_sum: Vec<Vec<Vec2>> = data.levels.iter().map(|l| vec![[0.0, 0.0]; l.coeffs.len()]).collect();
    let mut z_count: Vec<Vec<u64>> = data.levels.iter().map(|l| vec![0; l.coeffs.len()]).collect();
    let mut eps_sum = vec![0.0; data.levels.len()];
    let mut sigma2_sum = 0.0;
    let mut trace = config.trace_thin.map(|thin| ChainTrace {
        thin,
        ..ChainTrace::default()
    });

    for it in 0..config.iters {
        sweep(&mut state, data, hp, rng, opts).map_err(|e| match e {
            Error::Numerical { parameter, detail, .. } => Error::Numerical {
                sweep: it,
                parameter,
                detail,
            },
            other => other,
        })?;
        debug_assert!(state.check_invariants().is_ok(), "{:?}", state.check_invariants());
        if it < config.burnin {
            continue;
        }
        sigma2_sum += state.sigma2;
        for (i, st) in state.levels.iter().enumerate() {
            eps_sum[i] += st.eps;
            for k in 0..st.theta.len() {
                theta_sum[i][k][0] += st.theta[k][0];
                theta_sum[i][k][1] += st.theta[k][1];
                z_count[i][k] += st.z[k] as u64;
            }
        }
        if let Some(tr) = trace.as_mut() {
            if (it - config.burnin).is_multiple_of(tr.thin) {
                tr.sigma2.push(state.sigma2);
                tr.eps.push(state.levels.iter().map(|l| l.eps).collect());
            }
        }
    }

    let kept = (config.iters - config.burnin) as f64;
    Ok(PosteriorSummary {
        theta_mean: theta_sum
            .into_iter()
            .map(|level| level.into_iter().map(|t| [t[0] / kept, t[1] / kept]).collect())
            .collect(),
        sigma2_mean: sigma2_sum / kept,
        eps_mean: eps_sum.into_iter().map(|e| e / kept).collect(),
        z_mean: z_count
            .into_iter()
            .map(|level| level.into_iter().map(|c| c as f64 / kept).collect())
            .collect(),
        n_kept: config.iters - config.burnin,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiseResult {
    pub estimate: Vec<f64>,
    pub summary: PosteriorSummary,
    pub imag_residual: f64,
    pub hyperparams: Hyperparams,
    pub j0: usize,
}

/// Full pipeline on the default chain stream of `config.seed`.
pub fn denoise(signal: &[f64], config: &SamplerConfig) -> Result<DenoiseResult> {
    let mut rng = RngStream::new(config.seed, chain_stream(0));
    denoise_with_rng(signal, config, &mut rng)
}

/// Forward transform, noise scale, elicitation, chain, then synthesis of the
/// posterior-mean coefficients. Approximation coefficients pass through.
pub fn denoise_with_rng(signal: &[f64], config: &SamplerConfig, rng: &mut RngStream) -> Result<DenoiseResult> {
    config.validate()?;
    let filters = load_filters(&config.wavelet)?;
    let n = signal.len();
    let j0 = config.j0.unwrap_or_else(|| default_j0(n));
    let tree = transform::forward(signal, j0, &filters)?;
    let noise = transform::noise_scale(n, j0, &filters)?;
    let hp = elicit_with(&tree, &noise, &config.elicit_options())?;
    let summary = run_chain(&tree, &noise, &hp, config, rng)?;

    let mut shrunk = tree.clone();
    for (level, means) in shrunk.details.iter_mut().zip(&summary.theta_mean) {
        for (c, m) in level.iter_mut().zip(means) {
            *c = Complex64::new(m[0], m[1]);
        }
    }
    let rec = transform::inverse(&shrunk, &filters)?;
    Ok(DenoiseResult {
        estimate: rec.signal,
        summary,
        imag_residual: rec.imag_residual,
        hyperparams: hp,
        j0,
    })
}
