//! Joint-distribution check of the Gibbs sampler.
//!
//! The marginal-conditional simulator draws parameters from the prior. The
//! successive-conditional simulator alternates one sampler sweep with a fresh
//! data draw from the likelihood. Both target the prior marginal of the
//! parameters, so the means of any test function must agree; disagreement
//! means some conditional is wrong.

use serde::{Deserialize, Serialize};

use crate::distributions::{
    sample_bernoulli, sample_binormal, sample_gamma, sample_inv_gamma, sample_inv_wishart, InvGammaParams,
    InvWishartParams, RngStream,
};
use crate::linalg::Sym2;
use crate::sampler::{
    sweep, ChainData, ChainState, Hyperparams, LevelState, SweepOptions, V_PRIOR_SCALE, V_PRIOR_SHAPE,
};
use crate::transform::{load_filters, noise_scale, CoeffTree};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct GewekeConfig {
    pub draws: usize,
    pub n: usize,
    pub j0: usize,
    pub a: f64,
    pub b: f64,
    pub w: f64,
    /// Inverse Wishart scale shared by every level.
    pub a_j: Sym2,
    pub seed: u64,
    /// Batches for the batch-means standard error of the dependent chain.
    pub batches: usize,
    pub sweep: SweepOptions,
}

impl Default for GewekeConfig {
    fn default() -> Self {
        GewekeConfig {
            draws: 100_000,
            n: 16,
            j0: 1,
            a: 4.0,
            b: 1.0,
            w: 10.0,
            a_j: Sym2::new(7.0, 2.0, 5.0),
            seed: 0,
            batches: 50,
            sweep: SweepOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GewekeStat {
    pub name: String,
    pub marginal_mean: f64,
    pub successive_mean: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GewekeReport {
    pub draws: usize,
    pub seed: u64,
    pub stats: Vec<GewekeStat>,
}

impl GewekeReport {
    pub fn max_abs_z(&self) -> f64 {
        self.stats.iter().map(|s| s.z.abs()).fold(0.0, f64::max)
    }
}

fn statistics(state: &ChainState) -> Vec<f64> {
    let mut out = vec![state.sigma2];
    out.extend(state.levels.iter().map(|l| l.eps));
    out.extend(state.levels.iter().map(|l| l.c.trace().ln()));
    let (on, total) = state.levels.iter().fold((0usize, 0usize), |(on, total), l| {
        (on + l.z.iter().filter(|&&z| z).count(), total + l.z.len())
    });
    out.push(on as f64 / total as f64);
    out
}

fn stat_names(data: &ChainData) -> Vec<String> {
    let mut out = vec!["sigma2".to_string()];
    out.extend(data.levels.iter().map(|l| format!("eps[{}]", l.j)));
    out.extend(data.levels.iter().map(|l| format!("ln tr C[{}]", l.j)));
    out.push("mean z".to_string());
    out
}

fn prior_draw(data: &ChainData, hp: &Hyperparams, rng: &mut RngStream) -> Result<ChainState> {
    let sigma2 = sample_inv_gamma(&InvGammaParams::new(hp.a, hp.b)?, rng);
    let levels = data
        .levels
        .iter()
        .zip(&hp.a_j)
        .map(|(level, a_j)| {
            let eps: f64 = rand::Rng::random(rng);
            let c = sample_inv_wishart(&InvWishartParams::new(*a_j, hp.w)?, rng);
            let k = level.coeffs.len();
            let mut st = LevelState {
                eps,
                c,
                theta: vec![[0.0, 0.0]; k],
                z: vec![false; k],
                v: vec![0.0; k],
            };
            for i in 0..k {
                st.v[i] = sample_gamma(V_PRIOR_SHAPE, V_PRIOR_SCALE, rng);
                st.z[i] = sample_bernoulli(eps, rng);
                if st.z[i] {
                    st.theta[i] = sample_binormal([0.0, 0.0], &c.scale(st.v[i]), rng)?;
                }
            }
            Ok(st)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainState { sigma2, levels })
}

fn draw_data(data: &mut ChainData, state: &ChainState, rng: &mut RngStream) -> Result<()> {
    for (level, st) in data.levels.iter_mut().zip(&state.levels) {
        let cov = level.sigma.scale(state.sigma2);
        for (d, theta) in level.coeffs.iter_mut().zip(&st.theta) {
            *d = sample_binormal(*theta, &cov, rng)?;
        }
    }
    Ok(())
}

fn mean_and_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Squared standard error of the mean of an autocorrelated series.
fn batch_means_var(x: &[f64], batches: usize) -> f64 {
    let size = x.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| x[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    mean_and_var(&means).1 / batches as f64
}

pub fn geweke_harness(config: &GewekeConfig) -> Result<GewekeReport> {
    let filters = load_filters("scd3")?;
    let noise = noise_scale(config.n, config.j0, &filters)?;
    let mut data = ChainData::new(&CoeffTree::zeros(config.n, config.j0)?, &noise)?;
    let hp = Hyperparams {
        a: config.a,
        b: config.b,
        w: config.w,
        a_j: vec![config.a_j; data.levels.len()],
        j0: config.j0,
    };
    hp.validate()?;
    let names = stat_names(&data);
    let batches = config.batches.clamp(2, config.draws.max(2) / 2);

    let mut marginal: Vec<Vec<f64>> = vec![Vec::with_capacity(config.draws); names.len()];
    let mut rng = RngStream::new(config.seed, 0);
    for _ in 0..config.draws {
        let state = prior_draw(&data, &hp, &mut rng)?;
        for (series, s) in marginal.iter_mut().zip(statistics(&state)) {
            series.push(s);
        }
    }

    let mut successive: Vec<Vec<f64>> = vec![Vec::with_capacity(config.draws); names.len()];
    let mut rng = RngStream::new(config.seed, 1);
    let mut state = prior_draw(&data, &hp, &mut rng)?;
    draw_data(&mut data, &state, &mut rng)?;
    for _ in 0..config.draws {
        sweep(&mut state, &data, &hp, &mut rng, &config.sweep)?;
        draw_data(&mut data, &state, &mut rng)?;
        for (series, s) in successive.iter_mut().zip(statistics(&state)) {
            series.push(s);
        }
    }

    let stats = names
        .into_iter()
        .zip(marginal.iter().zip(&successive))
        .map(|(name, (m, s))| {
            let (m_mean, m_var) = mean_and_var(m);
            let (s_mean, _) = mean_and_var(s);
            let se2 = m_var / m.len() as f64 + batch_means_var(s, batches);
            GewekeStat {
                name,
                marginal_mean: m_mean,
                successive_mean: s_mean,
                z: (m_mean - s_mean) / se2.sqrt(),
            }
        })
        .collect();
    Ok(GewekeReport {
        draws: config.draws,
        seed: config.seed,
        stats,
    })
}
