use cgsws::baselines::{
    ceb_level_loglik, ceb_posterior_mean, ceb_shrink, cmws_hard, fit_ceb_level, threshold_statistic, CebLevelParams,
    ThresholdRule,
};
use cgsws::bench::{rescale_snr, sample_signal, TestSignal};
use cgsws::distributions::{sample_bernoulli, sample_binormal, sample_normal, RngStream};
use cgsws::linalg::{Sym2, Vec2};
use cgsws::sampler::estimate_sigma2_mad;
use cgsws::transform::{forward, load_filters, noise_scale, CoeffTree, NoiseScale};
use num_complex::Complex64;
use proptest::prelude::*;

fn noisy_tree(seed: u64) -> (CoeffTree, NoiseScale, f64) {
    let f = load_filters("scd3").unwrap();
    let truth = rescale_snr(&sample_signal(TestSignal::Bumps, 512).unwrap(), 5.0).unwrap();
    let mut rng = RngStream::new(seed, 0);
    let y: Vec<f64> = truth.iter().map(|t| t + sample_normal(&mut rng)).collect();
    let tree = forward(&y, 3, &f).unwrap();
    let s2 = estimate_sigma2_mad(&tree).unwrap();
    (tree, noise_scale(512, 3, &f).unwrap(), s2)
}

#[test]
fn hard_thresholding_is_keep_or_kill() {
    let (tree, noise, s2) = noisy_tree(1);
    let rule = ThresholdRule::universal(512);
    let out = cmws_hard(&tree, s2, &noise, &rule).unwrap();
    assert_eq!(out.approx, tree.approx);
    let (mut kept, mut killed) = (0, 0);
    for ((level_in, level_out), s) in tree.details.iter().zip(&out.details).zip(&noise.levels) {
        let inv = s.scale(s2).inverse().unwrap();
        for (a, b) in level_in.iter().zip(level_out) {
            if threshold_statistic(*a, &inv) > rule.lambda {
                assert_eq!(a, b);
                kept += 1;
            } else {
                assert_eq!(*b, Complex64::new(0.0, 0.0));
                killed += 1;
            }
        }
    }
    assert!(kept > 0 && killed > 0);
}

#[test]
fn baselines_are_deterministic() {
    let (tree, noise, s2) = noisy_tree(2);
    let rule = ThresholdRule::universal(512);
    assert_eq!(
        cmws_hard(&tree, s2, &noise, &rule).unwrap(),
        cmws_hard(&tree, s2, &noise, &rule).unwrap()
    );
    assert_eq!(
        ceb_posterior_mean(&tree, s2, &noise).unwrap(),
        ceb_posterior_mean(&tree, s2, &noise).unwrap()
    );
}

#[test]
fn ceb_shrinks_every_coefficient() {
    let (tree, noise, s2) = noisy_tree(3);
    let (out, params) = ceb_posterior_mean(&tree, s2, &noise).unwrap();
    assert_eq!(params.len(), tree.details.len());
    for (((din, dout), s), p) in tree.details.iter().zip(&out.details).zip(&noise.levels).zip(&params) {
        assert!((0.0..=1.0).contains(&p.eps) && p.v.is_spd());
        let inv = s.scale(s2).inverse().unwrap();
        for (a, b) in din.iter().zip(dout) {
            assert!(threshold_statistic(*b, &inv) <= threshold_statistic(*a, &inv) * (1.0 + 1e-12));
        }
    }
}

/// Coarse grid over (ε, V) with V = diag(x, y) rotated by the sample
/// correlation; the optimizer must do at least as well.
#[test]
fn ceb_fit_beats_grid_search() {
    let noise = Sym2::new(0.6, 0.2, 0.4);
    let slab = Sym2::new(9.0, 3.0, 4.0);
    let mut rng = RngStream::new(4, 0);
    let coeffs: Vec<Vec2> = (0..256)
        .map(|_| {
            let theta = if sample_bernoulli(0.3, &mut rng) {
                sample_binormal([0.0, 0.0], &slab, &mut rng).unwrap()
            } else {
                [0.0, 0.0]
            };
            let e = sample_binormal([0.0, 0.0], &noise, &mut rng).unwrap();
            [theta[0] + e[0], theta[1] + e[1]]
        })
        .collect();
    let fitted = fit_ceb_level(&coeffs, &noise);
    let best_fit = ceb_level_loglik(&coeffs, &noise, fitted.eps, &fitted.v);

    let mut best_grid = f64::NEG_INFINITY;
    let mut arg = (0.0, Sym2::ZERO);
    for ie in 1..20 {
        let eps = ie as f64 / 20.0;
        for ix in 0..25 {
            for iy in 0..25 {
                for ir in -4..=4 {
                    let x = 0.5 * 1.25f64.powi(ix);
                    let y = 0.5 * 1.25f64.powi(iy);
                    let r = ir as f64 / 5.0;
                    let v = Sym2::new(x, r * (x * y).sqrt(), y);
                    let ll = ceb_level_loglik(&coeffs, &noise, eps, &v);
                    if ll > best_grid {
                        best_grid = ll;
                        arg = (eps, v);
                    }
                }
            }
        }
    }
    assert!(
        best_fit >= best_grid - 1e-6,
        "optimizer {best_fit} < grid {best_grid} at {arg:?}"
    );
    assert!((fitted.eps - 0.3).abs() < 0.15, "{fitted:?}");
}

#[test]
fn weight_limits() {
    let s = Sym2::new(0.5, 0.1, 0.5);
    let zero = CebLevelParams {
        eps: 0.0,
        v: Sym2::IDENTITY,
    };
    assert_eq!(ceb_shrink([2.0, 1.0], &s, &zero), [0.0, 0.0]);
    let flat = CebLevelParams {
        eps: 1.0,
        v: Sym2::IDENTITY.scale(1e12),
    };
    let t = ceb_shrink([2.0, 1.0], &s, &flat);
    assert!((t[0] - 2.0).abs() < 1e-9 && (t[1] - 1.0).abs() < 1e-9);
}

fn spd() -> impl Strategy<Value = Sym2> {
    (0.05f64..5.0, -0.95f64..0.95, 0.05f64..5.0).prop_map(|(x, r, y)| Sym2::new(x, r * (x * y).sqrt(), y))
}

proptest! {
    #[test]
    fn ceb_contracts_in_noise_norm(
        d in (-20.0f64..20.0, -20.0f64..20.0),
        s in spd(),
        v in spd(),
        eps in 0.0f64..=1.0,
    ) {
        let d = [d.0, d.1];
        let out = ceb_shrink(d, &s, &CebLevelParams { eps, v });
        let inv = s.inverse().unwrap();
        prop_assert!(inv.quad_form(out) <= inv.quad_form(d) * (1.0 + 1e-10) + 1e-12);
    }

    #[test]
    fn hard_threshold_keeps_or_kills(
        values in prop::collection::vec(-10.0f64..10.0, 64),
        lambda in 0.0f64..30.0,
    ) {
        let f = load_filters("scd3").unwrap();
        let tree = forward(&values, 2, &f).unwrap();
        let noise = noise_scale(64, 2, &f).unwrap();
        let out = cmws_hard(&tree, 1.0, &noise, &ThresholdRule::new(lambda).unwrap()).unwrap();
        for (a, b) in tree.details.iter().flatten().zip(out.details.iter().flatten()) {
            prop_assert!(a == b || *b == Complex64::new(0.0, 0.0));
        }
    }
}
