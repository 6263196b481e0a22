use cgsws::distributions::{sample_normal, RngStream};
use cgsws::transform::{
    build_matrix, forward, inverse, load_filters, noise_covariance, noise_scale, CoeffTree, ComplexFilterPair,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// Periodic analysis operator `m/2 × m` for taps `f`: row `k` holds `f_l` at
/// column `(2k + l) mod m`.
fn analysis(f: &[Complex64], m: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(m / 2, m);
    for k in 0..m / 2 {
        for (l, &c) in f.iter().enumerate() {
            out[(k, (2 * k + l) % m)] += c;
        }
    }
    out
}

/// `W` assembled from products of filter-bank matrices, rows ordered as
/// approximation, then details coarse to fine.
fn filter_bank_matrix(n: usize, j0: usize, filters: &ComplexFilterPair) -> DMatrix<Complex64> {
    let levels = n.trailing_zeros() as usize;
    let mut blocks = Vec::new();
    let mut low = DMatrix::<Complex64>::identity(n, n);
    for j in (j0..levels).rev() {
        let m = 1 << (j + 1);
        blocks.push(analysis(filters.high_pass(), m) * &low);
        low = analysis(filters.low_pass(), m) * &low;
    }
    blocks.push(low);
    blocks.reverse();
    let mut w = DMatrix::zeros(n, n);
    let mut row = 0;
    for b in blocks {
        w.view_mut((row, 0), (b.nrows(), n)).copy_from(&b);
        row += b.nrows();
    }
    w
}

#[test]
fn dense_matrix_matches_filter_bank_oracle() {
    let f = load_filters("scd3").unwrap();
    for &(n, j0) in &[(8, 1), (32, 2), (64, 3)] {
        let w = build_matrix(n, j0, &f).unwrap();
        let oracle = filter_bank_matrix(n, j0, &f);
        for i in 0..n {
            for j in 0..n {
                assert!((w.get(i, j) - oracle[(i, j)]).norm() < 1e-13, "n={n} ({i},{j})");
            }
        }
        let gram = &oracle * oracle.adjoint();
        let eye = DMatrix::<Complex64>::identity(n, n);
        assert!((gram - eye).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
    }
}

#[test]
fn noise_scale_from_oracle_matrix() {
    let f = load_filters("scd3").unwrap();
    let (n, j0) = (64, 2);
    let oracle = filter_bank_matrix(n, j0, &f);
    let wwt = &oracle * oracle.transpose();
    let ns = noise_scale(n, j0, &f).unwrap();
    let mut row = 1 << j0;
    for (i, s) in ns.levels.iter().enumerate() {
        for k in 0..(1 << (j0 + i)) {
            let q = wwt[(row + k, row + k)];
            assert!((s.xx - 0.5 * (1.0 + q.re)).abs() < 1e-12);
            assert!((s.yy - 0.5 * (1.0 - q.re)).abs() < 1e-12);
            assert!((s.xy - 0.5 * q.im).abs() < 1e-12);
        }
        row += 1 << (j0 + i);
    }
    let dense = noise_covariance(&build_matrix(n, j0, &f).unwrap(), j0).unwrap();
    for (a, b) in dense.levels.iter().zip(&ns.levels) {
        assert!(a.max_abs_diff(b) < 1e-12);
    }
}

#[test]
fn noise_covariance_is_correlated_and_unit_trace() {
    let f = load_filters("scd3").unwrap();
    let ns = noise_scale(1024, 3, &f).unwrap();
    for s in &ns.levels {
        assert!((s.trace() - 1.0).abs() < 1e-10);
        assert!(s.is_spd());
        assert!(s.xy.abs() > 1e-3, "complex filters correlate Re and Im: {s:?}");
    }
}

#[test]
fn constant_signal_has_no_details() {
    let f = load_filters("scd3").unwrap();
    let tree = forward(&[2.5; 256], 3, &f).unwrap();
    assert!(tree.details.iter().flatten().all(|c| c.norm() < 1e-10));
    // c · 2^{(J - J0)/2}
    let expected = 2.5 * 2f64.powf(2.5);
    assert!(tree
        .approx
        .iter()
        .all(|c| (c.re - expected).abs() < 1e-10 && c.im.abs() < 1e-10));
}

#[test]
fn impulse_energy() {
    let f = load_filters("scd3").unwrap();
    let mut x = vec![0.0; 8];
    x[0] = 1.0;
    assert!((forward(&x, 1, &f).unwrap().energy() - 1.0).abs() < 1e-10);
}

#[test]
fn all_filters_reconstruct() {
    for name in ["scd3", "haar", "db2"] {
        let f = load_filters(name).unwrap();
        let mut rng = RngStream::new(4, 0);
        let x: Vec<f64> = (0..128).map(|_| sample_normal(&mut rng)).collect();
        let rec = inverse(&forward(&x, 2, &f).unwrap(), &f).unwrap();
        let err = x
            .iter()
            .zip(&rec.signal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{name}: {err}");
    }
}

#[test]
fn unknown_filter_lists_supported() {
    let msg = load_filters("nosuchfilter").unwrap_err().to_string();
    assert!(msg.contains("scd3"), "{msg}");
}

#[test]
fn shape_errors() {
    let f = load_filters("scd3").unwrap();
    assert!(forward(&[0.0; 12], 1, &f).is_err());
    assert!(forward(&[0.0; 16], 4, &f).is_err());
    assert!(forward(&[0.0; 16], 0, &f).is_err());
    let mut tree = CoeffTree::zeros(16, 1).unwrap();
    tree.details[1].pop();
    assert!(inverse(&tree, &f).is_err());
}

fn signal_strategy() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (3usize..=9).prop_flat_map(|levels| (prop::collection::vec(-100.0f64..100.0, 1 << levels), 1usize..levels))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn round_trip_and_parseval((x, j0) in signal_strategy()) {
        let f = load_filters("scd3").unwrap();
        let tree = forward(&x, j0, &f).unwrap();
        let energy: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((tree.energy() - energy).abs() <= 1e-9 * energy.max(1.0));
        let rec = inverse(&tree, &f).unwrap();
        prop_assert!(rec.imag_residual < 1e-9 * energy.sqrt().max(1.0));
        for (a, b) in x.iter().zip(&rec.signal) {
            prop_assert!((a - b).abs() < 1e-9 * energy.sqrt().max(1.0));
        }
    }

    #[test]
    fn linearity((x, j0) in signal_strategy(), s in -5.0f64..5.0) {
        let f = load_filters("scd3").unwrap();
        let y: Vec<f64> = x.iter().rev().cloned().collect();
        let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + s * b).collect();
        let (tx, ty, tc) = (forward(&x, j0, &f).unwrap(), forward(&y, j0, &f).unwrap(), forward(&combo, j0, &f).unwrap());
        for ((a, b), c) in tx.flatten().iter().zip(ty.flatten()).zip(tc.flatten()) {
            prop_assert!((a + b * s - c).norm() < 1e-9);
        }
    }

    #[test]
    fn flatten_round_trip((x, j0) in signal_strategy()) {
        let f = load_filters("scd3").unwrap();
        let tree = forward(&x, j0, &f).unwrap();
        prop_assert_eq!(CoeffTree::from_flat(tree.n, j0, &tree.flatten()).unwrap(), tree);
    }
}
