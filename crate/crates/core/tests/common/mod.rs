//! Numerical oracles shared by the integration tests. Nothing here calls into
//! the library's own special-function code.
#![allow(dead_code)]

/// Composite Simpson rule on `[a, b]` with `2m` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫₀^∞ f(x) dx` through `x = e^u` over `u ∈ [lo, hi]`.
pub fn integrate_positive(f: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> f64 {
    simpson(|u| f(u.exp()) * u.exp(), lo, hi, m)
}

/// `K_p(x) = ½ (x/2)^p ∫₀^∞ exp(-t - x²/(4t)) t^{-p-1} dt`.
pub fn bessel_k_oracle(p: f64, x: f64) -> f64 {
    let integrand = |t: f64| (-t - x * x / (4.0 * t)).exp() * t.powf(-p - 1.0);
    0.5 * (x / 2.0).powf(p) * integrate_positive(integrand, -40.0, 6.0, 20_000)
}

/// Normalized density and CDF of an unnormalized density on `(0, ∞)`,
/// tabulated on a log grid.
pub struct TabulatedCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl TabulatedCdf {
    pub fn new(log_density: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Self {
        let du = (hi - lo) / (points - 1) as f64;
        let us: Vec<f64> = (0..points).map(|i| lo + i as f64 * du).collect();
        let peak = us
            .iter()
            .map(|&u| log_density(u.exp()) + u)
            .fold(f64::NEG_INFINITY, f64::max);
        // mass per unit u
        let w: Vec<f64> = us.iter().map(|&u| (log_density(u.exp()) + u - peak).exp()).collect();
        let mut cdf = vec![0.0; points];
        for i in 1..points {
            cdf[i] = cdf[i - 1] + 0.5 * du * (w[i - 1] + w[i]);
        }
        let total = cdf[points - 1];
        cdf.iter_mut().for_each(|c| *c /= total);
        let m1 = simpson_samples(&w, &us, |u| u.exp(), du) / total;
        let m2 = simpson_samples(&w, &us, |u| (2.0 * u).exp(), du) / total;
        TabulatedCdf {
            xs: us.iter().map(|u| u.exp()).collect(),
            cdf,
            mean: m1,
            variance: m2 - m1 * m1,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&v| v < x);
        if i >= self.xs.len() {
            return 1.0;
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
        self.cdf[i - 1] + t * (self.cdf[i] - self.cdf[i - 1])
    }
}

fn simpson_samples(w: &[f64], us: &[f64], g: impl Fn(f64) -> f64, du: f64) -> f64 {
    // trapezoid is accurate enough on the fine grids used here
    let mut s = 0.0;
    for i in 1..w.len() {
        s += 0.5 * du * (w[i - 1] * g(us[i - 1]) + w[i] * g(us[i]));
    }
    s
}

/// Kolmogorov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
}

/// z-score of a sample mean against `mean`.
pub fn mean_z(x: &[f64], mean: f64) -> f64 {
    let (m, v) = mean_var(x);
    (m - mean) / (v / x.len() as f64).sqrt()
}
