//! Generalized inverse Gaussian variates.
//!
//! `GIG(a, b, p)` has density proportional to `x^(p-1) exp(-(a x + b/x) / 2)`.
//! With `ω = √(ab)` and `η = √(b/a)`, `X = η Y` where `Y` has the one-parameter
//! density `y^(λ-1) exp(-ω (y + 1/y) / 2)`, and negative indices are handled by
//! `GIG(-λ) = 1 / GIG(λ)`.
//!
//! Three rejection schemes cover the `(λ, ω)` plane:
//!
//! * ratio-of-uniforms with mode shift (Dagpunar 1989, Lehner 1989) for large
//!   `λ` or `ω`;
//! * ratio-of-uniforms without shift in the intermediate region;
//! * a three-piece hat over a concave transform (Hörmann & Leydold 2014) for
//!   `λ < 1` with small `ω`, where the first two degrade.
//!
//! The choice of region follows Hörmann & Leydold so that the expected number
//! of trials stays bounded. The `v_jk` update needs `λ = 1/2` with `ω` ranging
//! over many decades, which crosses every region.

use rand::Rng;
use std::f64::consts::PI;

fn mode(lambda: f64, omega: f64) -> f64 {
    if lambda >= 1.0 {
        ((lambda - 1.0).hypot(omega) + (lambda - 1.0)) / omega
    } else {
        omega / ((1.0 - lambda).hypot(omega) + (1.0 - lambda))
    }
}

fn rou_shift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);

    // the bounding rectangle comes from the two real roots of a cubic
    let a = -(2.0 * (lambda + 1.0) / omega + xm);
    let b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
    let c = xm;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let phi = (-q / (2.0 * (-(p * p * p) / 27.0).sqrt())).clamp(-1.0, 1.0).acos();
    let fak = 2.0 * (-p / 3.0).sqrt();
    let y1 = fak * (phi / 3.0).cos() - a / 3.0;
    let y2 = fak * (phi / 3.0 + 4.0 / 3.0 * PI).cos() - a / 3.0;
    let u_plus = (y1 - xm) * (t * y1.ln() - s * (y1 + 1.0 / y1) - nc).exp();
    let u_minus = (y2 - xm) * (t * y2.ln() - s * (y2 + 1.0 / y2) - nc).exp();

    loop {
        let u = u_minus + rng.random::<f64>() * (u_plus - u_minus);
        let v: f64 = rng.random();
        let x = u / v + xm;
        if x > 0.0 && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn rou_noshift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lambda + 1.0) + (lambda + 1.0).hypot(omega)) / omega;
    let um = (0.5 * (lambda + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * rng.random::<f64>();
        let v: f64 = rng.random();
        let x = u / v;
        if x > 0.0 && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

/// Rejection from a hat that is constant on `(0, x0]`, `k1 x^(λ-1)` up to
/// `max(x0, 2/ω)` and exponential beyond. Requires `0 <= λ < 1`, `ω > 0`.
fn concave_hat<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let xm = mode(lambda, omega);
    let x0 = omega / (1.0 - lambda);
    let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let area0 = k0 * x0;

    let (k1, area1, k2, area2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        area1 = 0.0;
        k2 = x0.powf(lambda - 1.0);
        area2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        area1 = if lambda == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lambda * ((2.0 / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (2.0 / omega).powf(lambda - 1.0);
        area2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = area0 + area1 + area2;
    let tail_start = x0.max(2.0 / omega);

    loop {
        let mut v = total * rng.random::<f64>();
        let (x, hx) = if v <= area0 {
            (x0 * v / area0, k0)
        } else {
            v -= area0;
            if v <= area1 {
                if lambda == 0.0 {
                    let x = omega * (omega.exp() * v).exp();
                    (x, k1 / x)
                } else {
                    let x = (x0.powf(lambda) + lambda / k1 * v).powf(1.0 / lambda);
                    (x, k1 * x.powf(lambda - 1.0))
                }
            } else {
                v -= area1;
                let x = -2.0 / omega * ((-omega / 2.0 * tail_start).exp() - omega / (2.0 * k2) * v).ln();
                (x, k2 * (-omega / 2.0 * x).exp())
            }
        };
        let u = rng.random::<f64>() * hx;
        if u.ln() <= (lambda - 1.0) * x.ln() - omega / 2.0 * (x + 1.0 / x) {
            return x;
        }
    }
}

/// Draws from the standardized density `y^(λ-1) exp(-ω (y + 1/y) / 2)`,
/// `λ >= 0`, `ω > 0`.
pub(crate) fn standard_gig<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    debug_assert!(lambda >= 0.0 && omega > 0.0);
    if lambda > 2.0 || omega > 3.0 {
        rou_shift(lambda, omega, rng)
    } else if lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        rou_noshift(lambda, omega, rng)
    } else {
        concave_hat(lambda, omega, rng)
    }
}
