//! Closed-form 2×2 symmetric matrix algebra.
//!
//! Every covariance in the model is 2×2 (the real and imaginary parts of a
//! complex coefficient), so the hot path avoids a general matrix library.

use serde::{Deserialize, Serialize};

/// A point in the plane, used for (Re, Im) coefficient pairs.
pub type Vec2 = [f64; 2];

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };
    pub const IDENTITY: Sym2 = Sym2 {
        xx: 1.0,
        xy: 0.0,
        yy: 1.0,
    };

    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub const fn diag(xx: f64, yy: f64) -> Self {
        Sym2 { xx, xy: 0.0, yy }
    }

    /// `v v'`
    pub fn outer(v: Vec2) -> Self {
        Sym2 {
            xx: v[0] * v[0],
            xy: v[0] * v[1],
            yy: v[1] * v[1],
        }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn scale(&self, s: f64) -> Self {
        Sym2 {
            xx: self.xx * s,
            xy: self.xy * s,
            yy: self.yy * s,
        }
    }

    pub fn add(&self, other: &Sym2) -> Self {
        Sym2 {
            xx: self.xx + other.xx,
            xy: self.xy + other.xy,
            yy: self.yy + other.yy,
        }
    }

    pub fn sub(&self, other: &Sym2) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Inverse, or `None` when the determinant is not strictly positive.
    ///
    /// Only used on matrices that must be SPD, so a non-positive determinant
    /// is treated as singular.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if !(det > 0.0) || !det.is_finite() {
            return None;
        }
        Some(Sym2 {
            xx: self.yy / det,
            xy: -self.xy / det,
            yy: self.xx / det,
        })
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// `v' M v`
    pub fn quad_form(&self, v: Vec2) -> f64 {
        self.xx * v[0] * v[0] + 2.0 * self.xy * v[0] * v[1] + self.yy * v[1] * v[1]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let r = half_diff.hypot(self.xy);
        (mean - r, mean + r)
    }

    pub fn is_spd(&self) -> bool {
        self.xx > 0.0 && self.det() > 0.0 && self.xx.is_finite() && self.yy.is_finite()
    }

    /// Lower Cholesky factor `(l11, l21, l22)` with `M = L L'`.
    pub fn cholesky(&self) -> Option<(f64, f64, f64)> {
        if !(self.xx > 0.0) {
            return None;
        }
        let l11 = self.xx.sqrt();
        let l21 = self.xy / l11;
        let rem = self.yy - l21 * l21;
        if !(rem > 0.0) || !rem.is_finite() {
            return None;
        }
        Some((l11, l21, rem.sqrt()))
    }

    pub fn max_abs_diff(&self, other: &Sym2) -> f64 {
        (self.xx - other.xx)
            .abs()
            .max((self.xy - other.xy).abs())
            .max((self.yy - other.yy).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Sym2::new(2.0, 0.5, 1.0);
        let inv = m.inverse().unwrap();
        let v = [0.3, -1.7];
        let back = inv.mul_vec(m.mul_vec(v));
        assert!((back[0] - v[0]).abs() < 1e-14 && (back[1] - v[1]).abs() < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        assert!(Sym2::new(1.0, 1.0, 1.0).inverse().is_none());
        assert!(Sym2::diag(1.0, 0.0).cholesky().is_none());
    }

    #[test]
    fn eigenvalues_match_trace_and_det() {
        let m = Sym2::new(3.0, -1.2, 0.4);
        let (lo, hi) = m.eigenvalues();
        assert!((lo + hi - m.trace()).abs() < 1e-12);
        assert!((lo * hi - m.det()).abs() < 1e-12);
        assert!(lo <= hi);
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = Sym2::new(2.0, 0.5, 1.0);
        let (a, b, c) = m.cholesky().unwrap();
        assert!((a * a - m.xx).abs() < 1e-14);
        assert!((a * b - m.xy).abs() < 1e-14);
        assert!((b * b + c * c - m.yy).abs() < 1e-14);
    }
}
