//! Bayesian nonparametric regression with complex-valued wavelets.
//!
//! A noisy, equispaced signal is mapped to the complex wavelet domain with a
//! symmetric complex Daubechies filter. Each detail coefficient is treated as a
//! bivariate (Re, Im) observation whose noise covariance `σ²Σ_j` is derived
//! from the transform matrix. A hierarchical model places a point-mass /
//! bivariate double-exponential mixture prior on the coefficients, with
//! hyperpriors on the noise variance, the mixing weights and the per-level
//! scale matrices. The posterior mean is estimated with a Gibbs sampler and
//! mapped back to the signal domain.
//!
//! Layout:
//!
//! * [`transform`]: filters, periodic pyramid transform, dense transform
//!   matrix and the per-level noise covariance.
//! * [`distributions`]: random variate generators and densities used by the
//!   sampler, including the generalized inverse Gaussian.
//! * [`sampler`]: hyperparameter elicitation, the full-conditional updates
//!   and chain orchestration.
//! * [`baselines`]: phase-preserving hard thresholding and an empirical-Bayes
//!   bivariate posterior mean.
//! * [`bench`]: test functions, SNR protocol, AMSE harness and a joint
//!   distribution (Geweke) correctness harness.
//! * [`cli`]: the `cgsws` command-line front end.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod distributions;
mod error;
pub mod linalg;
pub mod sampler;
pub mod transform;

pub use error::{Error, Result};
