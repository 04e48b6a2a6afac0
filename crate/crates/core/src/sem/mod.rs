//! Linear-Gaussian structural causal models.
//!
//! Each node is `X_j = Σ_{i ∈ Pa(j)} θ_ij X_i + ε_j` with `ε_j ~ N(0, σ_j²)`.
//! A perfect intervention on a target replaces the mechanism of every node in
//! the target by an independent `N(μ, τ²)` draw. All structural means are zero
//! and regressions have no intercept.

mod dataset;
mod design;
mod generate;
mod mle;
mod model;
mod scm;

pub use dataset::Dataset;
pub use design::Design;
pub use generate::{chain_scm, er_scm, random_weight, WEIGHT_RANGE};
pub use mle::{log_likelihood, mle_fit, mle_fit_stats, LocalFit, MleParams, NoiseModel, SufficientStats};
pub use model::CompiledModel;
pub use scm::{InterventionDist, LinearGaussianScm};

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;
