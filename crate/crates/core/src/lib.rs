//! Censored estimators of the correlation coefficient `r` of the bivariate
//! exponential (squared-envelope) distribution, together with the Cramér-Rao
//! bound and the constrained MSE bound that accounts for `0 <= r <= 1`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its arguments; file formats, the CLI and the parallel Monte
//! Carlo sweep live in the `bexcorr` crate.
//!
//! Module map:
//!
//! * [`specfun`]: complete elliptic integrals (modulus convention), `ln I0`,
//!   `I1/I0`, and the standard normal pdf/cdf.
//! * [`model`]: parameters, the 4x4 Gaussian covariance, joint log-pdfs and
//!   population moments of the Rayleigh and exponential pairs.
//! * [`sampling`]: reproducible paired samples addressed by `(seed, stream)`.
//! * [`estimators`]: sample moments and the three censored estimators.
//! * [`bounds`]: score, Fisher information, CRB, and the censored-Gaussian
//!   MSE bound.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod linalg;
mod math;
pub mod quadrature;
pub mod sum;

pub mod bounds;
pub mod estimators;
pub mod model;
pub mod sampling;
pub mod specfun;

pub use error::{Error, Result};

pub use bounds::{
    bound_curve, crb, fisher_info, fisher_info_mc, mse_bound, score, BoundCurve, BoundPoint,
    FisherMatrix, FisherMethod, MonteCarloFisher, MseBound, QuadratureOrder,
};
pub use estimators::{
    cos2_stat, estimate_r1, estimate_r2, estimate_r3, eta_transform, pearson_stat,
    sample_moments, xi_transform, Estimate, Estimator, Family, SampleMoments,
};
pub use model::{
    build_covariance, cos2_limit, logpdf_exp, logpdf_rayleigh, pearson_rayleigh_pop,
    pop_moments_exp, pop_moments_rayleigh, GaussCovariance, ModelParams, MomentSet,
};
pub use sampling::{sample_pairs, PairedSample, SeedSpec};
