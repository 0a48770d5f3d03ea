//! Performance of multi-user diversity systems whose number of contending
//! users is itself random.
//!
//! The best user's gain has CDF `U_N(F(x))`: the probability generating
//! function of the user count composed with the single-user gain CDF. On top
//! of that law the crate evaluates outage, average error rate and ergodic
//! capacity (exact quadrature, closed forms for Poisson users over Rayleigh
//! fading, high-SNR asymptotes), verifies the structural properties
//! (complete monotonicity, Laplace-transform ordering, Jensen gaps, diversity
//! order) and cross-checks every analytic path with a seeded Monte-Carlo
//! engine.
//!
//! ```
//! use mudiv::{BestGainLaw, ErrorModel, FadingModel, SnrPoint, UserCountModel};
//! use mudiv::metrics::{avg_error_random_n, poisson_rayleigh_error_closed};
//!
//! let users = UserCountModel::poisson(1.0).unwrap();
//! let err = ErrorModel::exponential(1.0, 1.0).unwrap();
//! let rho = SnrPoint::linear(1.0).unwrap();
//! let quad = avg_error_random_n(rho, &users, &FadingModel::Rayleigh, &err).unwrap();
//! let closed = poisson_rayleigh_error_closed(rho, 1.0, &err).unwrap();
//! assert!((quad - closed).abs() < 1e-9);
//! assert!((closed - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
//! # let _ = BestGainLaw::new(FadingModel::Rayleigh, users);
//! ```

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fading;
pub mod metrics;
pub mod montecarlo;
pub mod numerics;
pub mod selection;
pub mod usercount;

pub use error::{Error, Result};
pub use fading::FadingModel;
pub use metrics::{ErrorForm, ErrorModel, SnrPoint};
pub use montecarlo::{SimConfig, SimResult};
pub use selection::BestGainLaw;
pub use usercount::UserCountModel;
