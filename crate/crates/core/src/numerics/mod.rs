//! Shared numerical kernel: special functions, adaptive quadrature on
//! finite and semi-infinite domains, forward differences and a bracketed
//! root finder.

mod differences;
mod quadrature;
mod roots;
mod special;

pub use differences::forward_differences;
pub use quadrature::{integrate, integrate_semi_infinite, integrate_semi_infinite_scaled, QuadratureSpec};
pub use roots::brent_root;
pub use special::{
    gamma, gaussian_q, ln_factorial, ln_gamma, ln_lower_incomplete_gamma, lower_incomplete_gamma,
    marcum_p1, marcum_q1, poisson_weight, regularized_gamma_p, regularized_gamma_q,
    upper_incomplete_gamma,
};
pub(crate) use special::marcum_pair;
