//! Diversity order from the error-rate slope and regular-variation exponents.

use mudiv::analysis::{diversity_order_fit, rayleigh_t_exponent, rv_exponent_estimate, t_function};
use mudiv::metrics::avg_error_random_n;
use mudiv::{ErrorModel, FadingModel, SnrPoint, UserCountModel};

fn main() -> mudiv::Result<()> {
    let fading = FadingModel::Rayleigh;
    let err = ErrorModel::exponential(1.0, 1.0)?;
    for users in [UserCountModel::zero_truncated_poisson(2.0)?, UserCountModel::deterministic(2)] {
        let curve: Vec<(f64, f64)> = (0..=18)
            .map(|i| {
                let db = 2.5 * i as f64;
                Ok((db, avg_error_random_n(SnrPoint::from_db(db)?, &users, &fading, &err)?))
            })
            .collect::<mudiv::Result<_>>()?;
        println!("{:<16} slope over 35–45 dB: {:.4}", users.to_string(), diversity_order_fit(&curve, (35.0, 45.0))?);
    }

    for rho in [1.0, 2.0, 4.0] {
        let snr = SnrPoint::linear(rho)?;
        let est = rv_exponent_estimate(|u| t_function(u, snr, &err, &fading), 2.0)?;
        println!("ρ = {rho}: estimated exponent {est:.4}, exact {:.4}", rayleigh_t_exponent(snr, &err));
    }
    Ok(())
}
