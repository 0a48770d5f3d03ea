//! Ergodic capacity against the mean user count and its log-log growth.

use mudiv::metrics::{capacity_scaling, ergodic_capacity_fixed_n, ergodic_capacity_random_n};
use mudiv::{FadingModel, SnrPoint, UserCountModel};

fn main() -> mudiv::Result<()> {
    let fading = FadingModel::Rayleigh;
    let rho = SnrPoint::linear(10.0)?;
    println!("{:>8} {:>12} {:>12} {:>12} {:>14}", "λ", "fixed", "Poisson", "geometric", "log(1+ρ log λ)");
    for lambda in [2.0, 8.0, 32.0, 128.0, 1024.0] {
        println!(
            "{:>8} {:>12.6} {:>12.6} {:>12.6} {:>14.6}",
            lambda,
            ergodic_capacity_fixed_n(rho, lambda as u64, &fading)?,
            ergodic_capacity_random_n(rho, &UserCountModel::poisson(lambda)?, &fading)?,
            ergodic_capacity_random_n(rho, &UserCountModel::geometric_with_mean(lambda)?, &fading)?,
            capacity_scaling(rho, lambda)?,
        );
    }
    Ok(())
}
