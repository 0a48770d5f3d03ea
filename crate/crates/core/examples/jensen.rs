//! Cost of randomness in the user count: Jensen gaps and their decay.

use mudiv::analysis::{jensen_gap, jensen_tightness_scan};
use mudiv::{ErrorModel, FadingModel, SnrPoint, UserCountModel};

fn main() -> mudiv::Result<()> {
    let fading = FadingModel::Rayleigh;
    let err = ErrorModel::exponential(1.0, 1.0)?;
    let rho = SnrPoint::from_db(6.0)?;
    for u in [
        UserCountModel::poisson(4.0)?,
        UserCountModel::geometric_with_mean(4.0)?,
        UserCountModel::zero_truncated_with_mean(4.0)?,
    ] {
        println!("{:<28} error gap {:.4e}", u.to_string(), jensen_gap(rho, &u, &fading, &err)?);
    }
    println!("\nPoisson users, 6 dB: λ·gap/P̄e(λ)");
    for p in jensen_tightness_scan(rho, &[4.0, 16.0, 64.0, 256.0], &fading, &err)? {
        println!("λ = {:>5}  gap {:.4e}  normalised {:.4}", p.lambda, p.gap, p.normalized_gap);
    }
    Ok(())
}
