//! Average error rate of the best user: quadrature, closed form and
//! high-SNR asymptote.

use mudiv::metrics::{avg_error_fixed_n, avg_error_random_n, high_snr_asymptote, poisson_rayleigh_error_closed};
use mudiv::{ErrorModel, FadingModel, SnrPoint, UserCountModel};

fn main() -> mudiv::Result<()> {
    let fading = FadingModel::Rayleigh;
    let err = ErrorModel::exponential(1.0, 1.0)?;
    let users = UserCountModel::poisson(4.0)?;
    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "dB", "Poisson quad", "closed", "asymptote", "fixed N=4");
    for db in [0.0, 5.0, 10.0, 20.0, 30.0] {
        let rho = SnrPoint::from_db(db)?;
        println!(
            "{:>6} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            db,
            avg_error_random_n(rho, &users, &fading, &err)?,
            poisson_rayleigh_error_closed(rho, 4.0, &err)?,
            high_snr_asymptote(rho, &users, &fading, &err),
            avg_error_fixed_n(rho, 4, &fading, &err)?,
        );
    }

    let qpsk: ErrorModel = "qf:a=1,eta=2".parse()?;
    let rho = SnrPoint::from_db(10.0)?;
    let nak = FadingModel::nakagami(2.0)?;
    println!(
        "\n{qpsk} over {nak}, Poisson(4), 10 dB: {:.6e}",
        avg_error_random_n(rho, &users, &nak, &qpsk)?
    );
    Ok(())
}
