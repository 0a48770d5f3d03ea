//! Distribution of the best user's gain when the user count is random.

use mudiv::selection::outage_poisson;
use mudiv::{BestGainLaw, FadingModel, UserCountModel};

fn main() -> mudiv::Result<()> {
    let fading = FadingModel::Rayleigh;
    let models = [
        UserCountModel::deterministic(4),
        UserCountModel::poisson(4.0)?,
        UserCountModel::geometric_with_mean(4.0)?,
        UserCountModel::zero_truncated_with_mean(4.0)?,
    ];
    println!("outage P[γ* ≤ x], mean user count 4");
    print!("{:<28}", "users");
    for x in [0.0, 0.5, 1.0, 2.0, 4.0] {
        print!("{:>12}", format!("x={x}"));
    }
    println!();
    for u in &models {
        let law = BestGainLaw::new(fading, *u);
        print!("{:<28}", u.to_string());
        for x in [0.0, 0.5, 1.0, 2.0, 4.0] {
            print!("{:>12.6}", law.cdf(x)?);
        }
        println!();
    }

    // Poisson users over Rayleigh fading: exp(−λ e^{−x})
    let x = 1.5;
    let law = BestGainLaw::new(fading, UserCountModel::poisson(4.0)?);
    println!(
        "\nPoisson(4) at x = {x}: composed {:.15}, closed {:.15}",
        law.cdf(x)?,
        outage_poisson(4.0, &fading, x)?
    );
    println!("atom at zero: {:.6}", law.atom_at_zero());
    Ok(())
}
