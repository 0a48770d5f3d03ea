//! Extreme-value limit of the normalised best gain.

use mudiv::montecarlo::{mc_gumbel_ks, mc_gumbel_ks_fixed};
use mudiv::selection::gumbel_constants;
use mudiv::{FadingModel, SimConfig};

fn main() -> mudiv::Result<()> {
    let cfg = SimConfig::new(100_000, 3, 4)?;
    for fading in [FadingModel::Rayleigh, FadingModel::nakagami(2.0)?] {
        println!("{fading}");
        for lambda in [10.0, 100.0, 1000.0] {
            let (a, b) = gumbel_constants(&fading, lambda)?;
            println!(
                "  λ = {lambda:>6}  a = {a:.4}  b = {b:.4}  KS Poisson {:.4}  KS fixed {:.4}",
                mc_gumbel_ks(lambda, &fading, &cfg)?,
                mc_gumbel_ks_fixed(lambda as u64, &fading, &cfg)?
            );
        }
    }
    Ok(())
}
