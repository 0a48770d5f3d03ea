//! Seeded Monte Carlo estimates next to their analytic counterparts.

use mudiv::metrics::{avg_error_random_n, ergodic_capacity_random_n};
use mudiv::montecarlo::{mc_capacity, mc_error_rate, mc_outage};
use mudiv::{BestGainLaw, ErrorModel, FadingModel, SimConfig, SnrPoint, UserCountModel};

fn main() -> mudiv::Result<()> {
    let fading = FadingModel::nakagami(2.0)?;
    let users = UserCountModel::geometric_with_mean(4.0)?;
    let law = BestGainLaw::new(fading, users);
    let err = ErrorModel::q_function(1.0, 2.0)?;
    let rho = SnrPoint::from_db(6.0)?;
    let cfg = SimConfig::new(1_000_000, 42, 4)?;

    let e = mc_error_rate(rho, &law, &err, &cfg);
    let c = mc_capacity(rho, &law, &cfg);
    let o = mc_outage(1.0, &law, &cfg)?;
    let z = |mc: f64, se: f64, exact: f64| (mc - exact) / se;
    let pe = avg_error_random_n(rho, &users, &fading, &err)?;
    let cap = ergodic_capacity_random_n(rho, &users, &fading)?;
    println!("error    mc {:.6e} ± {:.1e}  exact {pe:.6e}  z {:+.2}", e.mean, e.stderr, z(e.mean, e.stderr, pe));
    println!("capacity mc {:.6} ± {:.1e}  exact {cap:.6}  z {:+.2}", c.mean, c.stderr, z(c.mean, c.stderr, cap));
    println!("outage   mc {:.6} ± {:.1e}  exact {:.6}", o.mean, o.stderr, law.cdf(1.0)?);

    let single = mc_error_rate(rho, &law, &err, &SimConfig::new(1_000_000, 42, 1)?);
    println!("1 worker vs 4 workers bit-identical: {}", single.mean.to_bits() == e.mean.to_bits());
    Ok(())
}
