//! Laplace-transform ordering of user laws and complete monotonicity in N.

use mudiv::analysis::{check_cm, check_cmd, lt_order_check, ordering_consequences, LT_GRID, LT_TOL};
use mudiv::metrics::{avg_error_fixed_n, ergodic_capacity_fixed_n};
use mudiv::{ErrorModel, FadingModel, SnrPoint, UserCountModel};

fn main() -> mudiv::Result<()> {
    let fading = FadingModel::Rayleigh;
    let err = ErrorModel::exponential(1.0, 1.0)?;
    let geom = UserCountModel::geometric(0.2)?;
    let pois = UserCountModel::poisson(4.0)?;

    let verdict = lt_order_check(&geom, &pois, LT_GRID, LT_TOL)?;
    println!("{geom} vs {pois}: {:?}", verdict.relation);
    let rhos: Vec<SnrPoint> = [0.0, 10.0, 20.0].iter().map(|&d| SnrPoint::from_db(d)).collect::<Result<_, _>>()?;
    let (_, rows) = ordering_consequences(&geom, &pois, &fading, &err, &rhos)?;
    for r in rows {
        println!(
            "{:>5} dB  error {:.4e} ≥ {:.4e}  capacity {:.4} ≤ {:.4}  holds={}",
            r.snr_db, r.error_x, r.error_y, r.capacity_x, r.capacity_y, r.holds
        );
    }

    let rho = SnrPoint::from_db(6.0)?;
    let errors: Vec<f64> = (1..=40).map(|n| avg_error_fixed_n(rho, n, &fading, &err)).collect::<Result<_, _>>()?;
    let caps: Vec<f64> = (1..=40).map(|n| ergodic_capacity_fixed_n(rho, n, &fading)).collect::<Result<_, _>>()?;
    println!("\nerror rate completely monotone to order 4: {}", check_cm(&errors, 4, 1e-9)?.passed());
    println!("capacity increments completely monotone to order 3: {}", check_cmd(&caps, 3, 1e-9)?.passed());
    Ok(())
}
