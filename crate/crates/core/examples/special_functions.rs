//! Special functions used by the fading laws and the closed forms.

use mudiv::numerics::{
    gamma, gaussian_q, integrate_semi_infinite, ln_gamma, lower_incomplete_gamma, marcum_q1,
    regularized_gamma_p, QuadratureSpec,
};

fn main() -> mudiv::Result<()> {
    println!("Γ(5)        = {}", gamma(5.0));
    println!("ln Γ(100)   = {:.12}", ln_gamma(100.0));
    println!("γ(2, 1)     = {:.15}", lower_incomplete_gamma(2.0, 1.0)?);
    println!("P(2.5, 3)   = {:.15}", regularized_gamma_p(2.5, 3.0)?);
    println!("Q(1)        = {:.15}", gaussian_q(1.0));
    println!("Q(10)       = {:.6e}", gaussian_q(10.0));
    println!("Q₁(1, 2)    = {:.15}", marcum_q1(1.0, 2.0)?);

    // ∫₀^∞ x e^{-x} dx = 1
    let spec = QuadratureSpec::default();
    let v = integrate_semi_infinite(|x| x * (-x).exp(), &spec)?;
    println!("∫ x e^-x dx = {v:.15}");
    Ok(())
}
