//! Single-user gain laws: distribution functions, quantiles and sampling.

use mudiv::FadingModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mudiv::Result<()> {
    let laws = [
        FadingModel::Rayleigh,
        FadingModel::nakagami(2.0)?,
        FadingModel::rician(3.0)?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!("{:<14} {:>10} {:>10} {:>10} {:>10} {:>12}", "law", "F(1)", "f(1)", "median", "d", "sample mean");
    for law in &laws {
        let n = 200_000;
        let mean = (0..n).map(|_| law.sample(&mut rng)).sum::<f64>() / n as f64;
        println!(
            "{:<14} {:>10.6} {:>10.6} {:>10.6} {:>10.2} {:>12.5}",
            law.to_string(),
            law.cdf(1.0)?,
            law.pdf(1.0)?,
            law.quantile(0.5)?,
            law.rv_exponent(),
            mean
        );
    }
    let text = "nakagami:m=2";
    let parsed: FadingModel = text.parse()?;
    println!("parsed `{text}` -> {parsed}");
    Ok(())
}
