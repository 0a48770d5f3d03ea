//! Law of the best user's gain when the number of contenders is random.

use rand::Rng;
use rand_distr::Distribution;

use crate::error::{domain, Result};
use crate::fading::{FadingModel, GainSampler};
use crate::usercount::{CountSampler, UserCountModel};

/// Above this many users a draw of the maximum is taken by inverting
/// `F^N` instead of materialising `N` gains.
const INVERSION_THRESHOLD: u64 = 100_000;

/// Distribution of `γ* = max(γ_1, …, γ_N)` with `N` random and `γ* = 0`
/// when `N = 0`. Its CDF is `U_N(F(x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestGainLaw {
    pub fading: FadingModel,
    pub users: UserCountModel,
}

impl BestGainLaw {
    pub fn new(fading: FadingModel, users: UserCountModel) -> Self {
        Self { fading, users }
    }

    /// Probability mass sitting at `γ* = 0`, i.e. `P[N = 0]`.
    pub fn atom_at_zero(&self) -> f64 {
        self.users.pmf(0)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return domain(format!("gain must be non-negative, got {x}"));
        }
        Ok(self.cdf_at(x))
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return domain(format!("gain must be non-negative, got {x}"));
        }
        Ok(self.sf_at(x))
    }

    /// Density of the absolutely continuous part, `U'_N(F(x)) f(x)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return domain(format!("density needs a positive gain, got {x}"));
        }
        Ok(self.density_at(x))
    }

    pub(crate) fn cdf_at(&self, x: f64) -> f64 {
        self.users.pgf_at(self.fading.cdf_at(x))
    }

    pub(crate) fn sf_at(&self, x: f64) -> f64 {
        self.users.pgf_complement_at(self.fading.sf_at(x))
    }

    pub(crate) fn density_at(&self, x: f64) -> f64 {
        let f = self.fading.pdf_at(x);
        if f == 0.0 {
            return 0.0;
        }
        self.users.pgf_prime_at(self.fading.cdf_at(x)) * f
    }

    pub fn sampler(&self) -> BestGainSampler {
        BestGainSampler {
            fading: self.fading,
            counts: self.users.sampler(),
            gains: self.fading.sampler(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }
}

/// Draws `γ*`: a user count, then the largest of that many gains.
#[derive(Debug, Clone)]
pub struct BestGainSampler {
    fading: FadingModel,
    counts: CountSampler,
    gains: GainSampler,
}

impl BestGainSampler {
    /// Largest of `n` independent gains.
    pub fn max_of<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> f64 {
        if n == 0 {
            return 0.0;
        }
        if n > INVERSION_THRESHOLD {
            // P[γ* > x] = 1 − F(x)^n = q  ⇔  F(x) = u^{1/n}
            let u = 1.0 - rng.random::<f64>();
            let q = -(u.ln() / n as f64).exp_m1();
            if q <= 0.0 {
                return 0.0;
            }
            return self
                .fading
                .upper_quantile(q.min(1.0))
                .expect("tail probability in (0, 1]");
        }
        let mut best = 0.0f64;
        for _ in 0..n {
            best = best.max(self.gains.sample(rng));
        }
        best
    }
}

impl Distribution<f64> for BestGainSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let n = self.counts.sample(rng);
        self.max_of(n, rng)
    }
}

/// Outage probability `P[γ* ≤ x] = exp(−λ (1 − F(x)))` for Poisson users.
pub fn outage_poisson(lambda: f64, fading: &FadingModel, x: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("Poisson mean must be positive, got {lambda}"));
    }
    Ok((-lambda * fading.sf(x)?).exp())
}

/// Extreme-value normalisation `(a, b)` with `b = F⁻¹(1 − 1/λ)` and
/// `a = 1/(λ f(b))`, so that `(γ* − b)/a` is close to Gumbel for large `λ`.
pub fn gumbel_constants(fading: &FadingModel, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return domain(format!("Gumbel normalisation needs a mean above 1, got {lambda}"));
    }
    let b = fading.upper_quantile(1.0 / lambda)?;
    let a = 1.0 / (lambda * fading.pdf_at(b));
    Ok((a, b))
}

/// Standard Gumbel CDF `exp(−e^{−x})`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}
