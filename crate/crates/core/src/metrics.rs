//! Average error rate and ergodic capacity of the selected user.
//!
//! Error rates are computed as `∫_0^∞ B(s) G(s/ρ) ds` with `B = −Pe'` and `G`
//! the best-gain CDF. This is the Stieltjes integral `∫ Pe(ρx) dG(x)` after
//! integration by parts: it carries the atom of `G` at zero automatically
//! and, at high SNR, integrates a small positive quantity instead of a
//! difference of nearly equal ones.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::fading::FadingModel;
use crate::numerics::{
    gamma, gaussian_q, integrate, integrate_semi_infinite_scaled, ln_lower_incomplete_gamma,
    QuadratureSpec,
};
use crate::selection::BestGainLaw;
use crate::usercount::UserCountModel;

/// Tolerance on the truncated capacity integrand `1 − G(x)`.
const CAPACITY_TAIL: f64 = 1e-14;

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_subdivisions: 4000,
    }
}

/// Average SNR `ρ` on the linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrPoint(f64);

impl SnrPoint {
    pub fn linear(rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return domain(format!("average SNR must be positive and finite, got {rho}"));
        }
        Ok(Self(rho))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::linear(10f64.powf(db / 10.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorForm {
    /// `Pe(s) = α e^{−ηs}`
    Exp,
    /// `Pe(s) = α Q(√(ηs))`
    Q,
}

/// Instantaneous error probability of a modulation over AWGN as a function
/// of the received SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    pub form: ErrorForm,
    pub alpha: f64,
    pub eta: f64,
}

impl ErrorModel {
    pub fn new(form: ErrorForm, alpha: f64, eta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !(eta > 0.0) || !eta.is_finite() {
            return domain(format!(
                "error model needs positive finite constants, got alpha={alpha}, eta={eta}"
            ));
        }
        Ok(Self { form, alpha, eta })
    }

    pub fn exponential(alpha: f64, eta: f64) -> Result<Self> {
        Self::new(ErrorForm::Exp, alpha, eta)
    }

    pub fn q_function(alpha: f64, eta: f64) -> Result<Self> {
        Self::new(ErrorForm::Q, alpha, eta)
    }

    /// Default constants for each form: `(1, 1)` for the exponential form,
    /// `(1, 2)` (BPSK) for the Q form.
    pub fn default_for(form: ErrorForm) -> Self {
        match form {
            ErrorForm::Exp => Self { form, alpha: 1.0, eta: 1.0 },
            ErrorForm::Q => Self { form, alpha: 1.0, eta: 2.0 },
        }
    }

    /// `Pe(s)` without clamping.
    pub(crate) fn pe_at(&self, s: f64) -> f64 {
        match self.form {
            ErrorForm::Exp => self.alpha * (-self.eta * s).exp(),
            ErrorForm::Q => self.alpha * gaussian_q((self.eta * s).sqrt()),
        }
    }

    /// `B(s) = −Pe'(s)`; infinite at `s = 0` for the Q form.
    pub(crate) fn b_at(&self, s: f64) -> f64 {
        match self.form {
            ErrorForm::Exp => self.alpha * self.eta * (-self.eta * s).exp(),
            ErrorForm::Q => {
                0.5 * self.alpha * (self.eta / (2.0 * PI * s)).sqrt() * (-0.5 * self.eta * s).exp()
            }
        }
    }

    /// `Pe(0)`: the error rate when nobody is scheduled.
    pub fn error_at_zero(&self) -> f64 {
        self.pe_at(0.0)
    }

    /// Natural decay scale of `B`, used to map quadrature onto `(0, 1)`.
    fn decay_scale(&self) -> f64 {
        match self.form {
            ErrorForm::Exp => 1.0 / self.eta,
            ErrorForm::Q => 2.0 / self.eta,
        }
    }
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self::default_for(ErrorForm::Exp)
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.form {
            ErrorForm::Exp => "exp",
            ErrorForm::Q => "qf",
        };
        write!(f, "{tag}:a={},eta={}", self.alpha, self.eta)
    }
}

impl FromStr for ErrorModel {
    type Err = Error;

    /// `exp:a=<α>,eta=<η>` or `qf:a=<α>,eta=<η>`; omitted keys take the
    /// form's defaults.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let form = match head.to_ascii_lowercase().as_str() {
            "exp" => ErrorForm::Exp,
            "qf" | "q" => ErrorForm::Q,
            other => return Err(Error::Parse(format!("unknown error model `{other}`"))),
        };
        let mut model = Self::default_for(form);
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in error model, got `{item}`")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{value}` in error model")))?;
            match key.trim() {
                "a" | "alpha" => model.alpha = v,
                "eta" => model.eta = v,
                other => return Err(Error::Parse(format!("unknown error-model key `{other}`"))),
            }
        }
        Self::new(model.form, model.alpha, model.eta).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `Pe(s)`. Values above one (possible when `α > 1`) are clamped to one
/// with a warning.
pub fn instantaneous_error(err: &ErrorModel, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("instantaneous SNR must be non-negative, got {s}"));
    }
    let v = err.pe_at(s);
    if v > 1.0 {
        log::warn!("{err} gives error probability {v} at s={s}; clamping to 1");
        return Ok(1.0);
    }
    Ok(v)
}

/// `B(s) = −dPe/ds` for `s > 0`.
pub fn error_derivative_mag(err: &ErrorModel, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("derivative needs a positive SNR, got {s}"));
    }
    Ok(err.b_at(s))
}

/// `∫_0^∞ B(s) G(s/ρ) ds` for a best-gain CDF `G` on `[0, ∞)`.
fn error_from_cdf(rho: SnrPoint, err: &ErrorModel, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let rho = rho.value();
    integrate_semi_infinite_scaled(
        |s| {
            let g = cdf(s / rho);
            if g == 0.0 {
                0.0
            } else {
                err.b_at(s) * g
            }
        },
        err.decay_scale(),
        &quad_spec(),
    )
}

/// `F(x)^n` for real `n > 0`, accurate when `F` is close to one.
fn cdf_power(fading: &FadingModel, n: f64, x: f64) -> f64 {
    (n * fading.ln_cdf_at(x)).exp()
}

/// `1 − F(x)^n` without cancellation.
fn cdf_power_complement(fading: &FadingModel, n: f64, x: f64) -> f64 {
    -(n * fading.ln_cdf_at(x)).exp_m1()
}

/// Average error rate with exactly `n ≥ 1` users.
pub fn avg_error_fixed_n(rho: SnrPoint, n: u64, fading: &FadingModel, err: &ErrorModel) -> Result<f64> {
    if n == 0 {
        return domain("fixed user count must be at least 1");
    }
    avg_error_real_n(rho, n as f64, fading, err)
}

/// Average error rate with `F^N` for a real exponent `N > 0`.
pub fn avg_error_real_n(rho: SnrPoint, n: f64, fading: &FadingModel, err: &ErrorModel) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return domain(format!("user count must be positive, got {n}"));
    }
    error_from_cdf(rho, err, |x| cdf_power(fading, n, x))
}

/// Average error rate averaged over the user-count law; an empty cell
/// contributes `Pe(0)`.
pub fn avg_error_random_n(
    rho: SnrPoint,
    users: &UserCountModel,
    fading: &FadingModel,
    err: &ErrorModel,
) -> Result<f64> {
    let law = BestGainLaw::new(*fading, *users);
    error_from_cdf(rho, err, |x| law.cdf_at(x))
}

/// `α λ^{−ηρ} γ(ηρ + 1, λ) + α e^{−λ}`: Poisson users over Rayleigh fading
/// with the exponential error form.
pub fn poisson_rayleigh_error_closed(rho: SnrPoint, lambda: f64, err: &ErrorModel) -> Result<f64> {
    if err.form != ErrorForm::Exp {
        return Err(Error::Form);
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("Poisson mean must be positive, got {lambda}"));
    }
    let c = err.eta * rho.value();
    let ln_g = ln_lower_incomplete_gamma(c + 1.0, lambda)?;
    Ok(err.alpha * (ln_g - c * lambda.ln()).exp() + err.alpha * (-lambda).exp())
}

/// Truncation point beyond which `tail(x) < CAPACITY_TAIL`.
fn capacity_cutoff(mean: f64, tail: impl Fn(f64) -> f64) -> Result<f64> {
    let mut x = mean.max(1.0).ln() + 10.0;
    while tail(x) >= CAPACITY_TAIL {
        x *= 2.0;
        if x > 1e12 {
            return Err(Error::Instability("capacity integrand does not decay".into()));
        }
    }
    Ok(x)
}

fn capacity_from_tail(rho: SnrPoint, mean: f64, tail: impl Fn(f64) -> f64) -> Result<f64> {
    let rho = rho.value();
    let upper = capacity_cutoff(mean, &tail)?;
    let spec = quad_spec();
    // the 1/(1+ρx) factor varies on the scale 1/ρ; give it its own panel
    let knee = (1.0 / rho).min(upper / 2.0);
    let head = integrate(|x| tail(x) / (1.0 + rho * x), 0.0, knee, &spec)?;
    let body = integrate(|x| tail(x) / (1.0 + rho * x), knee, upper, &spec)?;
    Ok(rho * (head + body))
}

/// Ergodic capacity in nats with exactly `n ≥ 1` users,
/// `ρ ∫ (1 − F^n(x)) / (1 + ρx) dx`.
pub fn ergodic_capacity_fixed_n(rho: SnrPoint, n: u64, fading: &FadingModel) -> Result<f64> {
    if n == 0 {
        return domain("fixed user count must be at least 1");
    }
    ergodic_capacity_real_n(rho, n as f64, fading)
}

/// Capacity with `F^N` for a real exponent `N > 0`.
pub fn ergodic_capacity_real_n(rho: SnrPoint, n: f64, fading: &FadingModel) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return domain(format!("user count must be positive, got {n}"));
    }
    capacity_from_tail(rho, n, |x| cdf_power_complement(fading, n, x))
}

/// Ergodic capacity averaged over the user-count law; an empty cell
/// contributes zero.
pub fn ergodic_capacity_random_n(rho: SnrPoint, users: &UserCountModel, fading: &FadingModel) -> Result<f64> {
    let law = BestGainLaw::new(*fading, *users);
    capacity_from_tail(rho, users.mean(), |x| law.sf_at(x))
}

/// Constants `(C₁, C₂)` of the high-SNR expansion for minimum user count `k0`.
pub fn asymptote_constants(err: &ErrorModel, k0: u64, d: f64) -> (f64, f64) {
    let kd = k0 as f64 * d;
    match err.form {
        ErrorForm::Exp => (err.alpha * gamma(kd + 1.0), 1.0 / err.eta),
        ErrorForm::Q => (err.alpha * gamma(kd + 0.5) / (2.0 * PI.sqrt()), 2.0 / err.eta),
    }
}

/// High-SNR equivalent `P[N = k₀] C₁ F^{k₀}(C₂/ρ)`, where `k₀` is the
/// smallest possible user count and `d` the fading's exponent at the origin.
pub fn high_snr_asymptote(rho: SnrPoint, users: &UserCountModel, fading: &FadingModel, err: &ErrorModel) -> f64 {
    let k0 = users.min_support();
    let (c1, c2) = asymptote_constants(err, k0, fading.rv_exponent());
    let f = fading.cdf_at(c2 / rho.value());
    users.pmf(k0) * c1 * f.powf(k0 as f64)
}

/// Leading capacity growth `log(1 + ρ log λ)` for Poisson users.
pub fn capacity_scaling(rho: SnrPoint, lambda: f64) -> Result<f64> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return domain(format!("capacity scaling needs a mean above 1, got {lambda}"));
    }
    Ok((rho.value() * lambda.ln()).ln_1p())
}
