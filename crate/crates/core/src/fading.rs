//! Unit-mean channel-gain laws for i.i.d. user channels.
//!
//! Every model is normalized so that `E[γ] = 1`. The regular-variation
//! exponent `d` describes the behaviour `F(x) ≈ x^d l(x)` near the origin
//! and sets the diversity order of a single user.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::numerics::{
    brent_root, ln_gamma, marcum_pair, poisson_weight, regularized_gamma_p,
    regularized_gamma_q,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    /// Exponential gain, `F(x) = 1 − e^{−x}`.
    Rayleigh,
    /// Gamma(m, 1/m) gain; `m ≥ 0.5`.
    Nakagami { m: f64 },
    /// Noncentral chi-square gain with line-of-sight to scatter ratio `k`.
    Rician { k: f64 },
}

impl FadingModel {
    pub fn nakagami(m: f64) -> Result<Self> {
        if !(m >= 0.5) || !m.is_finite() {
            return domain(format!("Nakagami shape must satisfy m >= 0.5, got {m}"));
        }
        Ok(Self::Nakagami { m })
    }

    pub fn rician(k: f64) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return domain(format!("Rician K factor must be non-negative, got {k}"));
        }
        Ok(Self::Rician { k })
    }

    fn check_gain(x: f64) -> Result<()> {
        if !(x >= 0.0) {
            return domain(format!("gain must be non-negative, got {x}"));
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Self::check_gain(x)?;
        Ok(self.cdf_at(x))
    }

    /// Survival function `1 − F(x)`, evaluated without cancellation.
    pub fn sf(&self, x: f64) -> Result<f64> {
        Self::check_gain(x)?;
        Ok(self.sf_at(x))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Self::check_gain(x)?;
        Ok(self.pdf_at(x))
    }

    /// Smallest `x` with `F(x) ≥ p`, for `p ∈ [0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return domain(format!("quantile level must lie in [0, 1), got {p}"));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        if p > 0.5 {
            return self.upper_quantile(1.0 - p);
        }
        match *self {
            Self::Rayleigh => Ok(-(-p).ln_1p()),
            _ => self.solve(|x| self.cdf_at(x) - p, |x| self.cdf_at(x) < p),
        }
    }

    /// The gain exceeded with probability `q ∈ (0, 1]`, i.e. `F⁻¹(1 − q)`
    /// without forming `1 − q`.
    pub fn upper_quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return domain(format!("tail probability must lie in (0, 1], got {q}"));
        }
        if q == 1.0 {
            return Ok(0.0);
        }
        match *self {
            Self::Rayleigh => Ok(-q.ln()),
            _ => self.solve(|x| q - self.sf_at(x), |x| self.sf_at(x) > q),
        }
    }

    // `g` is increasing in x; `below` says whether x is still left of the root.
    fn solve(&self, g: impl Fn(f64) -> f64, below: impl Fn(f64) -> bool) -> Result<f64> {
        let mut hi = 1.0;
        let mut lo = 0.0;
        while below(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Instability("quantile bracket diverged".into()));
            }
        }
        brent_root(g, lo, hi, 1e-15)
    }

    /// Regular-variation exponent of the CDF at the origin.
    pub fn rv_exponent(&self) -> f64 {
        match *self {
            Self::Rayleigh | Self::Rician { .. } => 1.0,
            Self::Nakagami { m } => m,
        }
    }

    pub fn sampler(&self) -> GainSampler {
        let kind = match *self {
            Self::Rayleigh => SamplerKind::Exponential,
            Self::Nakagami { m } => {
                SamplerKind::Gamma(Gamma::new(m, 1.0 / m).expect("validated Nakagami shape"))
            }
            Self::Rician { k } => SamplerKind::Rician {
                los: (k / (k + 1.0)).sqrt(),
                sigma: (0.5 / (k + 1.0)).sqrt(),
            },
        };
        GainSampler { kind }
    }

    /// One gain draw. Prefer [`FadingModel::sampler`] in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }

    // Lower and upper tails evaluated directly; callers pick whichever is
    // small and complement it, so `cdf_at + sf_at == 1` exactly.
    fn tails(&self, x: f64) -> (f64, f64) {
        match *self {
            Self::Rayleigh => (-(-x).exp_m1(), (-x).exp()),
            // the median sits below the unit mean, so x < 1 keeps the
            // directly computed tail at most about one half
            Self::Nakagami { m } if x < 1.0 => {
                let p = regularized_gamma_p(m, m * x).unwrap_or(1.0);
                (p, 1.0 - p)
            }
            Self::Nakagami { m } => {
                let q = regularized_gamma_q(m, m * x).unwrap_or(0.0);
                (1.0 - q, q)
            }
            Self::Rician { k } => {
                let (a, b) = ((2.0 * k).sqrt(), (2.0 * (1.0 + k) * x).sqrt());
                marcum_pair(a, b).unwrap_or((1.0, 0.0))
            }
        }
    }

    pub(crate) fn cdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if let Self::Rayleigh = self {
            return -(-x).exp_m1();
        }
        let (p, q) = self.tails(x);
        if p <= q {
            p
        } else {
            1.0 - q
        }
    }

    pub(crate) fn sf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if let Self::Rayleigh = self {
            return (-x).exp();
        }
        let (p, q) = self.tails(x);
        if p <= q {
            1.0 - p
        } else {
            q
        }
    }

    /// `ln F(x)`, taken through the survival function in the upper tail.
    pub(crate) fn ln_cdf_at(&self, x: f64) -> f64 {
        let sf = self.sf_at(x);
        if sf < 0.5 {
            (-sf).ln_1p()
        } else {
            self.cdf_at(x).ln()
        }
    }

    pub(crate) fn pdf_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Rayleigh => (-x).exp(),
            Self::Nakagami { m } => {
                if x == 0.0 {
                    return match m.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0,
                        _ => 0.0,
                    };
                }
                (m * m.ln() + (m - 1.0) * x.ln() - m * x - ln_gamma(m)).exp()
            }
            Self::Rician { k } => {
                // Poisson(k) mixture of Gamma(j+1, 1+k) densities
                let y = (1.0 + k) * x;
                let kmax = (k + 12.0 * k.sqrt() + 40.0).ceil() as u64;
                let s: f64 = (0..=kmax)
                    .map(|j| poisson_weight(j, k) * poisson_weight(j, y))
                    .sum();
                (1.0 + k) * s
            }
        }
    }
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rayleigh => write!(f, "rayleigh"),
            Self::Nakagami { m } => write!(f, "nakagami:m={m}"),
            Self::Rician { k } => write!(f, "rician:k={k}"),
        }
    }
}

/// Value after an optional `key=` prefix, e.g. `m=2` or `2`.
pub(crate) fn keyed_value(text: &str, key: &str) -> Result<f64> {
    let raw = match text.split_once('=') {
        Some((k, v)) if k.trim().eq_ignore_ascii_case(key) => v,
        Some((k, _)) => return Err(Error::Parse(format!("unexpected key `{k}`, expected `{key}`"))),
        None => text,
    };
    raw.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad number `{raw}`: {e}")))
}

impl FromStr for FadingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match (head.to_ascii_lowercase().as_str(), rest) {
            ("rayleigh", None) => Ok(Self::Rayleigh),
            ("nakagami", Some(r)) => Self::nakagami(keyed_value(r, "m")?),
            ("rician" | "ricean", Some(r)) => Self::rician(keyed_value(r, "k")?),
            _ => Err(Error::Parse(format!(
                "unknown fading model `{s}` (expected rayleigh, nakagami:m=<v> or rician:k=<v>)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Exponential,
    Gamma(Gamma<f64>),
    Rician { los: f64, sigma: f64 },
}

/// Prepared gain sampler for one [`FadingModel`].
#[derive(Debug, Clone)]
pub struct GainSampler {
    kind: SamplerKind,
}

impl Distribution<f64> for GainSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            // inverse transform; 1 - U lies in (0, 1]
            SamplerKind::Exponential => -(1.0 - rng.random::<f64>()).ln(),
            SamplerKind::Gamma(g) => g.sample(rng),
            SamplerKind::Rician { los, sigma } => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let a = los + sigma * re;
                let b = sigma * im;
                a * a + b * b
            }
        }
    }
}
