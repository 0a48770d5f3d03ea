//! Laws of the number of contending users and their generating functions.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain, Error, Result};
use crate::fading::keyed_value;
use crate::numerics::{brent_root, poisson_weight};

/// Above this mean Poisson counts are drawn by rejection instead of
/// sequential inversion.
const POISSON_INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UserCountModel {
    Deterministic { n: u64 },
    Poisson { lambda: f64 },
    /// `P[N = k] = p (1 − p)^k` on `{0, 1, 2, …}`.
    Geometric { p: f64 },
    /// Poisson(`lambda`) conditioned on `N ≥ 1`; `lambda` is the parameter
    /// of the underlying Poisson law, not the mean.
    ZeroTruncatedPoisson { lambda: f64 },
}

fn check_rate(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("Poisson parameter must be positive, got {lambda}"));
    }
    Ok(())
}

impl UserCountModel {
    pub fn deterministic(n: u64) -> Self {
        Self::Deterministic { n }
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        check_rate(lambda)?;
        Ok(Self::Poisson { lambda })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return domain(format!("geometric success probability must lie in (0, 1], got {p}"));
        }
        Ok(Self::Geometric { p })
    }

    /// Geometric law with the given mean, `p = 1/(1 + mean)`.
    pub fn geometric_with_mean(mean: f64) -> Result<Self> {
        if !(mean >= 0.0) {
            return domain(format!("mean must be non-negative, got {mean}"));
        }
        Self::geometric(1.0 / (1.0 + mean))
    }

    pub fn zero_truncated_poisson(lambda: f64) -> Result<Self> {
        check_rate(lambda)?;
        Ok(Self::ZeroTruncatedPoisson { lambda })
    }

    /// Zero-truncated Poisson whose mean `λ/(1 − e^{−λ})` equals `mean > 1`.
    pub fn zero_truncated_with_mean(mean: f64) -> Result<Self> {
        if !(mean > 1.0) || !mean.is_finite() {
            return domain(format!("zero-truncated Poisson mean must exceed 1, got {mean}"));
        }
        let g = |l: f64| l / -(-l).exp_m1() - mean;
        let lambda = brent_root(g, 1e-12, mean, 1e-15)?;
        Self::zero_truncated_poisson(lambda)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        match *self {
            Self::Deterministic { n } => f64::from(u8::from(k == n)),
            Self::Poisson { lambda } => poisson_weight(k, lambda),
            Self::Geometric { p } => {
                if p == 1.0 {
                    return f64::from(u8::from(k == 0));
                }
                (p.ln() + k as f64 * (-p).ln_1p()).exp()
            }
            Self::ZeroTruncatedPoisson { lambda } => {
                if k == 0 {
                    0.0
                } else {
                    poisson_weight(k, lambda) / -(-lambda).exp_m1()
                }
            }
        }
    }

    fn check_t(t: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&t) {
            return domain(format!("generating-function argument must lie in [0, 1], got {t}"));
        }
        Ok(())
    }

    /// Probability generating function `U(t) = E[t^N]`.
    pub fn pgf(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(self.pgf_at(t))
    }

    pub fn pgf_prime(&self, t: f64) -> Result<f64> {
        Self::check_t(t)?;
        Ok(self.pgf_prime_at(t))
    }

    /// `1 − U(1 − q)`, evaluated without cancellation for small `q`.
    pub fn pgf_complement(&self, q: f64) -> Result<f64> {
        Self::check_t(q)?;
        Ok(self.pgf_complement_at(q))
    }

    pub(crate) fn pgf_at(&self, t: f64) -> f64 {
        match *self {
            Self::Deterministic { n } => t.powf(n as f64),
            Self::Poisson { lambda } => (lambda * (t - 1.0)).exp(),
            Self::Geometric { p } => p / (1.0 - (1.0 - p) * t),
            Self::ZeroTruncatedPoisson { lambda } => {
                if t == 0.0 {
                    return 0.0;
                }
                (lambda * (t - 1.0)).exp() * (-lambda * t).exp_m1() / (-lambda).exp_m1()
            }
        }
    }

    pub(crate) fn pgf_prime_at(&self, t: f64) -> f64 {
        match *self {
            Self::Deterministic { n } => {
                if n == 0 {
                    0.0
                } else {
                    n as f64 * t.powf(n as f64 - 1.0)
                }
            }
            Self::Poisson { lambda } => lambda * (lambda * (t - 1.0)).exp(),
            Self::Geometric { p } => {
                let d = 1.0 - (1.0 - p) * t;
                p * (1.0 - p) / (d * d)
            }
            Self::ZeroTruncatedPoisson { lambda } => {
                lambda * (lambda * (t - 1.0)).exp() / -(-lambda).exp_m1()
            }
        }
    }

    pub(crate) fn pgf_complement_at(&self, q: f64) -> f64 {
        match *self {
            Self::Deterministic { n } => {
                if n == 0 || q == 0.0 {
                    0.0
                } else {
                    -(n as f64 * (-q).ln_1p()).exp_m1()
                }
            }
            Self::Poisson { lambda } => -(-lambda * q).exp_m1(),
            Self::Geometric { p } => (1.0 - p) * q / (p + (1.0 - p) * q),
            Self::ZeroTruncatedPoisson { lambda } => (-lambda * q).exp_m1() / (-lambda).exp_m1(),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Deterministic { n } => n as f64,
            Self::Poisson { lambda } => lambda,
            Self::Geometric { p } => (1.0 - p) / p,
            Self::ZeroTruncatedPoisson { lambda } => lambda / -(-lambda).exp_m1(),
        }
    }

    /// Smallest count with positive probability.
    pub fn min_support(&self) -> u64 {
        match *self {
            Self::Deterministic { n } => n,
            Self::Poisson { .. } | Self::Geometric { .. } => 0,
            Self::ZeroTruncatedPoisson { .. } => 1,
        }
    }

    /// Smallest `K` with `P[N > K] < tail`.
    pub fn truncation_point(&self, tail: f64) -> u64 {
        let tail = tail.max(1e-300);
        match *self {
            Self::Deterministic { n } => n,
            Self::Geometric { p } => {
                if p == 1.0 {
                    return 0;
                }
                // P[N > K] = (1-p)^{K+1}
                let k = (tail.ln() / (-p).ln_1p()).ceil() - 1.0;
                k.max(0.0) as u64
            }
            Self::Poisson { lambda } | Self::ZeroTruncatedPoisson { lambda } => {
                let scale = match self {
                    Self::ZeroTruncatedPoisson { .. } => 1.0 / -(-lambda).exp_m1(),
                    _ => 1.0,
                };
                // for K + 2 > λ the tail is at most pmf(K+1) / (1 − λ/(K+2))
                let mut k = lambda.ceil() as u64;
                loop {
                    let ratio = lambda / (k as f64 + 2.0);
                    let bound = scale * poisson_weight(k + 1, lambda) / (1.0 - ratio);
                    if bound < tail {
                        return k;
                    }
                    k += 1;
                }
            }
        }
    }

    pub fn sampler(&self) -> CountSampler {
        let kind = match *self {
            Self::Deterministic { n } => CountKind::Fixed(n),
            Self::Poisson { lambda } => CountKind::Poisson(PoissonDraw::new(lambda)),
            Self::Geometric { p } => CountKind::Geometric { ln_q: (-p).ln_1p() },
            Self::ZeroTruncatedPoisson { lambda } => {
                CountKind::ZeroTruncated(PoissonDraw::new(lambda))
            }
        };
        CountSampler { kind }
    }

    /// One count draw. Prefer [`UserCountModel::sampler`] in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.sampler().sample(rng)
    }
}

impl fmt::Display for UserCountModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Deterministic { n } => write!(f, "det:{n}"),
            Self::Poisson { lambda } => write!(f, "poisson:{lambda}"),
            Self::Geometric { p } => write!(f, "geom:{p}"),
            Self::ZeroTruncatedPoisson { lambda } => write!(f, "ztpoisson:{lambda}"),
        }
    }
}

impl FromStr for UserCountModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some((head, rest)) = s.split_once(':') else {
            return Err(Error::Parse(format!(
                "user model `{s}` needs a parameter, e.g. det:4, poisson:4, geom:0.2, ztpoisson:2"
            )));
        };
        match head.to_ascii_lowercase().as_str() {
            "det" => {
                let v = keyed_value(rest, "n")?;
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(Error::Parse(format!("det count must be a non-negative integer, got {v}")));
                }
                Ok(Self::deterministic(v as u64))
            }
            "poisson" => Self::poisson(keyed_value(rest, "lambda")?),
            "geom" => Self::geometric(keyed_value(rest, "p")?),
            "ztpoisson" => Self::zero_truncated_poisson(keyed_value(rest, "lambda")?),
            other => Err(Error::Parse(format!("unknown user model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
enum PoissonDraw {
    Inversion { lambda: f64, p0: f64 },
    Rejection(Poisson<f64>),
}

impl PoissonDraw {
    fn new(lambda: f64) -> Self {
        if lambda <= POISSON_INVERSION_LIMIT {
            Self::Inversion {
                lambda,
                p0: (-lambda).exp(),
            }
        } else {
            Self::Rejection(Poisson::new(lambda).expect("validated Poisson rate"))
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Self::Inversion { lambda, p0 } => {
                let u: f64 = rng.random();
                let mut k = 0u64;
                let mut p = *p0;
                let mut cum = p;
                while u > cum && k < 10_000 {
                    k += 1;
                    p *= lambda / k as f64;
                    cum += p;
                    if p == 0.0 {
                        break;
                    }
                }
                k
            }
            Self::Rejection(d) => d.sample(rng) as u64,
        }
    }
}

#[derive(Debug, Clone)]
enum CountKind {
    Fixed(u64),
    Poisson(PoissonDraw),
    Geometric { ln_q: f64 },
    ZeroTruncated(PoissonDraw),
}

/// Prepared sampler for one [`UserCountModel`].
#[derive(Debug, Clone)]
pub struct CountSampler {
    kind: CountKind,
}

impl Distribution<u64> for CountSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.kind {
            CountKind::Fixed(n) => *n,
            CountKind::Poisson(d) => d.draw(rng),
            CountKind::Geometric { ln_q } => {
                if *ln_q == f64::NEG_INFINITY {
                    return 0;
                }
                let u = 1.0 - rng.random::<f64>();
                (u.ln() / ln_q).floor() as u64
            }
            CountKind::ZeroTruncated(d) => loop {
                let k = d.draw(rng);
                if k > 0 {
                    break k;
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn models() -> Vec<UserCountModel> {
        vec![
            UserCountModel::deterministic(0),
            UserCountModel::deterministic(1),
            UserCountModel::deterministic(8),
            UserCountModel::poisson(1.0).unwrap(),
            UserCountModel::poisson(4.0).unwrap(),
            UserCountModel::poisson(45.0).unwrap(),
            UserCountModel::geometric(0.5).unwrap(),
            UserCountModel::geometric(0.2).unwrap(),
            UserCountModel::zero_truncated_poisson(0.3).unwrap(),
            UserCountModel::zero_truncated_poisson(2.0).unwrap(),
        ]
    }

    fn series_pgf(m: &UserCountModel, t: f64) -> f64 {
        let kmax = m.truncation_point(1e-15);
        (0..=kmax).map(|k| m.pmf(k) * t.powf(k as f64)).sum()
    }

    #[test]
    fn pmf_examples() {
        let p1 = UserCountModel::poisson(1.0).unwrap();
        assert!((p1.pmf(0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(UserCountModel::zero_truncated_poisson(3.0).unwrap().pmf(0), 0.0);
        assert!((UserCountModel::geometric(0.5).unwrap().pmf(2) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn pmf_sums_to_one() {
        for m in models() {
            let kmax = m.truncation_point(1e-13);
            let s: f64 = (0..=kmax).map(|k| m.pmf(k)).sum();
            assert!((s - 1.0).abs() < 1e-12, "{m}: {s}");
        }
    }

    #[test]
    fn pgf_examples() {
        for m in models() {
            assert!((m.pgf(1.0).unwrap() - 1.0).abs() < 1e-15, "{m}");
        }
        let p1 = UserCountModel::poisson(1.0).unwrap();
        assert!((series_pgf(&p1, 0.5) - (-0.5f64).exp()).abs() < 1e-14);
        assert!((p1.pgf(0.5).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        let g = UserCountModel::geometric(0.5).unwrap();
        assert!((series_pgf(&g, 0.5) - 2.0 / 3.0).abs() < 1e-12);
        assert!((g.pgf(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(g.pgf(1.2).is_err());
        assert!(g.pgf(-0.1).is_err());
    }

    #[test]
    fn pgf_matches_series_on_grid() {
        for m in models() {
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                let a = m.pgf(t).unwrap();
                let b = series_pgf(&m, t);
                assert!((a - b).abs() < 1e-10, "{m} at {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pgf_is_nondecreasing_and_convex() {
        for m in models() {
            let v: Vec<f64> = (0..=100).map(|i| m.pgf_at(i as f64 / 100.0)).collect();
            for w in v.windows(3) {
                assert!(w[1] >= w[0] - 1e-15);
                assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-13, "{m}");
            }
        }
    }

    #[test]
    fn pgf_prime_examples() {
        for &l in &[0.5, 4.0, 30.0] {
            let p = UserCountModel::poisson(l).unwrap();
            assert!((p.pgf_prime(1.0).unwrap() - l).abs() < 1e-12);
        }
        let d = UserCountModel::deterministic(5);
        assert!((d.pgf_prime(0.7).unwrap() - 5.0 * 0.7f64.powi(4)).abs() < 1e-15);
        let z = UserCountModel::zero_truncated_poisson(2.0).unwrap();
        let e2 = 2f64.exp();
        let expect = 2.0 * e2 / (e2 - 1.0);
        assert!((z.pgf_prime(1.0).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 2.313).abs() < 1e-3);
        assert!((z.pgf_prime(1.0).unwrap() - z.mean()).abs() < 1e-12);
    }

    #[test]
    fn pgf_prime_matches_central_difference() {
        for m in models() {
            for &t in &[0.1, 0.4, 0.75, 0.95] {
                let h = 1e-6;
                let fd = (m.pgf_at(t + h) - m.pgf_at(t - h)) / (2.0 * h);
                let d = m.pgf_prime_at(t);
                if d.abs() < 1e-12 {
                    assert!(fd.abs() < 1e-8);
                } else {
                    assert!(((fd - d) / d).abs() < 1e-6, "{m} at {t}: {fd} vs {d}");
                }
            }
        }
    }

    #[test]
    fn complement_matches_one_minus_pgf() {
        for m in models() {
            for &q in &[1e-9, 1e-3, 0.3, 0.9, 1.0] {
                let a = m.pgf_complement_at(q);
                let b = 1.0 - m.pgf_at(1.0 - q);
                assert!((a - b).abs() < 1e-12, "{m} at {q}");
            }
        }
    }

    #[test]
    fn mean_examples_and_series() {
        assert_eq!(UserCountModel::poisson(4.0).unwrap().mean(), 4.0);
        let z = UserCountModel::zero_truncated_poisson(1.0).unwrap();
        assert!((z.mean() - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert!((z.mean() - 1.5820).abs() < 1e-4);
        assert!((UserCountModel::geometric(0.5).unwrap().mean() - 1.0).abs() < 1e-15);
        for m in models() {
            let kmax = m.truncation_point(1e-16);
            let s: f64 = (0..=kmax).map(|k| k as f64 * m.pmf(k)).sum();
            assert!((s - m.mean()).abs() < 1e-10, "{m}");
        }
    }

    #[test]
    fn min_support_examples() {
        assert_eq!(UserCountModel::poisson(3.0).unwrap().min_support(), 0);
        assert_eq!(UserCountModel::zero_truncated_poisson(3.0).unwrap().min_support(), 1);
        assert_eq!(UserCountModel::deterministic(8).min_support(), 8);
        for m in models() {
            let k0 = m.min_support();
            assert!(m.pmf(k0) > 0.0);
            assert!((0..k0).all(|k| m.pmf(k) == 0.0));
        }
    }

    #[test]
    fn mean_inverse_constructors() {
        let g = UserCountModel::geometric_with_mean(4.0).unwrap();
        assert!((g.mean() - 4.0).abs() < 1e-14);
        let z = UserCountModel::zero_truncated_with_mean(4.0).unwrap();
        assert!((z.mean() - 4.0).abs() < 1e-12);
        assert!(UserCountModel::zero_truncated_with_mean(1.0).is_err());
    }

    #[test]
    fn sampler_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = UserCountModel::deterministic(5).sampler();
        assert!((0..1000).all(|_| d.sample(&mut rng) == 5));

        let p = UserCountModel::poisson(4.0).unwrap().sampler();
        let n = 1_000_000;
        let mean = (0..n).map(|_| p.sample(&mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 4.0).abs() < 0.006);

        let z = UserCountModel::zero_truncated_poisson(0.5).unwrap().sampler();
        assert!((0..n).all(|_| z.sample(&mut rng) > 0));
    }

    #[test]
    fn samplers_follow_pmf() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [
            UserCountModel::poisson(2.5).unwrap(),
            UserCountModel::poisson(60.0).unwrap(),
            UserCountModel::geometric(0.3).unwrap(),
            UserCountModel::zero_truncated_poisson(1.2).unwrap(),
        ] {
            let s = m.sampler();
            let n = 200_000;
            let mut counts = vec![0usize; 200];
            for _ in 0..n {
                let k = s.sample(&mut rng) as usize;
                if k < counts.len() {
                    counts[k] += 1;
                }
            }
            for (k, &c) in counts.iter().enumerate() {
                let p = m.pmf(k as u64);
                let sd = (p * (1.0 - p) / n as f64).sqrt();
                assert!((c as f64 / n as f64 - p).abs() <= 5.0 * sd + 1e-9, "{m} k={k}");
            }
        }
    }

    #[test]
    fn parse_text_forms() {
        assert_eq!("det:4".parse::<UserCountModel>().unwrap(), UserCountModel::deterministic(4));
        assert_eq!("poisson:4".parse::<UserCountModel>().unwrap(), UserCountModel::Poisson { lambda: 4.0 });
        assert_eq!("geom:p=0.2".parse::<UserCountModel>().unwrap(), UserCountModel::Geometric { p: 0.2 });
        assert_eq!(
            "ztpoisson:2".parse::<UserCountModel>().unwrap(),
            UserCountModel::ZeroTruncatedPoisson { lambda: 2.0 }
        );
        for bad in ["det:-1", "det:2.5", "poisson:0", "geom:1.5", "binomial:3", "poisson"] {
            assert!(bad.parse::<UserCountModel>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn text_form_round_trips(kind in 0u8..4, v in 0.01f64..50.0, n in 0u64..1000) {
            let m = match kind {
                0 => UserCountModel::deterministic(n),
                1 => UserCountModel::poisson(v).unwrap(),
                2 => UserCountModel::geometric((v / 50.0).min(1.0)).unwrap(),
                _ => UserCountModel::zero_truncated_poisson(v).unwrap(),
            };
            prop_assert_eq!(m.to_string().parse::<UserCountModel>().unwrap(), m);
        }
    }
}
