//! Seeded, parallel, semi-analytic Monte Carlo estimates.
//!
//! Trials are cut into fixed-size chunks. Chunk `i` draws from the ChaCha8
//! stream `i` of the configured seed, and chunk summaries are merged in
//! chunk order, so an estimate depends on `(seed, trials)` only and is
//! bit-identical for any number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::fading::FadingModel;
use crate::metrics::{ErrorModel, SnrPoint};
use crate::selection::{gumbel_cdf, gumbel_constants, BestGainLaw};
use crate::usercount::UserCountModel;

const CHUNK: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, workers: usize) -> Result<Self> {
        if trials == 0 {
            return domain("Monte Carlo needs at least one trial");
        }
        if workers == 0 {
            return domain("Monte Carlo needs at least one worker");
        }
        Ok(Self { trials, seed, workers })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub mean: f64,
    /// Sample standard deviation over `√trials`.
    pub stderr: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Self {
            n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * w,
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `per_chunk(rng, len)` for every chunk, spreading chunks over the
/// workers, and returns the results in chunk order.
fn map_chunks<T, F>(cfg: &SimConfig, per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = cfg.trials.div_ceil(CHUNK);
    let len = |c: u64| CHUNK.min(cfg.trials - c * CHUNK);
    let workers = (cfg.workers as u64).min(chunks).max(1);
    if workers == 1 {
        return (0..chunks)
            .map(|c| per_chunk(&mut chunk_rng(cfg.seed, c), len(c)))
            .collect();
    }
    let mut parts: Vec<Vec<(u64, T)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let per_chunk = &per_chunk;
                scope.spawn(move || {
                    (w..chunks)
                        .step_by(workers as usize)
                        .map(|c| (c, per_chunk(&mut chunk_rng(cfg.seed, c), len(c))))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut all: Vec<(u64, T)> = parts.iter_mut().flat_map(std::mem::take).collect();
    all.sort_by_key(|(c, _)| *c);
    all.into_iter().map(|(_, t)| t).collect()
}

/// Sample mean and standard error of `trial` over `cfg.trials` draws.
pub fn estimate<F>(cfg: &SimConfig, trial: F) -> SimResult
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let total = map_chunks(cfg, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(trial(rng));
        }
        m
    })
    .into_iter()
    .fold(Moments::default(), Moments::merge);
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    SimResult {
        mean: total.mean,
        stderr: (var / total.n as f64).sqrt(),
        trials: total.n,
    }
}

/// All `cfg.trials` draws of `trial`, in a worker-independent order.
pub fn draw_samples<F>(cfg: &SimConfig, trial: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    map_chunks(cfg, |rng, len| (0..len).map(|_| trial(rng)).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect()
}

/// Average of `Pe(ρ γ*)` over draws of the best gain.
pub fn mc_error_rate(rho: SnrPoint, law: &BestGainLaw, err: &ErrorModel, cfg: &SimConfig) -> SimResult {
    let sampler = law.sampler();
    let rho = rho.value();
    estimate(cfg, |rng| err.pe_at(rho * sampler.sample(rng)))
}

/// Average of `log(1 + ρ γ*)` in nats.
pub fn mc_capacity(rho: SnrPoint, law: &BestGainLaw, cfg: &SimConfig) -> SimResult {
    let sampler = law.sampler();
    let rho = rho.value();
    estimate(cfg, |rng| (rho * sampler.sample(rng)).ln_1p())
}

/// Fraction of draws with `γ* ≤ x`.
pub fn mc_outage(x: f64, law: &BestGainLaw, cfg: &SimConfig) -> Result<SimResult> {
    if !(x >= 0.0) {
        return domain(format!("outage threshold must be non-negative, got {x}"));
    }
    let sampler = law.sampler();
    Ok(estimate(cfg, |rng| f64::from(u8::from(sampler.sample(rng) <= x))))
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and a
/// CDF with left limits `cdf_left` (equal to `cdf` wherever it is
/// continuous). Sorts `samples` in place.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64, cdf_left: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < samples.len() {
        let v = samples[i];
        let mut j = i;
        while j < samples.len() && samples[j] == v {
            j += 1;
        }
        d = d
            .max((cdf_left(v) - i as f64 / n).abs())
            .max((cdf(v) - j as f64 / n).abs());
        i = j;
    }
    d
}

fn gumbel_ks(users: UserCountModel, lambda: f64, fading: &FadingModel, cfg: &SimConfig) -> Result<f64> {
    let (a, b) = gumbel_constants(fading, lambda)?;
    let sampler = BestGainLaw::new(*fading, users).sampler();
    let mut z = draw_samples(cfg, |rng| (sampler.sample(rng) - b) / a);
    Ok(ks_distance(&mut z, gumbel_cdf, gumbel_cdf))
}

/// KS distance of `(γ* − b(λ))/a(λ)` under Poisson(`λ`) users to the
/// standard Gumbel law.
pub fn mc_gumbel_ks(lambda: f64, fading: &FadingModel, cfg: &SimConfig) -> Result<f64> {
    let users = UserCountModel::poisson(lambda)?;
    gumbel_ks(users, lambda, fading, cfg)
}

/// Same statistic with exactly `n` users, normalised at `λ = n`.
pub fn mc_gumbel_ks_fixed(n: u64, fading: &FadingModel, cfg: &SimConfig) -> Result<f64> {
    gumbel_ks(UserCountModel::deterministic(n), n as f64, fading, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{avg_error_random_n, ergodic_capacity_random_n, poisson_rayleigh_error_closed};
    use rand::Rng;

    fn cfg(trials: u64, workers: usize) -> SimConfig {
        SimConfig::new(trials, 20240601, workers).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0, 1, 1).is_err());
        assert!(SimConfig::new(1, 1, 0).is_err());
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert_eq!(m.n, whole.n);
        assert!((m.mean - whole.mean).abs() < 1e-12);
        assert!((m.m2 - whole.m2).abs() < 1e-9 * whole.m2);
    }

    #[test]
    fn stderr_is_sample_sd_over_root_n() {
        let c = cfg(5000, 1);
        let xs = draw_samples(&c, |rng| rng.random::<f64>());
        let r = estimate(&c, |rng| rng.random::<f64>());
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((r.mean - mean).abs() < 1e-12);
        assert!((r.stderr - (var / n).sqrt()).abs() < 1e-12);
        assert_eq!(r.trials, 5000);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let law = BestGainLaw::new(FadingModel::Rayleigh, UserCountModel::poisson(3.0).unwrap());
        let err = ErrorModel::default();
        let rho = SnrPoint::linear(2.0).unwrap();
        let one = mc_error_rate(rho, &law, &err, &cfg(50_000, 1));
        for w in [2, 3, 8] {
            assert_eq!(one, mc_error_rate(rho, &law, &err, &cfg(50_000, w)));
        }
        let other_seed = mc_error_rate(rho, &law, &err, &SimConfig::new(50_000, 7, 1).unwrap());
        assert_ne!(one.mean, other_seed.mean);
        let tol = 6.0 * (one.stderr.powi(2) + other_seed.stderr.powi(2)).sqrt();
        assert!((one.mean - other_seed.mean).abs() < tol);
    }

    #[test]
    fn error_rate_examples() {
        let law = BestGainLaw::new(FadingModel::Rayleigh, UserCountModel::poisson(1.0).unwrap());
        let err = ErrorModel::default();
        let rho = SnrPoint::linear(1.0).unwrap();
        let r = mc_error_rate(rho, &law, &err, &cfg(1_000_000, 4));
        let exact = poisson_rayleigh_error_closed(rho, 1.0, &err).unwrap();
        assert!((r.mean - exact).abs() < 3.0 * r.stderr, "{r:?} vs {exact}");

        let empty = BestGainLaw::new(FadingModel::Rayleigh, UserCountModel::deterministic(0));
        let alpha = ErrorModel::exponential(0.7, 1.0).unwrap();
        let r = mc_error_rate(rho, &empty, &alpha, &cfg(1000, 1));
        assert_eq!(r.mean, 0.7);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn capacity_examples() {
        let one = BestGainLaw::new(FadingModel::Rayleigh, UserCountModel::deterministic(1));
        let r = mc_capacity(SnrPoint::linear(1.0).unwrap(), &one, &cfg(1_000_000, 4));
        assert!((r.mean - 0.596_347_362_323_194).abs() < 3.0 * r.stderr);
        let tiny = mc_capacity(SnrPoint::linear(1e-12).unwrap(), &one, &cfg(1000, 1));
        assert!(tiny.mean < 1e-11);

        let rho = SnrPoint::linear(10.0).unwrap();
        let p = BestGainLaw::new(FadingModel::Rayleigh, UserCountModel::poisson(16.0).unwrap());
        let d = BestGainLaw::new(FadingModel::Rayleigh, UserCountModel::deterministic(16));
        let rp = mc_capacity(rho, &p, &cfg(1_000_000, 4));
        let rd = mc_capacity(rho, &d, &cfg(1_000_000, 4));
        assert!(rd.mean - rp.mean > 3.0 * (rp.stderr.powi(2) + rd.stderr.powi(2)).sqrt());
        let exact = ergodic_capacity_random_n(rho, &p.users, &p.fading).unwrap();
        assert!((rp.mean - exact).abs() < 3.0 * rp.stderr);
    }

    #[test]
    fn outage_examples() {
        let law = BestGainLaw::new(FadingModel::Rayleigh, UserCountModel::poisson(2.0).unwrap());
        let c = cfg(1_000_000, 4);
        let r = mc_outage(2f64.ln(), &law, &c).unwrap();
        assert!((r.mean - (-1.0f64).exp()).abs() < 3.0 * r.stderr);
        let r = mc_outage(0.0, &law, &c).unwrap();
        assert!((r.mean - (-2.0f64).exp()).abs() < 3.0 * r.stderr);
        let r = mc_outage(1e6, &law, &cfg(10_000, 1)).unwrap();
        assert_eq!(r.mean, 1.0);
        assert!(mc_outage(-1.0, &law, &c).is_err());
    }

    #[test]
    fn error_rate_matches_quadrature_for_q_form() {
        let users = UserCountModel::geometric(0.3).unwrap();
        let fading = FadingModel::nakagami(2.0).unwrap();
        let law = BestGainLaw::new(fading, users);
        let err = ErrorModel::q_function(1.0, 2.0).unwrap();
        let rho = SnrPoint::from_db(6.0).unwrap();
        let r = mc_error_rate(rho, &law, &err, &cfg(400_000, 2));
        let exact = avg_error_random_n(rho, &users, &fading, &err).unwrap();
        assert!((r.mean - exact).abs() < 3.0 * r.stderr);
    }

    #[test]
    fn ks_distance_handles_atoms() {
        let mut xs = vec![0.0, 0.0, 0.5, 1.0];
        // CDF with an atom of 1/2 at zero then uniform on (0, 1) for the rest
        let cdf = |x: f64| if x < 0.0 { 0.0 } else { (0.5 + 0.5 * x).min(1.0) };
        let left = |x: f64| if x <= 0.0 { 0.0 } else { cdf(x) };
        let d = ks_distance(&mut xs, cdf, left);
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gumbel_ks_shrinks_for_nakagami() {
        let n2 = FadingModel::nakagami(2.0).unwrap();
        let c = cfg(100_000, 4);
        let ks: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&l| mc_gumbel_ks(l, &n2, &c).unwrap())
            .collect();
        assert!(ks[0] > ks[1] && ks[1] > ks[2], "{ks:?}");
    }

    #[test]
    fn gumbel_ks_rayleigh_and_fixed_n() {
        let c = cfg(100_000, 4);
        let ks = mc_gumbel_ks(1000.0, &FadingModel::Rayleigh, &c).unwrap();
        assert!(ks < 0.02);
        let fixed = mc_gumbel_ks_fixed(1000, &FadingModel::Rayleigh, &c).unwrap();
        assert!(fixed < 0.02);
        assert!(mc_gumbel_ks(1.0, &FadingModel::Rayleigh, &c).is_err());
    }
}
