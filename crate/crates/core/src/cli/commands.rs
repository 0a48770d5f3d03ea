//! One function per subcommand: configuration in, rows or a report out.

use serde::Serialize;

use super::config::{ExperimentConfig, Grid};
use super::output::{CsvRow, Method};
use crate::analysis::{
    check_cm, check_cmd, diversity_order_fit, jensen_gap, jensen_tightness_scan, ordering_consequences,
    lt_order_check, CmReport, ConsequenceRow, JensenPoint, OrderingVerdict, Relation, LT_GRID, LT_TOL,
};
use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::metrics::{
    avg_error_fixed_n, avg_error_random_n, capacity_scaling, ergodic_capacity_fixed_n,
    ergodic_capacity_random_n, ergodic_capacity_real_n, high_snr_asymptote, poisson_rayleigh_error_closed,
    ErrorForm, ErrorModel, SnrPoint,
};
use crate::montecarlo::{mc_capacity, mc_error_rate, mc_gumbel_ks, mc_gumbel_ks_fixed, mc_outage, SimConfig};
use crate::selection::BestGainLaw;
use crate::usercount::UserCountModel;

fn users_or(cfg: &ExperimentConfig, defaults: &[&str]) -> Vec<UserCountModel> {
    if cfg.users.is_empty() {
        defaults.iter().map(|s| s.parse().expect("valid default user model")).collect()
    } else {
        cfg.users.clone()
    }
}

fn grid_or(grid: &Option<Grid>, default: &str) -> Vec<f64> {
    match grid {
        Some(g) => g.values().to_vec(),
        None => default.parse::<Grid>().expect("valid default grid").values().to_vec(),
    }
}

fn err_or(cfg: &ExperimentConfig, form: ErrorForm) -> ErrorModel {
    cfg.err.unwrap_or_else(|| ErrorModel::default_for(form))
}

fn sim(cfg: &ExperimentConfig, default_trials: u64) -> Result<Option<SimConfig>> {
    match cfg.mc_trials.unwrap_or(default_trials) {
        0 => Ok(None),
        t => Ok(Some(SimConfig::new(t, cfg.seed, cfg.workers)?)),
    }
}

pub(crate) fn row(x: f64, value: f64, method: Method, users: &UserCountModel, fading: &FadingModel) -> CsvRow {
    CsvRow {
        x,
        value,
        stderr: None,
        method,
        users: users.to_string(),
        fading: fading.to_string(),
        err: String::new(),
        snr_db: None,
    }
}

/// Error rate against SNR: quadrature, the Poisson/Rayleigh closed form
/// where it applies, the high-SNR asymptote and optional Monte Carlo.
pub fn error_rate(cfg: &ExperimentConfig) -> Result<Vec<CsvRow>> {
    let users = users_or(cfg, &["poisson:4", "det:4"]);
    let err = err_or(cfg, ErrorForm::Exp);
    let mc = sim(cfg, 0)?;
    error_rate_rows(&users, &cfg.fading, &err, &grid_or(&cfg.snr_db, "0:2:20"), mc.as_ref())
}

pub(crate) fn error_rate_rows(
    users: &[UserCountModel],
    fading: &FadingModel,
    err: &ErrorModel,
    snr_db: &[f64],
    mc: Option<&SimConfig>,
) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for u in users {
        let law = BestGainLaw::new(*fading, *u);
        for &db in snr_db {
            let rho = SnrPoint::from_db(db)?;
            let tag = |mut r: CsvRow| {
                r.err = err.to_string();
                r.snr_db = Some(db);
                r
            };
            rows.push(tag(row(db, avg_error_random_n(rho, u, fading, err)?, Method::Quad, u, fading)));
            if let (UserCountModel::Poisson { lambda }, FadingModel::Rayleigh, ErrorForm::Exp) =
                (u, fading, err.form)
            {
                let v = poisson_rayleigh_error_closed(rho, *lambda, err)?;
                rows.push(tag(row(db, v, Method::Closed, u, fading)));
            }
            let asym = high_snr_asymptote(rho, u, fading, err);
            rows.push(tag(row(db, asym, Method::Asymptote, u, fading)));
            if let Some(c) = mc {
                let r = mc_error_rate(rho, &law, err, c);
                let mut out = tag(row(db, r.mean, Method::Mc, u, fading));
                out.stderr = Some(r.stderr);
                rows.push(out);
            }
        }
    }
    Ok(rows)
}

/// Ergodic capacity (nats) against SNR, with the growth law
/// `log(1 + ρ log λ)` for Poisson users.
pub fn capacity(cfg: &ExperimentConfig) -> Result<Vec<CsvRow>> {
    let users = users_or(cfg, &["poisson:4", "det:4"]);
    let mc = sim(cfg, 0)?;
    capacity_rows(&users, &cfg.fading, &grid_or(&cfg.snr_db, "0:2:20"), mc.as_ref())
}

pub(crate) fn capacity_rows(
    users: &[UserCountModel],
    fading: &FadingModel,
    snr_db: &[f64],
    mc: Option<&SimConfig>,
) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for u in users {
        let law = BestGainLaw::new(*fading, *u);
        for &db in snr_db {
            let rho = SnrPoint::from_db(db)?;
            let tag = |mut r: CsvRow| {
                r.snr_db = Some(db);
                r
            };
            rows.push(tag(row(db, ergodic_capacity_random_n(rho, u, fading)?, Method::Quad, u, fading)));
            if let UserCountModel::Poisson { lambda } = u {
                if *lambda > 1.0 {
                    rows.push(tag(row(db, capacity_scaling(rho, *lambda)?, Method::Asymptote, u, fading)));
                }
            }
            if let Some(c) = mc {
                let r = mc_capacity(rho, &law, c);
                let mut out = tag(row(db, r.mean, Method::Mc, u, fading));
                out.stderr = Some(r.stderr);
                rows.push(out);
            }
        }
    }
    Ok(rows)
}

/// Outage probability `P[γ* ≤ x]` over a threshold grid.
pub fn outage(cfg: &ExperimentConfig) -> Result<Vec<CsvRow>> {
    let users = users_or(cfg, &["poisson:4"]);
    let mc = sim(cfg, 0)?;
    outage_rows(&users, &cfg.fading, &grid_or(&cfg.x_grid, "0:0.25:6"), mc.as_ref())
}

pub(crate) fn outage_rows(
    users: &[UserCountModel],
    fading: &FadingModel,
    xs: &[f64],
    mc: Option<&SimConfig>,
) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for u in users {
        let law = BestGainLaw::new(*fading, *u);
        for &x in xs {
            rows.push(row(x, law.cdf(x)?, Method::Closed, u, fading));
            if let Some(c) = mc {
                let r = mc_outage(x, &law, c)?;
                let mut out = row(x, r.mean, Method::Mc, u, fading);
                out.stderr = Some(r.stderr);
                rows.push(out);
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderReport {
    pub x: String,
    pub y: String,
    pub verdict: OrderingVerdict,
    /// Error-rate and capacity comparison; absent when the laws are not
    /// ordered.
    pub consequences: Option<Vec<ConsequenceRow>>,
}

/// Laplace-transform order of two user laws and its consequences.
pub fn order(cfg: &ExperimentConfig) -> Result<OrderReport> {
    let users = users_or(cfg, &["geom:p=0.2", "poisson:4"]);
    let [x, y] = users.as_slice() else {
        return Err(Error::Parse(format!("order needs exactly two --users, got {}", users.len())));
    };
    let err = err_or(cfg, ErrorForm::Exp);
    let rhos = grid_or(&cfg.snr_db, "0:5:20")
        .into_iter()
        .map(SnrPoint::from_db)
        .collect::<Result<Vec<_>>>()?;
    let verdict = lt_order_check(x, y, LT_GRID, LT_TOL)?;
    let consequences = if verdict.relation == Relation::Incomparable {
        None
    } else {
        Some(ordering_consequences(x, y, &cfg.fading, &err, &rhos)?.1)
    };
    Ok(OrderReport {
        x: x.to_string(),
        y: y.to_string(),
        verdict,
        consequences,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CmEntry {
    pub metric: &'static str,
    pub err: Option<String>,
    pub snr_db: f64,
    pub n_max: u64,
    pub report: CmReport,
}

/// Complete monotonicity of the error rate and of the capacity increments
/// in the number of users, `N = 1..=n_max`.
pub fn cm_check(cfg: &ExperimentConfig) -> Result<Vec<CmEntry>> {
    let err = err_or(cfg, ErrorForm::Exp);
    let mut out = Vec::new();
    for db in grid_or(&cfg.snr_db, "0,6,20") {
        let rho = SnrPoint::from_db(db)?;
        let errors = (1..=cfg.n_max)
            .map(|n| avg_error_fixed_n(rho, n, &cfg.fading, &err))
            .collect::<Result<Vec<_>>>()?;
        let caps = (1..=cfg.n_max)
            .map(|n| ergodic_capacity_fixed_n(rho, n, &cfg.fading))
            .collect::<Result<Vec<_>>>()?;
        out.push(CmEntry {
            metric: "error",
            err: Some(err.to_string()),
            snr_db: db,
            n_max: cfg.n_max,
            report: check_cm(&errors, cfg.order.unwrap_or(4), cfg.tol)?,
        });
        out.push(CmEntry {
            metric: "capacity",
            err: None,
            snr_db: db,
            n_max: cfg.n_max,
            report: check_cmd(&caps, cfg.order.unwrap_or(3), cfg.tol)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapEntry {
    pub users: String,
    pub snr_db: f64,
    /// `E_N[P̄e] − P̄e(E[N])`, non-negative.
    pub error_gap: f64,
    /// `E_N[C̄] − C̄(E[N])`, non-positive.
    pub capacity_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TightnessEntry {
    pub snr_db: f64,
    pub points: Vec<JensenPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JensenReport {
    pub err: String,
    pub fading: String,
    pub gaps: Vec<GapEntry>,
    pub tightness: Vec<TightnessEntry>,
}

/// Jensen gaps of both metrics and the Poisson tightness scan.
pub fn jensen(cfg: &ExperimentConfig) -> Result<JensenReport> {
    let users = if cfg.users.is_empty() {
        vec![
            UserCountModel::poisson(4.0)?,
            UserCountModel::geometric_with_mean(4.0)?,
            UserCountModel::zero_truncated_with_mean(4.0)?,
        ]
    } else {
        cfg.users.clone()
    };
    let err = err_or(cfg, ErrorForm::Exp);
    let snrs = grid_or(&cfg.snr_db, "0,6,10,20");
    let mut gaps = Vec::new();
    for u in &users {
        for &db in &snrs {
            let rho = SnrPoint::from_db(db)?;
            let cap = ergodic_capacity_random_n(rho, u, &cfg.fading)?
                - ergodic_capacity_real_n(rho, u.mean(), &cfg.fading)?;
            gaps.push(GapEntry {
                users: u.to_string(),
                snr_db: db,
                error_gap: jensen_gap(rho, u, &cfg.fading, &err)?,
                capacity_gap: cap,
            });
        }
    }
    let lambdas = grid_or(&cfg.lambda_grid, "4,16,64,256");
    let tightness = snrs
        .iter()
        .map(|&db| {
            Ok(TightnessEntry {
                snr_db: db,
                points: jensen_tightness_scan(SnrPoint::from_db(db)?, &lambdas, &cfg.fading, &err)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JensenReport {
        err: err.to_string(),
        fading: cfg.fading.to_string(),
        gaps,
        tightness,
    })
}

/// High-SNR error curve, its asymptote and the fitted slope over the
/// configured window (one `fit` row per user law, `x` = window centre).
pub fn diversity(cfg: &ExperimentConfig) -> Result<Vec<CsvRow>> {
    let users = users_or(cfg, &["ztpoisson:2"]);
    let err = err_or(cfg, ErrorForm::Exp);
    diversity_rows(&users, &cfg.fading, &err, &grid_or(&cfg.snr_db, "0:2.5:45"), cfg.window, None)
}

pub(crate) fn diversity_rows(
    users: &[UserCountModel],
    fading: &FadingModel,
    err: &ErrorModel,
    snr_db: &[f64],
    window: (f64, f64),
    mc: Option<&SimConfig>,
) -> Result<Vec<CsvRow>> {
    let mut rows = error_rate_rows(users, fading, err, snr_db, mc)?;
    for u in users {
        let label = u.to_string();
        let curve: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.method == Method::Quad && r.users == label)
            .map(|r| (r.x, r.value))
            .collect();
        let slope = diversity_order_fit(&curve, window)?;
        let mut fit = row(0.5 * (window.0 + window.1), slope, Method::Fit, u, fading);
        fit.err = err.to_string();
        rows.push(fit);
    }
    Ok(rows)
}

/// Kolmogorov–Smirnov distance of the normalised best gain to the Gumbel
/// law, for Poisson users and (at integer means) the same fixed count.
pub fn gumbel(cfg: &ExperimentConfig) -> Result<Vec<CsvRow>> {
    let sim = sim(cfg, 100_000)?.ok_or_else(|| Error::Parse("gumbel needs mc_trials > 0".into()))?;
    let mut rows = Vec::new();
    for lambda in grid_or(&cfg.lambda_grid, "10,100,1000") {
        let p = UserCountModel::poisson(lambda)?;
        rows.push(row(lambda, mc_gumbel_ks(lambda, &cfg.fading, &sim)?, Method::Mc, &p, &cfg.fading));
        if lambda.fract() == 0.0 {
            let n = lambda as u64;
            let d = UserCountModel::deterministic(n);
            rows.push(row(lambda, mc_gumbel_ks_fixed(n, &cfg.fading, &sim)?, Method::Mc, &d, &cfg.fading));
        }
    }
    Ok(rows)
}
