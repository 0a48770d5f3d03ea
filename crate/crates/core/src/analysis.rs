//! Structural checks on the metrics: complete monotonicity in the user
//! count, Laplace-transform ordering of count laws, Jensen gaps, the
//! regular-variation exponent of `t(u)` and fitted diversity orders.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::fading::FadingModel;
use crate::metrics::{
    avg_error_random_n, avg_error_real_n, ergodic_capacity_random_n, ErrorForm, ErrorModel,
    SnrPoint,
};
use crate::numerics::forward_differences;
use crate::usercount::UserCountModel;

/// Grid size used when a verdict is needed as a precondition.
pub const LT_GRID: usize = 1001;
/// Tolerance paired with [`LT_GRID`].
pub const LT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmViolation {
    pub order: usize,
    pub index: usize,
    /// `(−1)^k Δ^k seq[index]`, which was below `−tol` times the local scale.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmReport {
    pub max_order_checked: usize,
    pub first_violation: Option<CmViolation>,
    pub tolerance: f64,
}

impl CmReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `(−1)^k Δ^k seq ≥ −tol · max|seq[i..=i+k]|` for `k = 0..=max_order`.
pub fn check_cm(seq: &[f64], max_order: usize, tol: f64) -> Result<CmReport> {
    if seq.len() <= max_order {
        return Err(Error::Length {
            len: seq.len(),
            order: max_order,
        });
    }
    for k in 0..=max_order {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let d = forward_differences(seq, k)?;
        for (i, &v) in d.iter().enumerate() {
            let scale = seq[i..=i + k].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if sign * v < -tol * scale {
                return Ok(CmReport {
                    max_order_checked: k,
                    first_violation: Some(CmViolation {
                        order: k,
                        index: i,
                        magnitude: sign * v,
                    }),
                    tolerance: tol,
                });
            }
        }
    }
    Ok(CmReport {
        max_order_checked: max_order,
        first_violation: None,
        tolerance: tol,
    })
}

/// Complete monotonicity of the first differences of `seq`.
pub fn check_cmd(seq: &[f64], max_order: usize, tol: f64) -> Result<CmReport> {
    if seq.len() <= max_order + 1 {
        return Err(Error::Length {
            len: seq.len(),
            order: max_order + 1,
        });
    }
    check_cm(&forward_differences(seq, 1)?, max_order, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `X ≤_Lt Y`: `U_X(t) ≥ U_Y(t)` on the grid.
    XleY,
    YleX,
    /// Both directions hold on the grid.
    Equivalent,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingVerdict {
    pub relation: Relation,
    /// Largest amount by which the reported relation is violated on the
    /// grid (within tolerance); for `Incomparable`, the smaller of the two
    /// directions' violations.
    pub max_violation: f64,
    pub grid_size: usize,
}

/// Laplace-transform order of two count laws, decided by comparing their
/// generating functions on a uniform grid over `[0, 1]`.
pub fn lt_order_check(x: &UserCountModel, y: &UserCountModel, grid: usize, tol: f64) -> Result<OrderingVerdict> {
    if grid < 11 {
        return domain(format!("ordering grid needs at least 11 points, got {grid}"));
    }
    let mut x_below = 0.0f64; // worst U_Y − U_X
    let mut y_below = 0.0f64; // worst U_X − U_Y
    for i in 0..grid {
        let t = i as f64 / (grid - 1) as f64;
        let d = x.pgf_at(t) - y.pgf_at(t);
        x_below = x_below.max(-d);
        y_below = y_below.max(d);
    }
    let (xle, yle) = (x_below <= tol, y_below <= tol);
    let (relation, max_violation) = match (xle, yle) {
        (true, true) => (Relation::Equivalent, x_below.max(y_below)),
        (true, false) => (Relation::XleY, x_below),
        (false, true) => (Relation::YleX, y_below),
        (false, false) => (Relation::Incomparable, x_below.min(y_below)),
    };
    Ok(OrderingVerdict {
        relation,
        max_violation,
        grid_size: grid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsequenceRow {
    pub snr_db: f64,
    pub error_x: f64,
    pub error_y: f64,
    pub capacity_x: f64,
    pub capacity_y: f64,
    /// Whether both metrics are ordered as the verdict predicts.
    pub holds: bool,
}

fn ordered(smaller: f64, larger: f64) -> bool {
    smaller <= larger + 1e-12 * larger.abs().max(smaller.abs())
}

/// Error rates and capacities of both laws at every SNR, checked against
/// the ordering implied by their Laplace-transform verdict: the smaller law
/// has the larger error rate and the smaller capacity.
pub fn ordering_consequences(
    x: &UserCountModel,
    y: &UserCountModel,
    fading: &FadingModel,
    err: &ErrorModel,
    rhos: &[SnrPoint],
) -> Result<(OrderingVerdict, Vec<ConsequenceRow>)> {
    let verdict = lt_order_check(x, y, LT_GRID, LT_TOL)?;
    if verdict.relation == Relation::Incomparable {
        return Err(Error::Precondition(format!("{x} and {y} are not Laplace-transform ordered")));
    }
    let rows = rhos
        .iter()
        .map(|&rho| {
            let error_x = avg_error_random_n(rho, x, fading, err)?;
            let error_y = avg_error_random_n(rho, y, fading, err)?;
            let capacity_x = ergodic_capacity_random_n(rho, x, fading)?;
            let capacity_y = ergodic_capacity_random_n(rho, y, fading)?;
            let xle = ordered(error_y, error_x) && ordered(capacity_x, capacity_y);
            let yle = ordered(error_x, error_y) && ordered(capacity_y, capacity_x);
            let holds = match verdict.relation {
                Relation::XleY => xle,
                Relation::YleX => yle,
                Relation::Equivalent => xle && yle,
                Relation::Incomparable => unreachable!(),
            };
            Ok(ConsequenceRow {
                snr_db: rho.db(),
                error_x,
                error_y,
                capacity_x,
                capacity_y,
                holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((verdict, rows))
}

/// True iff every row of [`ordering_consequences`] holds.
pub fn ordering_consequence_check(
    x: &UserCountModel,
    y: &UserCountModel,
    fading: &FadingModel,
    err: &ErrorModel,
    rhos: &[SnrPoint],
) -> Result<bool> {
    let (_, rows) = ordering_consequences(x, y, fading, err, rhos)?;
    Ok(rows.iter().all(|r| r.holds))
}

/// Error rate under random users minus the error rate with the mean count
/// (a real exponent when the mean is not an integer).
pub fn jensen_gap(rho: SnrPoint, users: &UserCountModel, fading: &FadingModel, err: &ErrorModel) -> Result<f64> {
    let mean = users.mean();
    if !(mean >= 1.0) {
        return Err(Error::Precondition(format!("Jensen comparator needs a mean of at least 1, got {mean}")));
    }
    Ok(avg_error_random_n(rho, users, fading, err)? - avg_error_real_n(rho, mean, fading, err)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenPoint {
    pub lambda: f64,
    pub gap: f64,
    /// `λ · gap / P̄e(λ)`, bounded when the gap is `O(P̄e(λ)/λ)`.
    pub normalized_gap: f64,
}

/// Jensen gaps for Poisson users over an increasing list of means.
pub fn jensen_tightness_scan(
    rho: SnrPoint,
    lambdas: &[f64],
    fading: &FadingModel,
    err: &ErrorModel,
) -> Result<Vec<JensenPoint>> {
    if lambdas.iter().any(|&l| !(l > 1.0)) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("means must be increasing and above 1".into()));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            let users = UserCountModel::poisson(lambda)?;
            let fixed = avg_error_real_n(rho, lambda, fading, err)?;
            let gap = avg_error_random_n(rho, &users, fading, err)? - fixed;
            Ok(JensenPoint {
                lambda,
                gap,
                normalized_gap: gap * lambda / fixed,
            })
        })
        .collect()
}

/// `t(u) = ρ B(ρx) e^{−u} / f(x)` with `x = F⁻¹(e^{−u})`.
pub fn t_function(u: f64, rho: SnrPoint, err: &ErrorModel, fading: &FadingModel) -> Result<f64> {
    if !(u > 0.0) {
        return domain(format!("t(u) needs u > 0, got {u}"));
    }
    let level = (-u).exp();
    if level == 0.0 {
        return Ok(0.0);
    }
    let x = if level > 0.5 {
        fading.upper_quantile(-(-u).exp_m1())?
    } else {
        fading.quantile(level)?
    };
    if x == 0.0 {
        return Ok(0.0);
    }
    let rho = rho.value();
    Ok(rho * err.b_at(rho * x) * level / fading.pdf_at(x))
}

/// Regular-variation exponent of `t` at the origin, from
/// `log(t(κu)/t(u))/log κ` at `u = 10⁻³, 10⁻⁴, 10⁻⁵`, extrapolated to
/// `u → 0` with a model `E + c/log(1/u) + d·u`.
pub fn rv_exponent_estimate(t: impl Fn(f64) -> Result<f64>, kappa: f64) -> Result<f64> {
    if !(kappa > 1.0) {
        return domain(format!("ratio must exceed 1, got {kappa}"));
    }
    let us = [1e-3, 1e-4, 1e-5];
    let mut est = [0.0; 3];
    for (e, &u) in est.iter_mut().zip(&us) {
        let (a, b) = (t(kappa * u)?, t(u)?);
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Instability(format!("t is not positive near 0 (u = {u})")));
        }
        *e = (a / b).ln() / kappa.ln();
    }
    if est.windows(2).any(|w| (w[0] - w[1]).abs() > 0.05) {
        return Err(Error::Instability(format!("exponent estimates disagree: {est:?}")));
    }
    let rows: Vec<[f64; 3]> = us.iter().map(|&u| [1.0, 1.0 / (1.0 / u).ln(), u]).collect();
    let sol = solve3(&rows, &est).ok_or_else(|| Error::Instability("singular extrapolation".into()))?;
    Ok(sol[0])
}

fn solve3(a: &[[f64; 3]], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot = m[col];
                for (dst, src) in m[r][col..].iter_mut().zip(&pivot[col..]) {
                    *dst -= f * src;
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Least-squares slope of `−log₁₀(error)` against `log₁₀(ρ)` using the
/// points whose SNR (in dB) lies inside `window`.
pub fn diversity_order_fit(curve: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(db, e)| *db >= window.0 && *db <= window.1 && *e > 0.0)
        .map(|&(db, e)| (db / 10.0, -e.log10()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Precondition(format!(
            "diversity fit needs at least 4 points in [{}, {}] dB, got {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Exponent of `t` at the origin for Rayleigh fading: `ηρ − 1` for the
/// exponential form and `ηρ/2 − 1` for the Q form.
pub fn rayleigh_t_exponent(rho: SnrPoint, err: &ErrorModel) -> f64 {
    let c = err.eta * rho.value();
    match err.form {
        ErrorForm::Exp => c - 1.0,
        ErrorForm::Q => c / 2.0 - 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{avg_error_fixed_n, ergodic_capacity_fixed_n, high_snr_asymptote};
    use std::f64::consts::PI;

    fn snr(r: f64) -> SnrPoint {
        SnrPoint::linear(r).unwrap()
    }

    #[test]
    fn cm_examples() {
        let harmonic: Vec<f64> = (0..=40).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        assert!(check_cm(&harmonic, 5, 1e-12).unwrap().passed());
        let squares: Vec<f64> = (0..20).map(|n| (n * n) as f64).collect();
        let r = check_cm(&squares, 3, 1e-12).unwrap();
        assert_eq!(r.first_violation.unwrap().order, 1);
        let errs: Vec<f64> = (1..=40)
            .map(|n| avg_error_fixed_n(snr(4.0), n, &FadingModel::Rayleigh, &ErrorModel::default()).unwrap())
            .collect();
        assert!(check_cm(&errs, 4, 1e-9).unwrap().passed());
        assert_eq!(check_cm(&[1.0, 0.5], 2, 1e-9), Err(Error::Length { len: 2, order: 2 }));
    }

    #[test]
    fn cm_hand_checked_differences() {
        // Δ(1/(n+1)) = −1/((n+1)(n+2)), Δ² = 2/((n+1)(n+2)(n+3))
        let s: Vec<f64> = (0..6).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let d1 = forward_differences(&s, 1).unwrap();
        let d2 = forward_differences(&s, 2).unwrap();
        assert!((d1[0] + 0.5).abs() < 1e-15);
        assert!((d2[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cmd_examples() {
        let logs: Vec<f64> = (0..30).map(|n| (n as f64 + 1.0).ln()).collect();
        assert!(check_cmd(&logs, 4, 1e-12).unwrap().passed());
        let exps: Vec<f64> = (0..20).map(|n| (n as f64).exp()).collect();
        assert_eq!(check_cmd(&exps, 3, 1e-12).unwrap().first_violation.unwrap().order, 1);
        let caps: Vec<f64> = (1..=40)
            .map(|n| ergodic_capacity_fixed_n(snr(10.0), n, &FadingModel::Rayleigh).unwrap())
            .collect();
        assert!(check_cmd(&caps, 3, 1e-9).unwrap().passed());
        assert!(check_cmd(&[1.0, 2.0, 3.0], 2, 1e-9).is_err());
    }

    #[test]
    fn lt_order_examples() {
        let p1 = UserCountModel::poisson(1.0).unwrap();
        let p2 = UserCountModel::poisson(2.0).unwrap();
        let v = lt_order_check(&p1, &p2, LT_GRID, LT_TOL).unwrap();
        assert_eq!(v.relation, Relation::XleY);
        assert_eq!(v.grid_size, LT_GRID);
        assert_eq!(lt_order_check(&p2, &p1, LT_GRID, LT_TOL).unwrap().relation, Relation::YleX);

        let g = UserCountModel::geometric(0.5).unwrap();
        assert!((g.pgf(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(lt_order_check(&g, &p1, LT_GRID, LT_TOL).unwrap().relation, Relation::XleY);

        let v = lt_order_check(&p2, &p2, LT_GRID, LT_TOL).unwrap();
        assert_eq!(v.relation, Relation::Equivalent);
        assert_eq!(v.max_violation, 0.0);
        assert!(lt_order_check(&p1, &p2, 5, LT_TOL).is_err());
    }

    #[test]
    fn lt_order_detects_crossing() {
        // det:2 has U(0) = 0 < U_geom(0) but U(t) = t² > geometric for t near 1
        let d = UserCountModel::deterministic(2);
        let g = UserCountModel::geometric(0.2).unwrap();
        let v = lt_order_check(&d, &g, LT_GRID, LT_TOL).unwrap();
        assert_eq!(v.relation, Relation::Incomparable);
        assert!(v.max_violation > 0.0);
        let err = ErrorModel::default();
        let r = ordering_consequence_check(&d, &g, &FadingModel::Rayleigh, &err, &[snr(1.0)]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn lt_order_is_transitive_on_examples() {
        let g = UserCountModel::geometric(0.5).unwrap();
        let p1 = UserCountModel::poisson(1.0).unwrap();
        let p2 = UserCountModel::poisson(2.0).unwrap();
        assert_eq!(lt_order_check(&g, &p2, LT_GRID, LT_TOL).unwrap().relation, Relation::XleY);
        let g4 = UserCountModel::geometric_with_mean(4.0).unwrap();
        let g2 = UserCountModel::geometric_with_mean(2.0).unwrap();
        assert_eq!(lt_order_check(&g2, &g4, LT_GRID, LT_TOL).unwrap().relation, Relation::XleY);
        assert_eq!(lt_order_check(&p1, &p2, LT_GRID, LT_TOL).unwrap().relation, Relation::XleY);
    }

    #[test]
    fn consequence_examples() {
        let rhos: Vec<SnrPoint> = [0.0, 5.0, 10.0, 15.0, 20.0]
            .iter()
            .map(|&db| SnrPoint::from_db(db).unwrap())
            .collect();
        let err = ErrorModel::default();
        let g = UserCountModel::geometric_with_mean(4.0).unwrap();
        let p = UserCountModel::poisson(4.0).unwrap();
        let (verdict, rows) = ordering_consequences(&g, &p, &FadingModel::Rayleigh, &err, &rhos).unwrap();
        assert_eq!(verdict.relation, Relation::XleY);
        assert!(rows.iter().all(|r| r.holds && r.error_x > r.error_y && r.capacity_x < r.capacity_y));
        assert!(ordering_consequence_check(&p, &p, &FadingModel::Rayleigh, &err, &rhos).unwrap());
        let p2 = UserCountModel::poisson(2.0).unwrap();
        let p8 = UserCountModel::poisson(8.0).unwrap();
        assert!(ordering_consequence_check(&p2, &p8, &FadingModel::Rayleigh, &err, &rhos).unwrap());
    }

    #[test]
    fn jensen_gap_examples() {
        let err = ErrorModel::default();
        let d = UserCountModel::deterministic(4);
        assert!(jensen_gap(snr(4.0), &d, &FadingModel::Rayleigh, &err).unwrap().abs() < 1e-10);
        let p4 = UserCountModel::poisson(4.0).unwrap();
        let gap = jensen_gap(snr(4.0), &p4, &FadingModel::Rayleigh, &err).unwrap();
        // mixture sum minus the Beta-integral value at N = 4
        let mix: f64 = (0..=80)
            .map(|k| {
                let w = p4.pmf(k);
                if k == 0 {
                    w
                } else {
                    w * avg_error_fixed_n(snr(4.0), k, &FadingModel::Rayleigh, &err).unwrap()
                }
            })
            .sum();
        let fixed = 4.0 * 6.0 * 24.0 / 40320.0;
        assert!(gap > 0.0);
        assert!((gap - (mix - fixed)).abs() < 1e-10);
        let p16 = UserCountModel::poisson(16.0).unwrap();
        assert!(jensen_gap(snr(4.0), &p16, &FadingModel::Rayleigh, &err).unwrap() < gap);
        let small = UserCountModel::poisson(0.5).unwrap();
        assert!(jensen_gap(snr(4.0), &small, &FadingModel::Rayleigh, &err).is_err());
    }

    #[test]
    fn tightness_scan_bounded() {
        let lambdas = [4.0, 16.0, 64.0, 256.0];
        for err in [ErrorModel::default(), ErrorModel::q_function(1.0, 2.0).unwrap()] {
            let scan = jensen_tightness_scan(SnrPoint::from_db(6.0).unwrap(), &lambdas, &FadingModel::Rayleigh, &err)
                .unwrap();
            assert!(scan.windows(2).all(|w| w[1].gap < w[0].gap));
            let (a, b) = (scan[2].normalized_gap, scan[3].normalized_gap);
            assert!(a.max(b) / a.min(b) < 2.0, "{err}: {scan:?}");
        }
        assert!(jensen_tightness_scan(snr(1.0), &[4.0, 2.0], &FadingModel::Rayleigh, &ErrorModel::default()).is_err());
    }

    #[test]
    fn t_function_exponential_closed_form() {
        let ray = FadingModel::Rayleigh;
        let e = ErrorModel::exponential(1.0, 1.0).unwrap();
        let v = t_function(2f64.ln(), snr(2.0), &e, &ray).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        for &rho in &[0.5, 2.0, 7.0] {
            for &u in &[1e-4f64, 0.01, 0.3, 1.0, 5.0, 20.0] {
                let g = (-(-u).exp_m1()).powf(rho - 1.0) * (-u).exp();
                let closed_form = rho * g;
                let v = t_function(u, snr(rho), &e, &ray).unwrap();
                assert!((v - closed_form).abs() < 1e-10 * closed_form.max(1.0), "ρ={rho} u={u}");
            }
        }
        // with η ≠ 1 the definition carries an extra factor η
        let e3 = ErrorModel::exponential(0.5, 3.0).unwrap();
        for &u in &[0.01f64, 0.5, 3.0] {
            let c = 3.0 * 2.0;
            let expect = 0.5 * 3.0 * 2.0 * (-(-u).exp_m1()).powf(c - 1.0) * (-u).exp();
            let v = t_function(u, snr(2.0), &e3, &ray).unwrap();
            assert!((v - expect).abs() < 1e-10 * expect.max(1e-300));
        }
        assert_eq!(t_function(800.0, snr(2.0), &e, &ray).unwrap(), 0.0);
        assert!(t_function(40.0, snr(2.0), &e, &ray).unwrap() < 1e-16);
        assert!(t_function(0.0, snr(2.0), &e, &ray).is_err());
    }

    #[test]
    fn t_function_q_closed_form() {
        let ray = FadingModel::Rayleigh;
        for &(alpha, eta, rho) in &[(1.0, 2.0, 1.0), (0.5, 1.0, 3.0), (1.0, 2.0, 4.0)] {
            let q = ErrorModel::q_function(alpha, eta).unwrap();
            let c: f64 = eta * rho;
            for &u in &[1e-3f64, 0.05, 0.7, 2.0, 6.0] {
                let one_minus = -(-u).exp_m1();
                let expect = alpha * c.sqrt() * one_minus.powf(c / 2.0 - 1.0) * (-u).exp()
                    / (2.0 * (-2.0 * PI * one_minus.ln()).sqrt());
                let v = t_function(u, snr(rho), &q, &ray).unwrap();
                assert!(((v - expect) / expect).abs() < 1e-8, "u={u}: {v} vs {expect}");
            }
        }
    }

    #[test]
    fn rv_exponent_examples() {
        let ray = FadingModel::Rayleigh;
        for &c in &[1.0, 2.0, 4.0] {
            let e = ErrorModel::default();
            let q = ErrorModel::q_function(1.0, 2.0).unwrap();
            for err in [e, q] {
                let rho = snr(c / err.eta);
                let est = rv_exponent_estimate(|u| t_function(u, rho, &err, &ray), 2.0).unwrap();
                let target = rayleigh_t_exponent(rho, &err);
                assert!((est - target).abs() < 0.02, "{err} ηρ={c}: {est} vs {target}");
            }
        }
    }

    #[test]
    fn rv_exponent_rejects_unstable_input() {
        let wild = |u: f64| Ok(if u < 5e-5 { u.powi(3) } else { u });
        assert!(matches!(rv_exponent_estimate(wild, 2.0), Err(Error::Instability(_))));
        assert!(rv_exponent_estimate(Ok, 1.0).is_err());
        let pure = rv_exponent_estimate(|u| Ok(3.0 * u.powf(1.7)), 3.0).unwrap();
        assert!((pure - 1.7).abs() < 1e-9);
    }

    #[test]
    fn diversity_fit_examples() {
        let err = ErrorModel::default();
        let window = (35.0, 45.0);
        let dbs: Vec<f64> = (0..=10).map(|i| 35.0 + i as f64).collect();
        let curve = |users: UserCountModel, fading: FadingModel| -> Vec<(f64, f64)> {
            dbs.iter()
                .map(|&db| {
                    let r = SnrPoint::from_db(db).unwrap();
                    (db, avg_error_random_n(r, &users, &fading, &err).unwrap())
                })
                .collect()
        };
        let ztp = curve(UserCountModel::zero_truncated_poisson(2.0).unwrap(), FadingModel::Rayleigh);
        assert!((diversity_order_fit(&ztp, window).unwrap() - 1.0).abs() < 0.15);
        let d2 = curve(UserCountModel::deterministic(2), FadingModel::Rayleigh);
        assert!((diversity_order_fit(&d2, window).unwrap() - 2.0).abs() < 0.2);
        let n2 = curve(UserCountModel::deterministic(1), FadingModel::nakagami(2.0).unwrap());
        assert!((diversity_order_fit(&n2, window).unwrap() - 2.0).abs() < 0.2);
        assert!(diversity_order_fit(&ztp[..3], window).is_err());

        // the asymptote itself has slope exactly k₀d
        let users = UserCountModel::deterministic(2);
        let asym: Vec<(f64, f64)> = dbs
            .iter()
            .map(|&db| (db, high_snr_asymptote(SnrPoint::from_db(db).unwrap(), &users, &FadingModel::Rayleigh, &err)))
            .collect();
        assert!((diversity_order_fit(&asym, window).unwrap() - 2.0).abs() < 1e-3);
    }
}
