//! Augmented Dickey-Fuller unit-root test with SBIC lag selection and
//! response-surface critical values.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::ols::{ols, sbic};
use super::{Decision, TestReport};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Response-surface coefficients `cv(T) = b0 + b1/T + b2/T^2 + b3/T^3` for
/// the Dickey-Fuller t distribution with a constant term.
const ADF_CONST_SURFACE: [(&str, [f64; 4]); 3] = [
    ("1%", [-3.43035, -6.5393, -16.786, -79.433]),
    ("5%", [-2.86154, -2.8903, -4.234, -40.04]),
    ("10%", [-2.56677, -1.5384, -2.809, 0.0]),
];

/// Same surfaces for the residual-based two-variable cointegration test with
/// a constant in the cointegrating regression.
const COINT_TWO_VAR_SURFACE: [(&str, [f64; 4]); 3] = [
    ("1%", [-3.89644, -10.9519, -22.527, 0.0]),
    ("5%", [-3.33613, -6.1101, -6.823, 0.0]),
    ("10%", [-3.04445, -4.2412, -2.720, 0.0]),
];

fn surface_cv(table: &[(&str, [f64; 4]); 3], t: f64) -> BTreeMap<String, f64> {
    table
        .iter()
        .map(|(name, b)| {
            let cv = b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t);
            (name.to_string(), cv)
        })
        .collect()
}

/// t-statistic on the lagged level in the ADF regression with `k` lagged
/// differences, using observations from level index `t_start` on.
fn adf_stat(x: &[f64], k: usize, intercept: bool, t_start: usize) -> Result<(f64, f64, usize, usize)> {
    let n = x.len();
    debug_assert!(t_start >= k + 1);
    if n <= t_start {
        return Err(Error::SampleSize(format!(
            "{n} observations leave no rows for an ADF regression starting at {t_start}"
        )));
    }
    let rows = n - t_start;
    let ncols = 1 + usize::from(intercept) + k;
    let mut design = DMatrix::zeros(rows, ncols);
    let mut resp = DVector::zeros(rows);
    for (r, t) in (t_start..n).enumerate() {
        resp[r] = x[t] - x[t - 1];
        design[(r, 0)] = x[t - 1];
        let mut c = 1;
        if intercept {
            design[(r, c)] = 1.0;
            c += 1;
        }
        for i in 1..=k {
            design[(r, c)] = x[t - i] - x[t - i - 1];
            c += 1;
        }
    }
    let fit = ols(&design, &resp)?;
    Ok((fit.t_stat(0), fit.rss, rows, ncols))
}

/// Pick the lagged-difference order in `0..=max_lag` by SBIC on the common
/// sample, then run the test on the full usable sample.
fn adf_engine(
    x: &[f64],
    max_lag: usize,
    intercept: bool,
    name: &str,
    notes: &str,
    table: &[(&str, [f64; 4]); 3],
) -> Result<TestReport> {
    if x.len() <= max_lag + 10 {
        return Err(Error::SampleSize(format!(
            "{} observations are too few for an ADF test with up to {max_lag} lags",
            x.len()
        )));
    }
    let common_start = max_lag + 1;
    let mut best = (0usize, f64::INFINITY);
    for k in 0..=max_lag {
        let (_, rss, rows, ncols) = adf_stat(x, k, intercept, common_start)?;
        let crit = sbic(rss, rows, ncols);
        if crit < best.1 {
            best = (k, crit);
        }
    }
    let k = best.0;
    let (stat, _, rows, _) = adf_stat(x, k, intercept, k + 1)?;
    let critical_values = surface_cv(table, rows as f64);
    let decision = if stat < critical_values["5%"] {
        Decision::Reject
    } else {
        Decision::FailToReject
    };
    Ok(TestReport {
        name: name.into(),
        statistic: stat,
        p_value: None,
        critical_values,
        lags: k,
        n_effective: rows,
        decision,
        notes: notes.into(),
    })
}

/// Augmented Dickey-Fuller test with intercept. Rejecting the null of a unit
/// root supports (level) stationarity.
pub fn adf_test(x: &TimeSeries, max_lag: usize) -> Result<TestReport> {
    adf_engine(
        &x.values,
        max_lag,
        true,
        "adf",
        &format!("H0: series {:?} has a unit root", x.label),
        &ADF_CONST_SURFACE,
    )
}

/// ADF on cointegrating-regression residuals: no intercept (the residuals
/// are centered by construction) and critical values that account for the
/// estimated cointegrating vector.
pub(crate) fn coint_residual_test(resid: &[f64], max_lag: usize) -> Result<TestReport> {
    adf_engine(
        resid,
        max_lag,
        false,
        "engle-granger",
        "H0: no cointegration (residuals have a unit root)",
        &COINT_TWO_VAR_SURFACE,
    )
}
