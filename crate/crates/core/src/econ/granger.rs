//! Time-domain Granger causality with SBIC lag selection and an F test.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::ols::{ols, sbic};
use super::{Decision, TestReport};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Build the regression for `effect_t` on an intercept, `p` own lags and
/// (when `with_cause`) `p` cause lags, using rows from level index `start`.
fn design(
    cause: &[f64],
    effect: &[f64],
    p: usize,
    with_cause: bool,
    start: usize,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = effect.len();
    let rows = n - start;
    let ncols = 1 + p + if with_cause { p } else { 0 };
    let mut x = DMatrix::zeros(rows, ncols);
    let mut y = DVector::zeros(rows);
    for (r, t) in (start..n).enumerate() {
        y[r] = effect[t];
        x[(r, 0)] = 1.0;
        for i in 1..=p {
            x[(r, i)] = effect[t - i];
        }
        if with_cause {
            for i in 1..=p {
                x[(r, p + i)] = cause[t - i];
            }
        }
    }
    (x, y)
}

/// Does the past of `cause` improve one-step prediction of `effect` beyond
/// the effect's own past? The lag order is chosen by SBIC over the effect's
/// own autoregression on a common sample — selecting on the restricted model
/// keeps the choice independent of the coefficients under test, so the F test
/// retains its nominal size — then both models are refit on the full usable
/// sample and compared with an F test.
pub fn granger_time(cause: &TimeSeries, effect: &TimeSeries, max_lag: usize) -> Result<TestReport> {
    if cause.step != effect.step
        || cause.start_year != effect.start_year
        || cause.start_month != effect.start_month
        || cause.len() != effect.len()
    {
        return Err(Error::Dimension(format!(
            "series {:?} and {:?} are not on one time axis; align them first",
            cause.label, effect.label
        )));
    }
    let mut report = granger_time_values(&cause.values, &effect.values, max_lag)?;
    report.notes = format!(
        "H0: {:?} does not help predict {:?}",
        cause.label, effect.label
    );
    Ok(report)
}

/// `granger_time` on bare samples (shared by simulations and the public
/// wrapper).
pub(crate) fn granger_time_values(
    cause: &[f64],
    effect: &[f64],
    max_lag: usize,
) -> Result<TestReport> {
    if cause.len() != effect.len() {
        return Err(Error::Dimension(format!(
            "cause has {} observations, effect has {}",
            cause.len(),
            effect.len()
        )));
    }
    if max_lag == 0 {
        return Err(Error::InvalidParam("lag order must be at least 1".into()));
    }
    let n = effect.len();
    if n <= 3 * max_lag {
        return Err(Error::SampleSize(format!(
            "{n} observations are too few for Granger tests with up to {max_lag} lags"
        )));
    }

    let mut best = (1usize, f64::INFINITY);
    for p in 1..=max_lag {
        let (x, y) = design(cause, effect, p, false, max_lag);
        let fit = ols(&x, &y)?;
        let crit = sbic(fit.rss, fit.n, fit.k);
        if crit < best.1 {
            best = (p, crit);
        }
    }
    let p = best.0;

    let (xu, yu) = design(cause, effect, p, true, p);
    let unrestricted = ols(&xu, &yu)?;
    let (xr, yr) = design(cause, effect, p, false, p);
    let restricted = ols(&xr, &yr)?;

    let n_eff = unrestricted.n;
    let df2 = n_eff - unrestricted.k;
    let f_stat = ((restricted.rss - unrestricted.rss) / p as f64) / (unrestricted.rss / df2 as f64);
    let f_stat = f_stat.max(0.0);
    let dist = FisherSnedecor::new(p as f64, df2 as f64)
        .map_err(|e| Error::Degenerate(format!("F distribution undefined: {e}")))?;
    let p_value = 1.0 - dist.cdf(f_stat);
    let mut critical_values = BTreeMap::new();
    critical_values.insert("5%".to_string(), dist.inverse_cdf(0.95));
    let decision = if p_value < 0.05 { Decision::Reject } else { Decision::FailToReject };
    Ok(TestReport {
        name: "granger-time".into(),
        statistic: f_stat,
        p_value: Some(p_value),
        critical_values,
        lags: p,
        n_effective: n_eff,
        decision,
        notes: "H0: cause does not help predict effect".into(),
    })
}
