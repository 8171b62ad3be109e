//! Engle-Granger two-step cointegration: OLS of one integrated series on
//! another, then a unit-root test on the residuals with critical values that
//! account for the estimated cointegrating vector.
//!
//! The residual series doubles as the "corrected" version of the response:
//! the part of it that is not explained by the long-run relationship with
//! the regressor.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::adf::coint_residual_test;
use super::ols::ols;
use super::{Decision, TestReport};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Result of a two-variable cointegrating regression `y = a + b x + e`.
#[derive(Debug, Clone, Serialize)]
pub struct CointegrationFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    /// Residual series on the same time axis as the inputs.
    #[serde(skip)]
    pub residuals: TimeSeries,
    /// Unit-root test on the residuals.
    pub adf: TestReport,
    /// Rejecting means the two series are cointegrated.
    pub decision: Decision,
}

/// Two-step cointegration test and correction for aligned series. The
/// residual unit-root test selects its lag order by SBIC up to the
/// sample-size rule `floor(4 * (n/100)^(1/4))`.
pub fn engle_granger(y: &TimeSeries, x: &TimeSeries) -> Result<CointegrationFit> {
    if y.step != x.step
        || y.start_year != x.start_year
        || y.start_month != x.start_month
        || y.len() != x.len()
    {
        return Err(Error::Dimension(format!(
            "series {:?} and {:?} are not on one time axis; align them first",
            y.label, x.label
        )));
    }
    let n = y.len();
    let x_mean = x.mean();
    if x.values.iter().all(|v| (v - x_mean).abs() < 1e-300) {
        return Err(Error::Degenerate(format!(
            "regressor {:?} is constant; no cointegrating regression exists",
            x.label
        )));
    }
    let design = DMatrix::from_fn(n, 2, |r, c| if c == 0 { 1.0 } else { x.values[r] });
    let resp = DVector::from_fn(n, |r, _| y.values[r]);
    let fit = ols(&design, &resp)?;
    let resid: Vec<f64> = fit.residuals.iter().copied().collect();
    let resp_ss: f64 = resp.iter().map(|v| v * v).sum();
    let adf = if fit.rss <= 1e-16 * resp_ss.max(1e-300) {
        // exact linear relation: the residual series is numerically zero and
        // the unit-root regression would be degenerate, so report the
        // strongest possible rejection directly
        TestReport {
            name: "engle-granger".into(),
            statistic: f64::NEG_INFINITY,
            p_value: None,
            critical_values: BTreeMap::new(),
            lags: 0,
            n_effective: n.saturating_sub(1),
            decision: Decision::Reject,
            notes: "H0: no cointegration; residuals are numerically zero (exact fit)".into(),
        }
    } else {
        let max_lag = (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
        coint_residual_test(&resid, max_lag)?
    };
    let decision = adf.decision;
    let residuals = TimeSeries::new(
        format!("{} ~ {}", y.label, x.label),
        y.step,
        y.start_year,
        y.start_month,
        resid,
    )?;
    Ok(CointegrationFit {
        intercept: fit.beta[0],
        slope: fit.beta[1],
        r_squared: fit.r_squared(&resp),
        residuals,
        adf,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Step;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn annual(label: &str, values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(label, Step::Annual, 1880, 1, values).unwrap()
    }

    fn random_walk(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; n];
        for t in 1..n {
            x[t] = x[t - 1] + rng.sample::<f64, _>(StandardNormal);
        }
        x
    }

    #[test]
    fn recovers_cointegrating_vector() {
        let n = 300;
        let xw = random_walk(n, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let yv: Vec<f64> = xw
            .iter()
            .map(|v| 4.0 + 1.5 * v + 0.5 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let fit = engle_granger(&annual("y", yv), &annual("x", xw)).unwrap();
        assert!((fit.slope - 1.5).abs() < 0.05, "slope {}", fit.slope);
        assert!((fit.intercept - 4.0).abs() < 0.5, "intercept {}", fit.intercept);
        assert_eq!(fit.decision, Decision::Reject, "cointegration should be detected");
        assert!(fit.r_squared > 0.9);
        assert_eq!(fit.residuals.len(), n);
        let mean: f64 = fit.residuals.values.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 1e-9, "OLS residuals are centered");
    }

    #[test]
    fn independent_walks_are_usually_not_cointegrated() {
        let mut rejections = 0;
        for seed in 0..20 {
            let y = annual("y", random_walk(250, 400 + 2 * seed));
            let x = annual("x", random_walk(250, 401 + 2 * seed));
            let fit = engle_granger(&y, &x).unwrap();
            if fit.decision == Decision::Reject {
                rejections += 1;
            }
        }
        assert!(rejections <= 4, "{rejections}/20 spurious cointegrations");
    }

    #[test]
    fn residuals_are_orthogonal_to_constant_and_regressor() {
        let xw = random_walk(200, 31);
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let yv: Vec<f64> = xw
            .iter()
            .map(|v| -2.0 + 0.8 * v + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let fit = engle_granger(&annual("y", yv.clone()), &annual("x", xw.clone())).unwrap();
        let e = &fit.residuals.values;
        let scale_y: f64 = yv.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dot_const: f64 = e.iter().sum();
        let dot_x: f64 = e.iter().zip(&xw).map(|(a, b)| a * b).sum();
        let scale_x: f64 = xw.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(dot_const.abs() / scale_y < 1e-8, "constant leak {dot_const}");
        assert!(dot_x.abs() / (scale_x * scale_y) < 1e-8, "regressor leak {dot_x}");
    }

    #[test]
    fn perfect_linear_relation_gives_zero_residuals() {
        let xw = random_walk(150, 33);
        let yv: Vec<f64> = xw.iter().map(|v| 3.0 + 1.0 * v).collect();
        let fit = engle_granger(&annual("y", yv), &annual("x", xw)).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-9);
        assert!((fit.intercept - 3.0).abs() < 1e-9);
        for v in &fit.residuals.values {
            assert!(v.abs() < 1e-8, "residual {v}");
        }
    }

    #[test]
    fn misaligned_series_rejected() {
        let y = annual("y", random_walk(100, 9));
        let x = TimeSeries::new("x", Step::Annual, 1881, 1, random_walk(100, 10)).unwrap();
        assert!(matches!(engle_granger(&y, &x), Err(Error::Dimension(_))));
    }

    #[test]
    fn constant_regressor_is_degenerate() {
        let y = annual("y", random_walk(100, 13));
        let x = annual("x", vec![7.5; 100]);
        assert!(matches!(engle_granger(&y, &x), Err(Error::Degenerate(_))));
    }

    #[test]
    fn residual_label_names_both_series() {
        let y = annual("temp", random_walk(120, 11));
        let x = annual("co2", random_walk(120, 12));
        // force a usable fit even if not cointegrated
        let fit = engle_granger(&y, &x).unwrap();
        assert_eq!(fit.residuals.label, "temp ~ co2");
        assert_eq!(fit.residuals.start_year, 1880);
    }
}
