//! KPSS stationarity test (level version) with a Bartlett-window long-run
//! variance estimate.

use std::collections::BTreeMap;

use super::{Decision, TestReport};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Asymptotic critical values for the level-stationarity statistic.
const KPSS_LEVEL_CV: [(&str, f64); 4] =
    [("10%", 0.347), ("5%", 0.463), ("2.5%", 0.574), ("1%", 0.739)];

/// KPSS test of the null "level stationary". Rejecting supports a unit root,
/// the mirror image of the ADF null.
pub fn kpss_test(series: &TimeSeries) -> Result<TestReport> {
    let x = &series.values;
    let n = x.len();
    if n < 30 {
        return Err(Error::SampleSize(format!(
            "{n} observations are too few for a KPSS test (need at least 30)"
        )));
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let e: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let gamma0: f64 = e.iter().map(|v| v * v).sum::<f64>() / nf;
    if gamma0 <= 0.0 {
        return Err(Error::Degenerate("series is constant".into()));
    }

    // Bartlett-window long-run variance with the common n^(1/4) bandwidth
    let bandwidth = (4.0 * (nf / 100.0).powf(0.25)).floor() as usize;
    let mut lrv = gamma0;
    for j in 1..=bandwidth {
        let gamma_j: f64 = e[j..].iter().zip(&e[..n - j]).map(|(a, b)| a * b).sum::<f64>() / nf;
        lrv += 2.0 * (1.0 - j as f64 / (bandwidth as f64 + 1.0)) * gamma_j;
    }
    if lrv <= 0.0 {
        return Err(Error::Degenerate(
            "long-run variance estimate is not positive".into(),
        ));
    }

    let mut partial = 0.0;
    let mut sum_sq_partial = 0.0;
    for v in &e {
        partial += v;
        sum_sq_partial += partial * partial;
    }
    let statistic = sum_sq_partial / (nf * nf * lrv);

    let critical_values: BTreeMap<String, f64> =
        KPSS_LEVEL_CV.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let decision = if statistic > critical_values["5%"] {
        Decision::Reject
    } else {
        Decision::FailToReject
    };
    Ok(TestReport {
        name: "kpss".into(),
        statistic,
        p_value: None,
        critical_values,
        lags: bandwidth,
        n_effective: n,
        decision,
        notes: format!("H0: series {:?} is level stationary", series.label),
    })
}
