//! Econometric building blocks: unit-root and stationarity tests,
//! cointegration correction, and Granger causality in the time and
//! frequency domains.
//!
//! All tests report their statistic together with the critical values they
//! were judged against, so downstream tables can be rebuilt without rerunning
//! anything.

mod adf;
mod cointegration;
mod granger;
mod kpss;
pub(crate) mod ols;
mod spectral;

use std::collections::BTreeMap;

use serde::Serialize;

pub use adf::adf_test;
pub use cointegration::{engle_granger, CointegrationFit};
pub use granger::granger_time;
pub use kpss::kpss_test;
pub use spectral::{granger_frequency, FreqGrangerBand};

// Value-level variants (no report formatting) for in-crate diagnostics.
#[allow(unused_imports)]
pub(crate) use granger::granger_time_values;
#[allow(unused_imports)]
pub(crate) use spectral::granger_frequency_values;

/// Outcome of a hypothesis test at its reference level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    Reject,
    FailToReject,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decision::Reject => write!(f, "reject"),
            Decision::FailToReject => write!(f, "fail to reject"),
        }
    }
}

/// A hypothesis test result with enough context to print or serialize.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    /// Short test identifier, e.g. `"adf"`.
    pub name: String,
    pub statistic: f64,
    /// Exact p-value where the reference distribution provides one.
    pub p_value: Option<f64>,
    /// Critical values keyed by level, e.g. `"5%"`.
    pub critical_values: BTreeMap<String, f64>,
    /// Lag order used (after any information-criterion selection).
    pub lags: usize,
    /// Observations actually entering the test regression.
    pub n_effective: usize,
    /// Decision at the 5% level.
    pub decision: Decision,
    /// Human-readable context; starts with what the null hypothesis states.
    pub notes: String,
}

impl TestReport {
    pub fn summary(&self) -> String {
        let p = match self.p_value {
            Some(p) => format!(", p = {p:.4}"),
            None => String::new(),
        };
        format!(
            "{}: stat = {:.4}{} (lags {}, n {}) -> {} H0 [{}]",
            self.name, self.statistic, p, self.lags, self.n_effective, self.decision, self.notes
        )
    }
}

/// Linear interpolation between sorted order statistics; `q` in [0, 1].
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if frac == 0.0 || i + 1 >= sorted.len() {
        sorted[i]
    } else {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates_between_order_statistics() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 5.0);
        assert_eq!(quantile_sorted(&v, 0.5), 3.0);
        assert!((quantile_sorted(&v, 0.9) - 4.6).abs() < 1e-12);
    }

    #[test]
    fn report_summary_mentions_decision() {
        let rep = TestReport {
            name: "demo".into(),
            statistic: -1.5,
            p_value: Some(0.2),
            critical_values: BTreeMap::new(),
            lags: 2,
            n_effective: 100,
            decision: Decision::FailToReject,
            notes: "nothing happens".into(),
        };
        let s = rep.summary();
        assert!(s.contains("fail to reject"));
        assert!(s.contains("demo"));
    }
}
