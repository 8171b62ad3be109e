//! Frequency-domain Granger causality.
//!
//! For each effect equation `y_t = a + sum own lags + sum_i b_i x_{t-i} + u`
//! the hypothesis "no causality at frequency w" is the pair of linear
//! restrictions `sum_i b_i cos(i w) = 0` and `sum_i b_i sin(i w) = 0`. The
//! equations for all effects are estimated jointly by feasible generalized
//! least squares so one Wald statistic can test the restrictions across all
//! effects at once. A frequency band is summarized by the average
//! per-observation Wald statistic over a grid of interior frequencies, and
//! its null distribution is obtained by a residual bootstrap under the
//! restricted (no-causality) model.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ols::ols;
use super::{quantile_sorted, Decision};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Number of interior frequencies averaged per band.
const BAND_GRID: usize = 64;

/// Band-level causality result.
#[derive(Debug, Clone, Serialize)]
pub struct FreqGrangerBand {
    /// Band bounds as angular frequencies per time step, `0 < low < high <= pi`.
    pub omega_low: f64,
    pub omega_high: f64,
    /// Average per-observation Wald statistic over the band.
    pub statistic: f64,
    /// 90% bootstrap critical value under the no-causality null.
    pub critical_value_90: f64,
    /// Autoregressive order of every equation in the system.
    pub lag: usize,
    pub n_bootstrap: usize,
    pub seed: u64,
    /// Reject = causality somewhere in the band at the 10% level.
    pub decision: Decision,
}

struct JointModel {
    /// Per-equation design `[1, own lags, cause lags]`, rows = common sample.
    designs: Vec<DMatrix<f64>>,
    responses: Vec<DVector<f64>>,
    n_eff: usize,
    n_eq: usize,
    k: usize,
    p: usize,
}

impl JointModel {
    fn build(cause: &[f64], effects: &[Vec<f64>], p: usize) -> Self {
        let n = cause.len();
        let n_eff = n - p;
        let k = 1 + 2 * p;
        let mut designs = Vec::with_capacity(effects.len());
        let mut responses = Vec::with_capacity(effects.len());
        for eff in effects {
            let mut x = DMatrix::zeros(n_eff, k);
            let mut y = DVector::zeros(n_eff);
            for (r, t) in (p..n).enumerate() {
                y[r] = eff[t];
                x[(r, 0)] = 1.0;
                for i in 1..=p {
                    x[(r, i)] = eff[t - i];
                    x[(r, p + i)] = cause[t - i];
                }
            }
            designs.push(x);
            responses.push(y);
        }
        JointModel { n_eq: effects.len(), designs, responses, n_eff, k, p }
    }

    /// Feasible GLS across equations: first-round OLS residuals estimate the
    /// contemporaneous error covariance, which then weights the joint normal
    /// equations. Returns stacked coefficients and their covariance.
    fn fgls(&self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let e = self.n_eq;
        let k = self.k;
        let mut resid = DMatrix::zeros(self.n_eff, e);
        for (i, (x, y)) in self.designs.iter().zip(&self.responses).enumerate() {
            let fit = ols(x, y)?;
            resid.set_column(i, &fit.residuals);
        }
        let sigma = resid.transpose() * &resid / self.n_eff as f64;
        let sigma_inv = sigma
            .clone()
            .cholesky()
            .ok_or_else(|| {
                Error::Conditioning("error covariance across equations is singular".into())
            })?
            .inverse();

        let mut lhs = DMatrix::zeros(e * k, e * k);
        let mut rhs = DVector::zeros(e * k);
        for i in 0..e {
            let xit = self.designs[i].transpose();
            for j in 0..e {
                let w = sigma_inv[(i, j)];
                let block = &xit * &self.designs[j] * w;
                lhs.view_mut((i * k, j * k), (k, k)).copy_from(&block);
                rhs.rows_mut(i * k, k).axpy(w, &(&xit * &self.responses[j]), 1.0);
            }
        }
        let chol = lhs
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Conditioning("joint design matrix is singular".into()))?;
        let theta = chol.solve(&rhs);
        let cov = chol.inverse();
        Ok((theta, cov))
    }

    /// Wald statistic for "no causality at frequency `omega`" jointly across
    /// equations.
    fn wald(&self, theta: &DVector<f64>, cov: &DMatrix<f64>, omega: f64) -> Result<f64> {
        let e = self.n_eq;
        let k = self.k;
        let p = self.p;
        let mut r = DMatrix::zeros(2 * e, e * k);
        for eq in 0..e {
            for i in 1..=p {
                let col = eq * k + p + i;
                r[(2 * eq, col)] = (i as f64 * omega).cos();
                r[(2 * eq + 1, col)] = (i as f64 * omega).sin();
            }
        }
        let v = &r * theta;
        let m = &r * cov * r.transpose();
        let solved = m
            .lu()
            .solve(&v)
            .ok_or_else(|| Error::Conditioning(format!(
                "restriction covariance is singular at frequency {omega:.4}"
            )))?;
        Ok(v.dot(&solved).max(0.0))
    }

    /// Average per-observation Wald statistic over interior frequencies of
    /// each band.
    fn band_stats(&self, bands: &[(f64, f64)]) -> Result<Vec<f64>> {
        let (theta, cov) = self.fgls()?;
        bands
            .iter()
            .map(|&(lo, hi)| {
                let mut acc = 0.0;
                for g in 0..BAND_GRID {
                    let omega = lo + (hi - lo) * (g as f64 + 0.5) / BAND_GRID as f64;
                    acc += self.wald(&theta, &cov, omega)?;
                }
                Ok(acc / (BAND_GRID as f64 * self.n_eff as f64))
            })
            .collect()
    }
}

/// Test whether `cause` Granger-causes the `effects` within frequency bands.
///
/// `lag` is the autoregressive order of every equation; `bands` are
/// `(omega_low, omega_high]` pairs with `0 < omega_low < omega_high <= pi`
/// (angular frequency per time step, so period = 2 pi / omega steps). The
/// null distribution of each band statistic comes from `n_bootstrap`
/// recursive residual resamples of the restricted model, with residual rows
/// drawn jointly across equations to keep their cross-correlation.
pub fn granger_frequency(
    cause: &TimeSeries,
    effects: &[&TimeSeries],
    lag: usize,
    bands: &[(f64, f64)],
    n_bootstrap: usize,
    seed: u64,
) -> Result<Vec<FreqGrangerBand>> {
    for eff in effects {
        if cause.step != eff.step
            || cause.start_year != eff.start_year
            || cause.start_month != eff.start_month
            || cause.len() != eff.len()
        {
            return Err(Error::Dimension(format!(
                "series {:?} and {:?} are not on one time axis; align them first",
                cause.label, eff.label
            )));
        }
    }
    let effect_values: Vec<Vec<f64>> = effects.iter().map(|e| e.values.clone()).collect();
    granger_frequency_values(&cause.values, &effect_values, lag, bands, n_bootstrap, seed)
}

/// `granger_frequency` on bare samples (shared by simulations and the public
/// wrapper).
pub(crate) fn granger_frequency_values(
    cause: &[f64],
    effects: &[Vec<f64>],
    lag: usize,
    bands: &[(f64, f64)],
    n_bootstrap: usize,
    seed: u64,
) -> Result<Vec<FreqGrangerBand>> {
    if effects.is_empty() {
        return Err(Error::InvalidParam("need at least one effect series".into()));
    }
    if bands.is_empty() {
        return Err(Error::InvalidParam("need at least one frequency band".into()));
    }
    if lag == 0 {
        return Err(Error::InvalidParam("lag order must be at least 1".into()));
    }
    if n_bootstrap < 20 {
        return Err(Error::InvalidParam(format!(
            "{n_bootstrap} bootstrap replications are too few for a 90% critical value"
        )));
    }
    let n = cause.len();
    for eff in effects {
        if eff.len() != n {
            return Err(Error::Dimension(format!(
                "cause has {n} observations but an effect series has {}",
                eff.len()
            )));
        }
    }
    if n <= 3 * lag {
        return Err(Error::SampleSize(format!(
            "{n} observations are too few for frequency-domain tests with lag {lag}"
        )));
    }
    for &(lo, hi) in bands {
        if !(lo > 0.0 && lo < hi && hi <= std::f64::consts::PI + 1e-12) {
            return Err(Error::InvalidParam(format!(
                "band ({lo}, {hi}] must satisfy 0 < low < high <= pi"
            )));
        }
    }

    let observed = JointModel::build(cause, effects, lag).band_stats(bands)?;

    // Restricted model per equation: intercept + own lags only.
    let p = lag;
    let n_eff = n - p;
    let mut coef = Vec::with_capacity(effects.len());
    let mut resid = DMatrix::zeros(n_eff, effects.len());
    for (e, eff) in effects.iter().enumerate() {
        let mut x = DMatrix::zeros(n_eff, 1 + p);
        let mut y = DVector::zeros(n_eff);
        for (r, t) in (p..n).enumerate() {
            y[r] = eff[t];
            x[(r, 0)] = 1.0;
            for i in 1..=p {
                x[(r, i)] = eff[t - i];
            }
        }
        let fit = ols(&x, &y)?;
        // center so the resampled innovations have mean zero
        let mean = fit.residuals.mean();
        resid.set_column(e, &fit.residuals.add_scalar(-mean));
        coef.push(fit.beta);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut null_stats: Vec<Vec<f64>> = vec![Vec::with_capacity(n_bootstrap); bands.len()];
    let mut boot_effects: Vec<Vec<f64>> = effects.iter().map(|e| e[..].to_vec()).collect();
    for _ in 0..n_bootstrap {
        // joint row resampling keeps cross-equation error correlation
        let draws: Vec<usize> = (0..n_eff).map(|_| rng.gen_range(0..n_eff)).collect();
        for (e, eff) in effects.iter().enumerate() {
            let c = &coef[e];
            let series = &mut boot_effects[e];
            series[..p].copy_from_slice(&eff[..p]);
            for t in p..n {
                let mut v = c[0] + resid[(draws[t - p], e)];
                for i in 1..=p {
                    v += c[i] * series[t - i];
                }
                series[t] = v;
            }
        }
        let stats = JointModel::build(cause, &boot_effects, lag).band_stats(bands)?;
        for (b, s) in stats.into_iter().enumerate() {
            null_stats[b].push(s);
        }
    }

    let mut out = Vec::with_capacity(bands.len());
    for (b, &(lo, hi)) in bands.iter().enumerate() {
        let sorted = &mut null_stats[b];
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cv = quantile_sorted(sorted, 0.90);
        let stat = observed[b];
        out.push(FreqGrangerBand {
            omega_low: lo,
            omega_high: hi,
            statistic: stat,
            critical_value_90: cv,
            lag,
            n_bootstrap,
            seed,
            decision: if stat > cv { Decision::Reject } else { Decision::FailToReject },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    fn noise(rng: &mut ChaCha8Rng) -> f64 {
        rng.sample::<f64, _>(StandardNormal)
    }

    /// x drives y through a two-sided symmetric filter concentrated at low
    /// frequencies (a slow moving average), so causality should show up in
    /// the low band and not in the high band.
    fn low_frequency_pair(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; n];
        for t in 1..n {
            x[t] = 0.7 * x[t - 1] + noise(&mut rng);
        }
        // slow trailing average of x feeds y
        let window = 8;
        let mut y = vec![0.0; n];
        for t in window..n {
            let slow: f64 = x[t - window..t].iter().sum::<f64>() / window as f64;
            y[t] = 0.3 * y[t - 1] + 1.2 * slow + 0.5 * noise(&mut rng);
        }
        (x, y)
    }

    #[test]
    fn slow_influence_is_found_in_the_low_band() {
        let (x, y) = low_frequency_pair(5, 600);
        let bands = [(2.0 * PI / 200.0, 2.0 * PI / 16.0), (2.0 * PI / 16.0, PI)];
        let out = granger_frequency_values(&x, &[y], 6, &bands, 99, 7).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].decision, Decision::Reject, "low band stat {} cv {}", out[0].statistic, out[0].critical_value_90);
        assert!(
            out[0].statistic / out[0].critical_value_90
                > out[1].statistic / out[1].critical_value_90,
            "low band should dominate: {:?}",
            out
        );
    }

    #[test]
    fn no_causality_keeps_band_statistics_below_critical_values() {
        let mut hits = 0;
        let bands = [(2.0 * PI / 100.0, 2.0 * PI / 16.0), (2.0 * PI / 16.0, PI)];
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            let n = 300;
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            for t in 1..n {
                x[t] = 0.6 * x[t - 1] + noise(&mut rng);
                y[t] = 0.6 * y[t - 1] + noise(&mut rng);
            }
            for band in granger_frequency_values(&x, &[y], 4, &bands, 60, seed).unwrap() {
                if band.decision == Decision::Reject {
                    hits += 1;
                }
            }
        }
        // 20 band decisions at nominal 10%
        assert!(hits <= 6, "{hits}/20 null rejections");
    }

    #[test]
    fn joint_test_accepts_several_effects() {
        let (x, y1) = low_frequency_pair(11, 500);
        let (_, y2) = low_frequency_pair(12, 500);
        let bands = [(2.0 * PI / 100.0, 2.0 * PI / 16.0)];
        let out = granger_frequency_values(&x, &[y1, y2], 5, &bands, 60, 3).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].statistic.is_finite());
    }

    #[test]
    fn statistic_invariant_to_affine_rescaling() {
        let (x, y) = low_frequency_pair(21, 400);
        let bands = [(2.0 * PI / 100.0, 2.0 * PI / 16.0)];
        let a = granger_frequency_values(&x, &[y.clone()], 4, &bands, 25, 9).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 250.0 * v + 1000.0).collect();
        let y2: Vec<f64> = y.iter().map(|v| -0.01 * v + 3.0).collect();
        let b = granger_frequency_values(&x2, &[y2], 4, &bands, 25, 9).unwrap();
        assert!(
            (a[0].statistic - b[0].statistic).abs() < 1e-6 * a[0].statistic.abs().max(1.0),
            "{} vs {}",
            a[0].statistic,
            b[0].statistic
        );
    }

    #[test]
    fn results_are_seed_deterministic() {
        let (x, y) = low_frequency_pair(31, 300);
        let bands = [(0.1, 1.0), (1.0, PI)];
        let a = granger_frequency_values(&x, &[y.clone()], 3, &bands, 40, 17).unwrap();
        let b = granger_frequency_values(&x, &[y], 3, &bands, 40, 17).unwrap();
        for (r, s) in a.iter().zip(&b) {
            assert_eq!(r.statistic, s.statistic);
            assert_eq!(r.critical_value_90, s.critical_value_90);
        }
    }

    #[test]
    fn series_wrapper_checks_alignment() {
        use crate::series::Step;
        let (xv, yv) = low_frequency_pair(41, 120);
        let x = TimeSeries::new("x", Step::Annual, 1900, 1, xv).unwrap();
        let y = TimeSeries::new("y", Step::Annual, 1900, 1, yv.clone()).unwrap();
        let bands = [(0.1, 1.0)];
        let ok = granger_frequency(&x, &[&y], 3, &bands, 30, 5).unwrap();
        assert_eq!(ok.len(), 1);
        assert_eq!(ok[0].lag, 3);
        let shifted = TimeSeries::new("y", Step::Annual, 1901, 1, yv).unwrap();
        assert!(matches!(
            granger_frequency(&x, &[&shifted], 3, &bands, 30, 5),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn invalid_bands_and_sizes_error() {
        let x = vec![0.5; 200];
        let y: Vec<f64> = (0..200).map(|t| (t as f64 * 0.7).sin()).collect();
        assert!(matches!(
            granger_frequency_values(&x, &[y.clone()], 3, &[(0.0, 1.0)], 50, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            granger_frequency_values(&x, &[y.clone()], 3, &[(1.0, 4.0)], 50, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            granger_frequency_values(&x, &[y.clone()], 3, &[], 50, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            granger_frequency_values(&x, &[y.clone()], 3, &[(0.1, 1.0)], 5, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            granger_frequency_values(&x, &[y[..30].to_vec()], 3, &[(0.1, 1.0)], 50, 1),
            Err(Error::Dimension(_))
        ));
        // the bound is length > 3 * lag, so 12 samples fail for lag 4
        assert!(matches!(
            granger_frequency_values(&x[..12], &[y[..12].to_vec()], 4, &[(0.1, 1.0)], 50, 1),
            Err(Error::SampleSize(_))
        ));
    }
}
