//! Ordinary least squares with internal column scaling.
//!
//! Design matrices here can mix an intercept with level series spanning many
//! orders of magnitude, so columns are normalized to unit root-mean-square
//! before the normal equations are solved and everything is mapped back to
//! original units afterwards. t-statistics are invariant under that scaling.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    pub n: usize,
    pub k: usize,
    /// `(X'X)^-1` in original column units.
    pub xtx_inv: DMatrix<f64>,
}

impl OlsFit {
    /// Classical t-statistic of coefficient `i`.
    pub fn t_stat(&self, i: usize) -> f64 {
        let dof = self.n - self.k;
        let s2 = self.rss / dof as f64;
        self.beta[i] / (s2 * self.xtx_inv[(i, i)]).sqrt()
    }

    /// Residual-based coefficient of determination.
    pub fn r_squared(&self, y: &DVector<f64>) -> f64 {
        let mean = y.mean();
        let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        if tss <= 0.0 {
            0.0
        } else {
            1.0 - self.rss / tss
        }
    }
}

pub(crate) fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let n = x.nrows();
    let k = x.ncols();
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "design has {n} rows but response has {} entries",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::SampleSize(format!(
            "{n} observations cannot identify {k} coefficients"
        )));
    }
    // unit-RMS column scaling
    let mut scales = Vec::with_capacity(k);
    let mut xs = x.clone();
    for c in 0..k {
        let rms = (xs.column(c).norm_squared() / n as f64).sqrt();
        if !(rms > 0.0) || !rms.is_finite() {
            return Err(Error::Conditioning(format!(
                "design column {c} is zero or non-finite"
            )));
        }
        scales.push(rms);
        for r in 0..n {
            xs[(r, c)] /= rms;
        }
    }
    let xtx = xs.transpose() * &xs;
    let xty = xs.transpose() * y;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Conditioning("collinear design matrix".into()))?;
    let beta_scaled = chol.solve(&xty);
    let inv_scaled = chol.inverse();

    let mut beta = beta_scaled.clone();
    for c in 0..k {
        beta[c] /= scales[c];
    }
    let mut xtx_inv = inv_scaled;
    for i in 0..k {
        for j in 0..k {
            xtx_inv[(i, j)] /= scales[i] * scales[j];
        }
    }
    let residuals = y - x * &beta;
    let rss = residuals.norm_squared().max(0.0);
    Ok(OlsFit { beta, residuals, rss, n, k, xtx_inv })
}

/// Schwarz Bayesian information criterion for a least-squares fit.
pub(crate) fn sbic(rss: f64, n: usize, k: usize) -> f64 {
    let nf = n as f64;
    nf * (rss / nf).max(f64::MIN_POSITIVE).ln() + k as f64 * nf.ln()
}
