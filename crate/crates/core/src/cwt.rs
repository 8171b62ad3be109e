//! Morlet continuous wavelet transform.
//!
//! Coefficients are the correlation of the mean-removed, zero-padded series
//! with scaled, complex-conjugated Morlet wavelets,
//!
//! ```text
//! W(t, s) = sum_m x[m] * (dt / sqrt(s)) * conj(psi((m - t) * dt / s))
//! psi(u)  = pi^(-1/4) * exp(i * omega0 * u) * exp(-u^2 / 2)
//! ```
//!
//! evaluated in the frequency domain: the padded series is Fourier
//! transformed once and multiplied per scale with the closed-form wavelet
//! spectrum `sqrt(2 pi s) * pi^(-1/4) * exp(-(s w - omega0)^2 / 2)`. The
//! `1/sqrt(s)` convention gives every scale unit energy. Padding goes to the
//! next power of two at or above twice the series length so that the
//! circular product equals the plain (linear) correlation against the
//! padded series exactly.
//!
//! No low-frequency admissibility correction is applied to the wavelet: for
//! the supported `omega0 >= 5` the corrective term is below 1e-7 and is
//! dropped from both the transform and its documentation of record.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::{Step, TimeSeries};

/// Mother-wavelet parameters. Only the Morlet center frequency is exposed;
/// values below 5 would need the admissibility correction this crate omits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorletParams {
    pub omega0: f64,
}

impl Default for MorletParams {
    fn default() -> Self {
        MorletParams { omega0: 6.0 }
    }
}

impl MorletParams {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0 >= 5.0) {
            return Err(Error::InvalidParam(format!(
                "omega0 = {omega0} unsupported; need omega0 >= 5 so the admissibility term stays negligible"
            )));
        }
        Ok(MorletParams { omega0 })
    }

    /// Ratio of Fourier period to scale: `4 pi / (omega0 + sqrt(2 + omega0^2))`,
    /// about 1.033043 for `omega0 = 6`.
    pub fn fourier_factor(&self) -> f64 {
        4.0 * std::f64::consts::PI / (self.omega0 + (2.0 + self.omega0 * self.omega0).sqrt())
    }
}

/// Dyadic scale grid `s_j = s0 * 2^(j * dj)`, truncated so every Fourier
/// period stays at or below `max_period`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    /// Sample spacing in native time units (months or years).
    pub dt: f64,
    /// Series length the grid was built for.
    pub n: usize,
    pub s0: f64,
    pub dj: f64,
    /// Scales in time units, strictly increasing.
    pub scales: Vec<f64>,
    /// Period/scale ratio of the wavelet the grid was built for.
    pub fourier_factor: f64,
}

impl ScaleGrid {
    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Fourier periods corresponding to the scales, same time units.
    pub fn periods(&self) -> Vec<f64> {
        self.scales.iter().map(|s| s * self.fourier_factor).collect()
    }
}

/// Build the scale grid for a series of `n` samples spaced `dt`.
pub fn make_scale_grid(
    dt: f64,
    n: usize,
    s0: f64,
    dj: f64,
    max_period: f64,
    params: MorletParams,
) -> Result<ScaleGrid> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParam(format!("dt = {dt} must be positive")));
    }
    if n < 8 {
        return Err(Error::Dimension(format!("series length {n} too short for a transform")));
    }
    if !(s0 >= 2.0 * dt * (1.0 - 1e-12)) {
        return Err(Error::InvalidParam(format!(
            "s0 = {s0} must be at least two time steps (2 * {dt})"
        )));
    }
    if !(dj > 0.0) {
        return Err(Error::InvalidParam(format!("dj = {dj} must be positive")));
    }
    let ff = params.fourier_factor();
    if s0 * ff > max_period * (1.0 + 1e-12) {
        return Err(Error::InvalidParam(format!(
            "max_period = {max_period} is below the smallest resolvable period {:.6}",
            s0 * ff
        )));
    }
    let mut scales = Vec::new();
    let mut j = 0u32;
    loop {
        let s = s0 * 2f64.powf(j as f64 * dj);
        if s * ff > max_period * (1.0 + 1e-12) {
            break;
        }
        scales.push(s);
        j += 1;
    }
    Ok(ScaleGrid { dt, n, s0, dj, scales, fourier_factor: ff })
}

/// Calendar anchoring of a transform's column axis, copied from the source
/// series so outputs can be labelled without carrying the series around.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeAxis {
    pub step: Step,
    pub start_year: i32,
    pub start_month: u8,
}

impl TimeAxis {
    pub fn of(x: &TimeSeries) -> Self {
        TimeAxis { step: x.step, start_year: x.start_year, start_month: x.start_month }
    }

    fn start_index(&self) -> i64 {
        match self.step {
            Step::Monthly => self.start_year as i64 * 12 + self.start_month as i64 - 1,
            Step::Annual => self.start_year as i64,
        }
    }

    /// Calendar label of column `i`.
    pub fn label(&self, i: usize) -> String {
        let idx = self.start_index() + i as i64;
        match self.step {
            Step::Monthly => {
                format!("{:04}-{:02}", idx.div_euclid(12), idx.rem_euclid(12) + 1)
            }
            Step::Annual => format!("{idx:04}"),
        }
    }

    pub fn labels(&self, n: usize) -> Vec<String> {
        (0..n).map(|i| self.label(i)).collect()
    }

    /// Decimal year of column `i` (mid-sample), for plot axes.
    pub fn years(&self, i: usize) -> f64 {
        let idx = self.start_index() + i as i64;
        match self.step {
            Step::Monthly => idx.div_euclid(12) as f64 + (idx.rem_euclid(12) as f64 + 0.5) / 12.0,
            Step::Annual => idx as f64 + 0.5,
        }
    }
}

/// Transform of one series: complex coefficients (scales x time), the grid,
/// the cone of influence and the calendar axis.
#[derive(Debug, Clone)]
pub struct WaveletField {
    pub coeffs: Array2<Complex64>,
    pub grid: ScaleGrid,
    pub params: MorletParams,
    /// Per-column reliable-period bound (same time units as the grid):
    /// `coi[k] = sqrt(2) * dt * min(k + 0.5, n - 1 - k + 0.5)`, the Morlet
    /// e-folding convention. Cells with period above `coi[k]` are
    /// edge-affected.
    pub coi: Vec<f64>,
    pub time: TimeAxis,
    pub label: String,
}

impl WaveletField {
    /// True when the cell (scale row `j`, column `k`) lies inside the cone.
    pub fn in_coi(&self, j: usize, k: usize) -> bool {
        self.grid.scales[j] * self.grid.fourier_factor <= self.coi[k]
    }
}

/// Per-column COI periods for a series of length `n` spaced `dt`.
pub fn coi_periods(dt: f64, n: usize) -> Vec<f64> {
    let sqrt2 = std::f64::consts::SQRT_2;
    (0..n)
        .map(|k| {
            let d = (k as f64 + 0.5).min((n - 1 - k) as f64 + 0.5);
            sqrt2 * dt * d
        })
        .collect()
}

/// Reusable transform plan: FFT handles plus the per-scale wavelet spectra.
/// Building one plan and transforming many equal-length series (surrogates)
/// avoids recomputing the kernels.
pub struct CwtPlan {
    pub grid: ScaleGrid,
    pub params: MorletParams,
    npad: usize,
    fft: Arc<dyn rustfft::Fft<f64>>,
    ifft: Arc<dyn rustfft::Fft<f64>>,
    /// One spectrum per scale, length `npad`, real-valued.
    kernels: Vec<Vec<f64>>,
}

impl CwtPlan {
    pub fn new(grid: &ScaleGrid, params: MorletParams) -> Self {
        let npad = (2 * grid.n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(npad);
        let ifft = planner.plan_fft_inverse(npad);
        let norm = std::f64::consts::PI.powf(-0.25) * (2.0 * std::f64::consts::PI).sqrt();
        let kernels = grid
            .scales
            .iter()
            .map(|&s| {
                (0..npad)
                    .map(|k| {
                        let k_signed =
                            if k <= npad / 2 { k as i64 } else { k as i64 - npad as i64 };
                        let w = 2.0 * std::f64::consts::PI * k_signed as f64
                            / (npad as f64 * grid.dt);
                        let arg = s * w - params.omega0;
                        norm * s.sqrt() * (-0.5 * arg * arg).exp()
                    })
                    .collect()
            })
            .collect();
        CwtPlan { grid: grid.clone(), params, npad, fft, ifft, kernels }
    }

    /// Transform raw values (length must equal `grid.n`).
    pub fn transform(&self, values: &[f64]) -> Array2<Complex64> {
        let n = self.grid.n;
        assert_eq!(values.len(), n, "plan built for a different length");
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut spectrum = vec![Complex64::new(0.0, 0.0); self.npad];
        for (slot, &v) in spectrum.iter_mut().zip(values) {
            *slot = Complex64::new(v - mean, 0.0);
        }
        self.fft.process(&mut spectrum);

        let scale = 1.0 / self.npad as f64;
        let rows: Vec<Vec<Complex64>> = self
            .kernels
            .par_iter()
            .map(|kernel| {
                let mut buf: Vec<Complex64> =
                    spectrum.iter().zip(kernel).map(|(x, k)| x * k).collect();
                self.ifft.process(&mut buf);
                buf.truncate(n);
                for v in &mut buf {
                    *v *= scale;
                }
                buf
            })
            .collect();

        let mut flat = Vec::with_capacity(self.grid.len() * n);
        for row in rows {
            flat.extend(row);
        }
        Array2::from_shape_vec((self.grid.len(), n), flat).expect("rows are rectangular")
    }
}

/// Continuous wavelet transform of a series on a prepared grid.
pub fn cwt(x: &TimeSeries, grid: &ScaleGrid, params: MorletParams) -> Result<WaveletField> {
    if grid.n != x.len() {
        return Err(Error::Dimension(format!(
            "grid built for n = {}, series {:?} has n = {}",
            grid.n,
            x.label,
            x.len()
        )));
    }
    if (grid.dt - x.step.dt()).abs() > 1e-12 {
        return Err(Error::Dimension(format!(
            "grid built for dt = {}, series step is {}",
            grid.dt,
            x.step.dt()
        )));
    }
    if (grid.fourier_factor - params.fourier_factor()).abs() > 1e-12 {
        return Err(Error::Dimension(
            "grid was built for a different wavelet parameterisation".into(),
        ));
    }
    let plan = CwtPlan::new(grid, params);
    Ok(field_from_plan(&plan, &x.values, TimeAxis::of(x), x.label.clone()))
}

pub(crate) fn field_from_plan(
    plan: &CwtPlan,
    values: &[f64],
    time: TimeAxis,
    label: String,
) -> WaveletField {
    WaveletField {
        coeffs: plan.transform(values),
        grid: plan.grid.clone(),
        params: plan.params,
        coi: coi_periods(plan.grid.dt, plan.grid.n),
        time,
        label,
    }
}

/// Wavelet power `|W|^2`.
pub fn power(w: &WaveletField) -> Array2<f64> {
    w.coeffs.mapv(|c| c.norm_sqr())
}
