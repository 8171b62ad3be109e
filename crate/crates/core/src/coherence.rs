//! Cross-wavelet spectrum, scale-adaptive smoothing and squared wavelet
//! coherence.
//!
//! Squared coherence follows the standard estimator
//!
//! ```text
//! R2 = |S(Wxy / s)|^2 / ( S(|Wx|^2 / s) * S(|Wy|^2 / s) )
//! ```
//!
//! where `S` smooths in time with a Gaussian whose standard deviation is
//! proportional to the scale, then across scales with a boxcar measured in
//! octaves. Both kernels are normalized to unit sum and renormalized where
//! they hang over a boundary, so a constant field is preserved and the
//! Cauchy-Schwarz bound `R2 <= 1` holds cell by cell. Phase is the
//! four-quadrant angle of the smoothed cross spectrum: positive phase means
//! the first series leads at that scale.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::cwt::{coi_periods, CwtPlan, MorletParams, ScaleGrid, TimeAxis, WaveletField};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Smoothing operator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingSpec {
    /// Time kernel standard deviation as a multiple of the scale.
    pub time_sigma: f64,
    /// Scale boxcar full width in octaves.
    pub scale_octaves: f64,
}

impl Default for SmoothingSpec {
    fn default() -> Self {
        SmoothingSpec { time_sigma: 1.0, scale_octaves: 0.6 }
    }
}

impl SmoothingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.time_sigma > 0.0) {
            return Err(Error::InvalidParam(format!(
                "time smoothing factor {} must be positive",
                self.time_sigma
            )));
        }
        if !(self.scale_octaves > 0.0) {
            return Err(Error::InvalidParam(format!(
                "scale smoothing width {} octaves must be positive",
                self.scale_octaves
            )));
        }
        Ok(())
    }
}

/// Precomputed kernels and boundary renormalizations for one (grid, spec)
/// pair. Building the plan once and applying it to many fields is what makes
/// Monte Carlo significance affordable.
///
/// Rows whose Gaussian kernel is wide are convolved through zero-padded
/// FFTs; narrow rows use the direct sum. Both routes evaluate the same
/// clipped, renormalized sums, so they agree to rounding error.
pub struct SmoothingPlan {
    n: usize,
    rows: usize,
    /// Per scale row: centered unit-sum Gaussian taps.
    time_kernels: Vec<Vec<f64>>,
    /// Per scale row, per column: 1 / (in-bounds tap sum).
    time_inv_norm: Vec<Vec<f64>>,
    /// FFT state for rows with at least `FFT_KERNEL_MIN` taps.
    row_fft: Vec<Option<RowFft>>,
    /// Centered boxcar taps across scale rows (possibly fractional ends).
    scale_weights: Vec<f64>,
    /// Per scale row: 1 / (in-bounds tap sum).
    scale_inv_norm: Vec<f64>,
}

/// Tap count from which the padded-FFT route beats the direct sum.
const FFT_KERNEL_MIN: usize = 257;

/// Zero-padded FFT convolution state for one scale row.
struct RowFft {
    m: usize,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ifft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    /// Forward transform of the zero-padded kernel, pre-divided by `m`
    /// (the inverse transform's normalization).
    kernel_hat: Vec<Complex64>,
}

impl RowFft {
    /// In-place circular convolution of `buf` with the kernel; with the
    /// padding guaranteed by the constructor this equals the linear
    /// convolution on the indices that are read back.
    fn run(&self, buf: &mut [Complex64]) {
        self.fft.process(buf);
        for (b, kh) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= *kh;
        }
        self.ifft.process(buf);
    }
}

impl SmoothingPlan {
    pub fn new(grid: &ScaleGrid, spec: &SmoothingSpec) -> Result<Self> {
        spec.validate()?;
        let n = grid.n;
        let rows = grid.len();

        let mut planner = rustfft::FftPlanner::new();
        let mut time_kernels = Vec::with_capacity(rows);
        let mut time_inv_norm = Vec::with_capacity(rows);
        let mut row_fft = Vec::with_capacity(rows);
        for &s in &grid.scales {
            let sigma = (spec.time_sigma * s / grid.dt).max(1e-9);
            let half = ((4.0 * sigma).ceil() as usize).min(n.saturating_sub(1));
            let mut k: Vec<f64> = (-(half as i64)..=half as i64)
                .map(|i| (-0.5 * (i as f64 / sigma).powi(2)).exp())
                .collect();
            let sum: f64 = k.iter().sum();
            for w in &mut k {
                *w /= sum;
            }
            // in-bounds tap sum per output column
            let mut inv = vec![0.0; n];
            let mut run: f64 = 0.0;
            // prefix sums of the kernel let each column's clipped mass be a
            // difference of two ends
            let mut prefix = Vec::with_capacity(k.len() + 1);
            prefix.push(0.0);
            for w in &k {
                run += w;
                prefix.push(run);
            }
            for (t, slot) in inv.iter_mut().enumerate() {
                let lo = half.saturating_sub(t); // first in-bounds tap index
                let hi = (half + (n - 1 - t)).min(k.len() - 1); // last
                let mass = prefix[hi + 1] - prefix[lo];
                *slot = 1.0 / mass;
            }
            row_fft.push(if k.len() >= FFT_KERNEL_MIN {
                let m = (n + k.len() - 1).next_power_of_two();
                let fft = planner.plan_fft_forward(m);
                let ifft = planner.plan_fft_inverse(m);
                let mut kernel_hat = vec![Complex64::new(0.0, 0.0); m];
                for (slot, &w) in kernel_hat.iter_mut().zip(&k) {
                    slot.re = w;
                }
                fft.process(&mut kernel_hat);
                let inv_m = 1.0 / m as f64;
                for v in &mut kernel_hat {
                    *v *= inv_m;
                }
                Some(RowFft { m, fft, ifft, kernel_hat })
            } else {
                None
            });
            time_kernels.push(k);
            time_inv_norm.push(inv);
        }

        // Fractional boxcar across scale rows: tap o covers [o-1/2, o+1/2],
        // the boxcar covers [-w/2, w/2] with w = octaves / dj rows.
        let w2 = 0.5 * spec.scale_octaves / grid.dj;
        let half_rows = (w2 + 0.5).ceil() as i64;
        let mut scale_weights: Vec<f64> = (-half_rows..=half_rows)
            .map(|o| {
                let lo = (o as f64 - 0.5).max(-w2);
                let hi = (o as f64 + 0.5).min(w2);
                (hi - lo).max(0.0)
            })
            .collect();
        let sum: f64 = scale_weights.iter().sum();
        for w in &mut scale_weights {
            *w /= sum;
        }
        let half = scale_weights.len() / 2;
        let scale_inv_norm: Vec<f64> = (0..rows)
            .map(|j| {
                let mut mass = 0.0;
                for (idx, w) in scale_weights.iter().enumerate() {
                    let o = idx as i64 - half as i64;
                    let jj = j as i64 + o;
                    if jj >= 0 && (jj as usize) < rows {
                        mass += w;
                    }
                }
                1.0 / mass
            })
            .collect();

        Ok(SmoothingPlan {
            n,
            rows,
            time_kernels,
            time_inv_norm,
            row_fft,
            scale_weights,
            scale_inv_norm,
        })
    }

    /// Time-smooth one complex row (FFT route for wide kernels, direct
    /// clipped sum otherwise), including boundary renormalization.
    fn conv_row_complex(&self, j: usize, row: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let k = &self.time_kernels[j];
        let inv = &self.time_inv_norm[j];
        let half = k.len() / 2;
        if let Some(rf) = &self.row_fft[j] {
            let mut buf = vec![Complex64::new(0.0, 0.0); rf.m];
            buf[..n].copy_from_slice(row);
            rf.run(&mut buf);
            (0..n).map(|t| buf[t + half] * inv[t]).collect()
        } else {
            (0..n)
                .map(|t| {
                    let lo = half.saturating_sub(t);
                    let hi = (half + (n - 1 - t)).min(k.len() - 1);
                    let base = t + lo - half;
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for (w, v) in k[lo..=hi].iter().zip(&row[base..base + hi - lo + 1]) {
                        re += w * v.re;
                        im += w * v.im;
                    }
                    Complex64::new(re * inv[t], im * inv[t])
                })
                .collect()
        }
    }

    fn check_shape(&self, m: (usize, usize)) -> Result<()> {
        if m != (self.rows, self.n) {
            return Err(Error::Dimension(format!(
                "field is {}x{}, smoothing plan was built for {}x{}",
                m.0, m.1, self.rows, self.n
            )));
        }
        Ok(())
    }

    /// Smooth a real field (scales x time).
    pub fn apply(&self, m: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_shape(m.dim())?;
        let n = self.n;
        let tmp: Vec<Vec<f64>> = (0..self.rows)
            .into_par_iter()
            .map(|j| {
                let row = m.row(j);
                let row = row.as_slice().expect("row-major field");
                if let Some(rf) = &self.row_fft[j] {
                    let half = self.time_kernels[j].len() / 2;
                    let inv = &self.time_inv_norm[j];
                    let mut buf = vec![Complex64::new(0.0, 0.0); rf.m];
                    for (b, &v) in buf.iter_mut().zip(row) {
                        b.re = v;
                    }
                    rf.run(&mut buf);
                    (0..n).map(|t| buf[t + half].re * inv[t]).collect()
                } else {
                    let k = &self.time_kernels[j];
                    let inv = &self.time_inv_norm[j];
                    let half = k.len() / 2;
                    (0..n)
                        .map(|t| {
                            let lo = half.saturating_sub(t);
                            let hi = (half + (n - 1 - t)).min(k.len() - 1);
                            let base = t + lo - half;
                            let mut acc = 0.0;
                            for (w, v) in k[lo..=hi].iter().zip(&row[base..base + hi - lo + 1]) {
                                acc += w * v;
                            }
                            acc * inv[t]
                        })
                        .collect()
                }
            })
            .collect();
        Ok(self.scale_pass(&tmp))
    }

    /// Smooth a complex field by smoothing both parts with the same taps.
    pub fn apply_complex(&self, m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
        self.check_shape(m.dim())?;
        let tmp: Vec<Vec<Complex64>> = (0..self.rows)
            .into_par_iter()
            .map(|j| {
                let row = m.row(j);
                let row = row.as_slice().expect("row-major field");
                self.conv_row_complex(j, row)
            })
            .collect();
        Ok(self.scale_pass(&tmp))
    }

    /// Smooth two real fields in one pass by packing them as the real and
    /// imaginary parts of one complex field; real kernels never mix the
    /// parts. This halves the cost of the auto-spectrum smoothing in the
    /// Monte Carlo loop.
    pub fn apply_pair(&self, a: &Array2<f64>, b: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
        self.check_shape(a.dim())?;
        self.check_shape(b.dim())?;
        let tmp: Vec<Vec<Complex64>> = (0..self.rows)
            .into_par_iter()
            .map(|j| {
                let ra = a.row(j);
                let ra = ra.as_slice().expect("row-major field");
                let rb = b.row(j);
                let rb = rb.as_slice().expect("row-major field");
                let packed: Vec<Complex64> =
                    ra.iter().zip(rb).map(|(&x, &y)| Complex64::new(x, y)).collect();
                self.conv_row_complex(j, &packed)
            })
            .collect();
        let packed = self.scale_pass(&tmp);
        let mut out_a = Array2::zeros(packed.dim());
        let mut out_b = Array2::zeros(packed.dim());
        for ((a, b), p) in out_a.iter_mut().zip(out_b.iter_mut()).zip(packed.iter()) {
            *a = p.re;
            *b = p.im;
        }
        Ok((out_a, out_b))
    }

    /// Boxcar across scale rows with boundary renormalization.
    fn scale_pass<T>(&self, tmp: &[Vec<T>]) -> Array2<T>
    where
        T: Copy
            + Default
            + std::ops::Mul<f64, Output = T>
            + std::ops::AddAssign
            + Send
            + Sync,
    {
        let half = self.scale_weights.len() / 2;
        let rows = self.rows;
        let n = self.n;
        let out_rows: Vec<Vec<T>> = (0..rows)
            .into_par_iter()
            .map(|j| {
                let mut acc = vec![T::default(); n];
                for (idx, &w) in self.scale_weights.iter().enumerate() {
                    let jj = j as i64 + idx as i64 - half as i64;
                    if jj < 0 || jj as usize >= rows {
                        continue;
                    }
                    let src = &tmp[jj as usize];
                    for (a, v) in acc.iter_mut().zip(src) {
                        *a += *v * w;
                    }
                }
                let renorm = self.scale_inv_norm[j];
                for a in &mut acc {
                    *a = *a * renorm;
                }
                acc
            })
            .collect();
        let mut flat = Vec::with_capacity(rows * n);
        for r in out_rows {
            flat.extend(r);
        }
        Array2::from_shape_vec((rows, n), flat).expect("rectangular")
    }
}

/// Smooth a real (scales x time) matrix with the standard operator.
pub fn smooth(m: &Array2<f64>, grid: &ScaleGrid, spec: &SmoothingSpec) -> Result<Array2<f64>> {
    SmoothingPlan::new(grid, spec)?.apply(m)
}

/// Cross-wavelet spectrum `Wx * conj(Wy)` of two transforms on the same
/// grid and time axis, packaged as a field of its own.
pub fn xwt(wx: &WaveletField, wy: &WaveletField) -> Result<WaveletField> {
    if wx.grid != wy.grid {
        return Err(Error::Dimension("cross spectrum needs both transforms on one grid".into()));
    }
    if wx.params != wy.params {
        return Err(Error::Dimension(
            "cross spectrum needs both transforms under the same wavelet".into(),
        ));
    }
    if wx.time != wy.time {
        return Err(Error::Dimension(
            "cross spectrum needs series on the same time axis; align them first".into(),
        ));
    }
    let mut coeffs = wx.coeffs.clone();
    coeffs.zip_mut_with(&wy.coeffs, |a, b| *a *= b.conj());
    Ok(WaveletField {
        coeffs,
        grid: wx.grid.clone(),
        params: wx.params,
        coi: wx.coi.clone(),
        time: wx.time,
        label: format!("{} x {}", wx.label, wy.label),
    })
}

/// Squared coherence, phase and arrow mask for an aligned pair.
#[derive(Debug, Clone)]
pub struct CoherenceField {
    /// Squared coherence in [0, 1].
    pub r2: Array2<f64>,
    /// Relative phase in radians, `(-pi, pi]`; positive = first series leads.
    pub phase: Array2<f64>,
    /// Cells whose coherence clears the arrow drawing threshold.
    pub arrow_mask: Array2<bool>,
    pub arrow_threshold: f64,
    pub grid: ScaleGrid,
    pub params: MorletParams,
    pub smoothing: SmoothingSpec,
    pub coi: Vec<f64>,
    pub time: TimeAxis,
    pub label_x: String,
    pub label_y: String,
}

impl CoherenceField {
    pub fn in_coi(&self, j: usize, k: usize) -> bool {
        self.grid.scales[j] * self.grid.fourier_factor <= self.coi[k]
    }
}

/// Engine shared by `wavelet_coherence` and the Monte Carlo significance
/// loop: one transform plan and one smoothing plan, applied to many pairs.
pub struct CoherenceEngine {
    pub cwt_plan: CwtPlan,
    pub smooth_plan: SmoothingPlan,
    inv_scales: Vec<f64>,
}

impl CoherenceEngine {
    pub fn new(grid: &ScaleGrid, params: MorletParams, spec: &SmoothingSpec) -> Result<Self> {
        Ok(CoherenceEngine {
            cwt_plan: CwtPlan::new(grid, params),
            smooth_plan: SmoothingPlan::new(grid, spec)?,
            inv_scales: grid.scales.iter().map(|s| 1.0 / s).collect(),
        })
    }

    /// Smoothed auto/cross spectra -> (r2, smoothed cross spectrum).
    pub fn r2_cross(&self, x: &[f64], y: &[f64]) -> (Array2<f64>, Array2<Complex64>) {
        let wx = self.cwt_plan.transform(x);
        let wy = self.cwt_plan.transform(y);

        let mut pxx = Array2::zeros(wx.dim());
        let mut pyy = Array2::zeros(wx.dim());
        let mut cross = Array2::zeros(wx.dim());
        for j in 0..wx.nrows() {
            let inv_s = self.inv_scales[j];
            for t in 0..wx.ncols() {
                let a = wx[[j, t]];
                let b = wy[[j, t]];
                pxx[[j, t]] = a.norm_sqr() * inv_s;
                pyy[[j, t]] = b.norm_sqr() * inv_s;
                cross[[j, t]] = a * b.conj() * inv_s;
            }
        }
        let (sxx, syy) = self.smooth_plan.apply_pair(&pxx, &pyy).expect("shape fixed by plan");
        let sxy = self.smooth_plan.apply_complex(&cross).expect("shape fixed by plan");

        let mut r2 = Array2::zeros(sxx.dim());
        for ((slot, num), (dx, dy)) in
            r2.iter_mut().zip(sxy.iter()).zip(sxx.iter().zip(syy.iter()))
        {
            let denom = dx * dy;
            *slot = if denom > 0.0 { num.norm_sqr() / denom } else { 0.0 };
        }
        (r2, sxy)
    }

    pub fn r2_only(&self, x: &[f64], y: &[f64]) -> Array2<f64> {
        self.r2_cross(x, y).0
    }
}

/// Shared validation for pairwise wavelet statistics: one time axis, a grid
/// sized for the series, and nondegenerate variation in both inputs.
pub(crate) fn check_aligned_pair(x: &TimeSeries, y: &TimeSeries, grid: &ScaleGrid) -> Result<()> {
    if x.step != y.step || x.start_year != y.start_year || x.start_month != y.start_month
        || x.len() != y.len()
    {
        return Err(Error::Dimension(format!(
            "series {:?} and {:?} are not on one time axis; align them first",
            x.label, y.label
        )));
    }
    if grid.n != x.len() {
        return Err(Error::Dimension(format!(
            "grid built for n = {}, series have n = {}",
            grid.n,
            x.len()
        )));
    }
    for s in [x, y] {
        let mean = s.mean();
        if s.values.iter().all(|v| (v - mean).abs() < 1e-300) {
            return Err(Error::Degenerate(format!("series {:?} is constant", s.label)));
        }
    }
    Ok(())
}

/// Wavelet coherence of two aligned series on a shared grid.
pub fn wavelet_coherence(
    x: &TimeSeries,
    y: &TimeSeries,
    grid: &ScaleGrid,
    params: MorletParams,
    spec: &SmoothingSpec,
    arrow_threshold: f64,
) -> Result<CoherenceField> {
    check_aligned_pair(x, y, grid)?;
    if !(0.0..=1.0).contains(&arrow_threshold) {
        return Err(Error::InvalidParam(format!(
            "arrow threshold {arrow_threshold} must lie in [0, 1]"
        )));
    }

    let engine = CoherenceEngine::new(grid, params, spec)?;
    let (r2, sxy) = engine.r2_cross(&x.values, &y.values);
    let phase = sxy.mapv(|c| if c.re == 0.0 && c.im == 0.0 { 0.0 } else { c.im.atan2(c.re) });
    let arrow_mask = r2.mapv(|v| v > arrow_threshold);
    Ok(CoherenceField {
        r2,
        phase,
        arrow_mask,
        arrow_threshold,
        grid: grid.clone(),
        params,
        smoothing: *spec,
        coi: coi_periods(grid.dt, grid.n),
        time: TimeAxis::of(x),
        label_x: x.label.clone(),
        label_y: y.label.clone(),
    })
}
