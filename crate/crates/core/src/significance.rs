//! Monte Carlo significance testing against an AR(1) red-noise null.
//!
//! Observed wavelet power (or squared coherence) is compared cell by cell
//! with the distribution obtained from surrogate series that share the
//! lag-one autocorrelation and variance of the data. The per-cell quantile
//! at the requested level is estimated from the top order statistics of the
//! surrogate ensemble, so memory stays proportional to the field size rather
//! than the ensemble size. Results are reproducible: the ensemble depends
//! only on the seed, never on thread scheduling, because surrogate draws use
//! one counter-based RNG stream per surrogate index.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coherence::{check_aligned_pair, CoherenceEngine, SmoothingSpec};
use crate::cwt::{CwtPlan, MorletParams, ScaleGrid, WaveletField};
use crate::error::{Error, Result};
use crate::series::{Step, TimeSeries};

/// First-order autoregressive model `x_t = mean + phi (x_{t-1} - mean) + sigma e_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Model {
    pub mean: f64,
    pub phi: f64,
    pub sigma: f64,
}

/// Fit an AR(1) model by the lag-one sample autocorrelation, with the
/// innovation variance chosen so the process variance matches the sample
/// variance.
pub fn fit_ar1(x: &TimeSeries) -> Result<Ar1Model> {
    fit_ar1_values(&x.values).map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate(format!(
            "series {:?} is constant; no red-noise null can be fitted",
            x.label
        )),
        other => other,
    })
}

/// `fit_ar1` on a bare sample.
pub fn fit_ar1_values(values: &[f64]) -> Result<Ar1Model> {
    let n = values.len();
    if n < 10 {
        return Err(Error::SampleSize(format!(
            "AR(1) fit needs at least 10 samples, got {n}"
        )));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let denom: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if denom <= 0.0 {
        return Err(Error::Degenerate("sample is constant".into()));
    }
    let numer: f64 = values
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum();
    let phi = numer / denom;
    debug_assert!(phi.abs() < 1.0, "lag-one autocorrelation {phi} out of range");
    let variance = denom / (n - 1) as f64;
    let sigma = (variance * (1.0 - phi * phi)).max(0.0).sqrt();
    Ok(Ar1Model { mean, phi, sigma })
}

fn surrogate_into(model: &Ar1Model, out: &mut [f64], rng: &mut impl Rng) {
    let phi = model.phi;
    // long enough for the start-up transient to decay below noise level
    let burn = (100.0 / (1.0 - phi.abs())).ceil() as usize;
    let stationary_sd = if phi.abs() < 1.0 {
        model.sigma / (1.0 - phi * phi).sqrt()
    } else {
        model.sigma
    };
    let mut state = stationary_sd * rng.sample::<f64, _>(StandardNormal);
    for _ in 0..burn {
        state = phi * state + model.sigma * rng.sample::<f64, _>(StandardNormal);
    }
    for slot in out.iter_mut() {
        state = phi * state + model.sigma * rng.sample::<f64, _>(StandardNormal);
        *slot = model.mean + state;
    }
}

/// Draw one surrogate realization of length `n`, deterministic in `seed`.
/// The series gets a synthetic monthly axis; only its values carry meaning.
pub fn surrogate(model: &Ar1Model, n: usize, seed: u64) -> Result<TimeSeries> {
    if n < 2 {
        return Err(Error::SampleSize(format!("surrogate length {n} must be at least 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; n];
    surrogate_into(model, &mut out, &mut rng);
    TimeSeries::new("ar1-surrogate", Step::Monthly, 2000, 1, out)
}

/// Per-cell significance decision for a wavelet field.
#[derive(Debug, Clone)]
pub struct SignificanceMask {
    /// True where the observed value exceeds the null quantile.
    pub mask: Array2<bool>,
    /// The estimated `(1 - level)` null quantile per cell.
    pub quantile: Array2<f64>,
    pub level: f64,
    pub n_surrogates: usize,
    pub rng_seed: u64,
}

/// Keeps the K largest values seen per cell, where K is just enough to
/// interpolate the requested upper order statistic.
struct TopK {
    k: usize,
    cells: usize,
    /// cell-major, ascending within each cell's K slots
    buf: Vec<f64>,
}

impl TopK {
    fn new(cells: usize, m: usize, level: f64) -> Self {
        // order statistics needed for the (1-level) empirical quantile with
        // linear interpolation between sorted neighbours
        let pos = (1.0 - level) * (m - 1) as f64;
        let k = m - pos.floor() as usize;
        TopK { k, cells, buf: vec![f64::NEG_INFINITY; cells * k] }
    }

    #[inline]
    fn update_cell(&mut self, cell: usize, v: f64) {
        let k = self.k;
        let slot = &mut self.buf[cell * k..(cell + 1) * k];
        if v <= slot[0] {
            return;
        }
        // evict the minimum, keep ascending order
        let mut i = 0;
        while i + 1 < k && slot[i + 1] < v {
            slot[i] = slot[i + 1];
            i += 1;
        }
        slot[i] = v;
    }

    fn update(&mut self, field: &Array2<f64>) {
        debug_assert_eq!(field.len(), self.cells);
        for (cell, &v) in field.iter().enumerate() {
            self.update_cell(cell, v);
        }
    }

    /// `(1-level)` quantile per cell, linearly interpolated.
    fn quantile(&self, m: usize, level: f64, shape: (usize, usize)) -> Array2<f64> {
        let pos = (1.0 - level) * (m - 1) as f64;
        let frac = pos - pos.floor();
        let k = self.k;
        let mut out = Vec::with_capacity(self.cells);
        for cell in 0..self.cells {
            let slot = &self.buf[cell * k..(cell + 1) * k];
            // slot[0] is the floor(pos)-th sorted value of the ensemble
            let q = if frac == 0.0 || k == 1 {
                slot[0]
            } else {
                slot[0] + frac * (slot[1] - slot[0])
            };
            out.push(q);
        }
        Array2::from_shape_vec(shape, out).expect("rectangular")
    }
}

fn check_mc_params(n_surrogates: usize, level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParam(format!(
            "significance level {level} must lie strictly between 0 and 1"
        )));
    }
    if n_surrogates < 100 {
        return Err(Error::InvalidParam(format!(
            "need at least 100 surrogates for a usable tail quantile, got {n_surrogates}"
        )));
    }
    Ok(())
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Pointwise red-noise significance of wavelet power.
///
/// `model` is usually `fit_ar1` of the analyzed series. Cells where the
/// observed power exceeds the `(1 - level)` quantile of the surrogate power
/// ensemble are flagged.
pub fn significance_power(
    w: &WaveletField,
    model: &Ar1Model,
    n_surrogates: usize,
    level: f64,
    seed: u64,
) -> Result<SignificanceMask> {
    check_mc_params(n_surrogates, level)?;
    let plan = CwtPlan::new(&w.grid, w.params);
    let n = w.grid.n;
    let cells = w.coeffs.len();
    let mut top = TopK::new(cells, n_surrogates, level);
    let mut values = vec![0.0; n];
    for i in 0..n_surrogates {
        let mut rng = stream_rng(seed, i as u64 + 1);
        surrogate_into(model, &mut values, &mut rng);
        let coeffs = plan.transform(&values);
        let power = coeffs.mapv(|c| c.norm_sqr());
        top.update(&power);
    }
    let quantile = top.quantile(n_surrogates, level, w.coeffs.dim());
    let observed = w.coeffs.mapv(|c| c.norm_sqr());
    let mut mask = Array2::from_elem(w.coeffs.dim(), false);
    for ((slot, &obs), &q) in mask.iter_mut().zip(observed.iter()).zip(quantile.iter()) {
        *slot = obs > q;
    }
    Ok(SignificanceMask { mask, quantile, level, n_surrogates, rng_seed: seed })
}

/// Pointwise red-noise significance of squared wavelet coherence.
///
/// AR(1) models are fitted independently to `x` and `y`; surrogate pairs are
/// then independent realizations of those fits, so the null hypothesis is
/// "no cross-scale relationship between two red-noise series". The observed
/// coherence is computed here with the same grid, wavelet and smoothing as
/// every surrogate pair.
#[allow(clippy::too_many_arguments)]
pub fn significance_coherence(
    x: &TimeSeries,
    y: &TimeSeries,
    grid: &ScaleGrid,
    params: MorletParams,
    spec: &SmoothingSpec,
    n_surrogates: usize,
    level: f64,
    seed: u64,
) -> Result<SignificanceMask> {
    check_mc_params(n_surrogates, level)?;
    check_aligned_pair(x, y, grid)?;
    let model_x = fit_ar1(x)?;
    let model_y = fit_ar1(y)?;
    let engine = CoherenceEngine::new(grid, params, spec)?;
    let observed = engine.r2_only(&x.values, &y.values);
    let n = grid.n;
    let cells = observed.len();
    let mut top = TopK::new(cells, n_surrogates, level);
    let mut xs = vec![0.0; n];
    let mut ys = vec![0.0; n];
    for i in 0..n_surrogates {
        let mut rng_x = stream_rng(seed, 2 * i as u64 + 1);
        let mut rng_y = stream_rng(seed, 2 * i as u64 + 2);
        surrogate_into(&model_x, &mut xs, &mut rng_x);
        surrogate_into(&model_y, &mut ys, &mut rng_y);
        let r2 = engine.r2_only(&xs, &ys);
        top.update(&r2);
    }
    let quantile = top.quantile(n_surrogates, level, observed.dim());
    let mut mask = Array2::from_elem(observed.dim(), false);
    for ((slot, &obs), &q) in mask.iter_mut().zip(observed.iter()).zip(quantile.iter()) {
        *slot = obs > q;
    }
    Ok(SignificanceMask { mask, quantile, level, n_surrogates, rng_seed: seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwt::{coi_periods, cwt, make_scale_grid};

    fn monthly(label: &str, values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(label, Step::Monthly, 1900, 1, values).unwrap()
    }

    fn draws(model: &Ar1Model, n: usize, seed: u64) -> Vec<f64> {
        surrogate(model, n, seed).unwrap().values
    }

    #[test]
    fn fit_recovers_ar1_parameters() {
        let model = Ar1Model { mean: 5.0, phi: 0.7, sigma: 2.0 };
        let x = surrogate(&model, 40_000, 9).unwrap();
        let fit = fit_ar1(&x).unwrap();
        assert!((fit.mean - 5.0).abs() < 0.2, "mean {}", fit.mean);
        assert!((fit.phi - 0.7).abs() < 0.02, "phi {}", fit.phi);
        let var = fit.sigma * fit.sigma / (1.0 - fit.phi * fit.phi);
        let target = 4.0 / (1.0 - 0.49);
        assert!((var / target - 1.0).abs() < 0.1, "var {var}");
    }

    #[test]
    fn white_noise_fit_has_small_phi() {
        let model = Ar1Model { mean: 0.0, phi: 0.0, sigma: 1.0 };
        let x = draws(&model, 20_000, 3);
        let fit = fit_ar1_values(&x).unwrap();
        assert!(fit.phi.abs() < 0.03, "phi {}", fit.phi);
    }

    #[test]
    fn degenerate_or_short_samples_rejected() {
        assert!(matches!(fit_ar1_values(&[2.0; 50]), Err(Error::Degenerate(_))));
        let nine: Vec<f64> = (0..9).map(|i| i as f64).collect();
        assert!(matches!(fit_ar1_values(&nine), Err(Error::SampleSize(_))));
        let model = Ar1Model { mean: 0.0, phi: 0.0, sigma: 1.0 };
        assert!(matches!(surrogate(&model, 1, 3), Err(Error::SampleSize(_))));
    }

    #[test]
    fn surrogates_are_seed_deterministic() {
        let model = Ar1Model { mean: 1.0, phi: 0.5, sigma: 1.5 };
        assert_eq!(draws(&model, 100, 7), draws(&model, 100, 7));
        assert_ne!(draws(&model, 100, 7), draws(&model, 100, 8));
    }

    #[test]
    fn top_k_matches_full_sort_quantile() {
        // oracle: keep everything, sort, interpolate
        let m = 37;
        let level = 0.05;
        let mut rng = stream_rng(99, 0);
        let draws: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut top = TopK::new(1, m, level);
        for &v in &draws {
            top.update_cell(0, v);
        }
        let got = top.quantile(m, level, (1, 1))[[0, 0]];
        let mut sorted = draws.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = (1.0 - level) * (m - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        let want = sorted[i] + frac * (sorted[i + 1] - sorted[i]);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn top_k_handles_exact_order_statistic() {
        // level such that (1-level)*(m-1) is an integer: no interpolation
        let m = 21;
        let level = 0.05; // pos = 0.95 * 20 = 19 exactly
        let mut top = TopK::new(1, m, level);
        for v in 0..m {
            top.update_cell(0, v as f64);
        }
        assert_eq!(top.quantile(m, level, (1, 1))[[0, 0]], 19.0);
    }

    #[test]
    fn power_significance_is_deterministic_and_level_monotone() {
        let model = Ar1Model { mean: 0.0, phi: 0.4, sigma: 1.0 };
        let x = monthly("x", draws(&model, 128, 17));
        let grid = make_scale_grid(1.0, 128, 2.0, 0.5, 32.0, MorletParams::default()).unwrap();
        let w = cwt(&x, &grid, MorletParams::default()).unwrap();
        let fit = fit_ar1(&x).unwrap();
        let a = significance_power(&w, &fit, 100, 0.05, 42).unwrap();
        let b = significance_power(&w, &fit, 100, 0.05, 42).unwrap();
        assert_eq!(a.mask, b.mask);
        assert_eq!(a.quantile, b.quantile);
        let strict = significance_power(&w, &fit, 100, 0.01, 42).unwrap();
        for (q01, q05) in strict.quantile.iter().zip(a.quantile.iter()) {
            assert!(q01 >= q05, "stricter level must not lower the threshold");
        }
        for (m01, m05) in strict.mask.iter().zip(a.mask.iter()) {
            // anything significant at 1% must be significant at 5%
            assert!(!m01 | m05);
        }
    }

    #[test]
    fn tone_in_noise_is_flagged_at_its_period() {
        let n = 512;
        let p0 = 32.0;
        let noise_model = Ar1Model { mean: 0.0, phi: 0.2, sigma: 1.0 };
        let bg = draws(&noise_model, n, 5);
        let values: Vec<f64> = bg
            .iter()
            .enumerate()
            .map(|(t, v)| v + 3.0 * (2.0 * std::f64::consts::PI * t as f64 / p0).sin())
            .collect();
        let x = monthly("x", values);
        let grid = make_scale_grid(1.0, n, 2.0, 0.25, 128.0, MorletParams::default()).unwrap();
        let w = cwt(&x, &grid, MorletParams::default()).unwrap();
        let fit = fit_ar1(&x).unwrap();
        let sig = significance_power(&w, &fit, 120, 0.05, 11).unwrap();
        let periods = grid.periods();
        let mut j0 = 0;
        for (j, p) in periods.iter().enumerate() {
            if (p - p0).abs() < (periods[j0] - p0).abs() {
                j0 = j;
            }
        }
        // the tone row should be flagged over most of its in-cone extent
        let mut inside = 0;
        let mut flagged = 0;
        for t in 0..n {
            if w.in_coi(j0, t) {
                inside += 1;
                if sig.mask[[j0, t]] {
                    flagged += 1;
                }
            }
        }
        assert!(inside > 100);
        assert!(
            flagged as f64 > 0.9 * inside as f64,
            "tone flagged at {flagged}/{inside} in-cone cells"
        );
        // a quiet row two octaves below should be mostly unflagged
        let mut jq = 0;
        for (j, p) in periods.iter().enumerate() {
            if (p - 8.0).abs() < (periods[jq] - 8.0).abs() {
                jq = j;
            }
        }
        let mut quiet_flagged = 0;
        let mut quiet_inside = 0;
        for t in 0..n {
            if w.in_coi(jq, t) {
                quiet_inside += 1;
                if sig.mask[[jq, t]] {
                    quiet_flagged += 1;
                }
            }
        }
        assert!(
            (quiet_flagged as f64) < 0.25 * quiet_inside as f64,
            "background flagged at {quiet_flagged}/{quiet_inside}"
        );
    }

    #[test]
    fn coherence_significance_flags_little_for_independent_noise() {
        let n = 256;
        let mx = Ar1Model { mean: 0.0, phi: 0.5, sigma: 1.0 };
        let my = Ar1Model { mean: 0.0, phi: 0.3, sigma: 2.0 };
        let x = monthly("x", draws(&mx, n, 1));
        let y = monthly("y", draws(&my, n, 2));
        let grid = make_scale_grid(1.0, n, 2.0, 0.5, 64.0, MorletParams::default()).unwrap();
        let sig = significance_coherence(
            &x,
            &y,
            &grid,
            MorletParams::default(),
            &SmoothingSpec::default(),
            100,
            0.05,
            21,
        )
        .unwrap();
        let coi = coi_periods(1.0, n);
        let periods = grid.periods();
        let mut inside = 0;
        let mut flagged = 0;
        for j in 0..grid.len() {
            for t in 0..n {
                if periods[j] <= coi[t] {
                    inside += 1;
                    if sig.mask[[j, t]] {
                        flagged += 1;
                    }
                }
            }
        }
        // a single null realization: the rejection share should be small
        let share = flagged as f64 / inside as f64;
        assert!(share < 0.25, "null rejection share {share}");
    }

    #[test]
    fn coherence_significance_flags_nearly_everything_for_a_copy() {
        let n = 256;
        let m = Ar1Model { mean: 0.0, phi: 0.4, sigma: 1.0 };
        let x = monthly("x", draws(&m, n, 8));
        let mut y = x.clone();
        y.label = "y".into();
        // an exact copy has coherence 1 everywhere, above every null quantile
        let grid = make_scale_grid(1.0, n, 2.0, 0.5, 64.0, MorletParams::default()).unwrap();
        let sig = significance_coherence(
            &x,
            &y,
            &grid,
            MorletParams::default(),
            &SmoothingSpec::default(),
            100,
            0.05,
            31,
        )
        .unwrap();
        let coi = coi_periods(1.0, n);
        let periods = grid.periods();
        let mut inside = 0;
        let mut flagged = 0;
        for j in 0..grid.len() {
            for t in 0..n {
                if periods[j] <= coi[t] {
                    inside += 1;
                    if sig.mask[[j, t]] {
                        flagged += 1;
                    }
                }
            }
        }
        assert!(
            flagged as f64 > 0.99 * inside as f64,
            "self-pair flagged at {flagged}/{inside}"
        );
    }

    #[test]
    fn invalid_monte_carlo_parameters_rejected() {
        let model = Ar1Model { mean: 0.0, phi: 0.0, sigma: 1.0 };
        let x = monthly("x", draws(&model, 64, 1));
        let grid = make_scale_grid(1.0, 64, 2.0, 0.5, 16.0, MorletParams::default()).unwrap();
        let w = cwt(&x, &grid, MorletParams::default()).unwrap();
        let fit = fit_ar1(&x).unwrap();
        assert!(matches!(
            significance_power(&w, &fit, 100, 0.0, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            significance_power(&w, &fit, 100, 1.0, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            significance_power(&w, &fit, 99, 0.05, 1),
            Err(Error::InvalidParam(_))
        ));
        let y = monthly("y", draws(&model, 64, 2));
        assert!(matches!(
            significance_coherence(
                &x,
                &y,
                &grid,
                MorletParams::default(),
                &SmoothingSpec::default(),
                99,
                0.05,
                1
            ),
            Err(Error::InvalidParam(_))
        ));
    }
}
