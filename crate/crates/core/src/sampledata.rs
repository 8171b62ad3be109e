//! Deterministic synthetic stand-ins for the bundled archive files.
//!
//! The bundled `data/` directory is **not** observational data. Every file in
//! it is produced by [`generate_from_parts`] with the seeds recorded in
//! [`ARCHIVE_SEEDS`], then written in the layout of the corresponding public
//! archive by [`write_archive`] so the format presets in [`crate::series`]
//! exercise realistic inputs.
//!
//! The construction, in full:
//!
//! * **Solar activity** is a sum of idealized ~11-year cycles (a cubic rise
//!   under a Gaussian-style decay) whose peak heights follow a smooth
//!   multi-decadal envelope: moderately strong in the mid-1800s, a minimum
//!   near 1900, a crest at mid-century and a decline after. On top of the
//!   deterministic base sit two slow stochastic **amplitude modulations**
//!   (band-limited factors with ~18–31-year and ~33–57-year periods that
//!   scale the whole waveform by a few percent) and a small
//!   activity-dependent jitter.
//! * **Temperatures** (north, south) are each the sum of: a linear response
//!   to fossil-fuel emissions; a lagged response to a low-passed copy of
//!   the solar base (a century-scale "secular" driver; the low-pass removes
//!   the ~11-year line, and the lag makes solar activity lead); lagged
//!   responses to the two stochastic amplitude modulations, of which the
//!   early-band coupling fades out mid-century (the scenario the analyses
//!   are meant to detect: a band coupling that holds early in the record
//!   and disappears later) while the late-band coupling persists; a shared
//!   ENSO-like quasi-periodic term; and hemispheric red noise whose
//!   innovation scale shrinks over the record. The northern hemisphere
//!   responds to the solar drivers much more strongly than the southern.
//!   The global record is the hemispheric mean plus a little independent
//!   noise. All three are re-centered on a 1951–1980 base period and
//!   rounded to integer hundredths of a degree, exactly as stored in the
//!   archive layout.
//! * **Emissions** follow a piecewise-linear schedule through historically
//!   shaped knots (wars and recessions included), in metric tons of carbon
//!   per year.
//!
//! Everything is a pure function of the [`SeedParts`]; two calls with equal
//! seeds produce identical records.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::series::{Step, TimeSeries};

/// First year of the emitted records.
const START_YEAR: i32 = 1880;
/// Monthly samples emitted: January 1880 through May 2016.
pub const MONTHS: usize = 1637;
/// Annual emission records: 1880 through 2013.
pub const EMISSION_YEARS: usize = 134;

/// The solar base is built on a longer internal axis so the low-pass
/// filters and the response lag never see a series edge inside the emitted
/// window (the widest filter reaches 52 years to each side).
const EXT_START_YEAR: i32 = 1824;
const EXT_MONTHS: usize = (2066 - 1824 + 1) * 12;
/// Index of January 1880 on the extended axis.
const CROP_OFFSET: usize = ((START_YEAR - EXT_START_YEAR) as usize) * 12;

/// `(cycle start, decimal years; peak monthly mean sunspot number)`.
///
/// Peak heights trace a smooth multi-decadal envelope: moderately strong
/// mid-1800s cycles, a minimum around the turn of the century, a crest at
/// mid-century and a decline afterwards. Cycles outside the emitted window
/// only feed the low-pass filters.
const SOLAR_CYCLES: &[(f64, f64)] = &[
    (1823.4, 210.0),
    (1834.3, 230.0),
    (1844.6, 225.0),
    (1854.6, 205.0),
    (1865.4, 185.0),
    (1875.3, 160.0),
    (1886.2, 145.0),
    (1896.4, 140.0),
    (1907.1, 150.0),
    (1917.2, 175.0),
    (1927.8, 210.0),
    (1937.8, 245.0),
    (1948.2, 285.0),
    (1958.8, 240.0),
    (1969.3, 215.0),
    (1979.8, 195.0),
    (1990.2, 165.0),
    (2000.9, 125.0),
    (2011.5, 115.0),
    (2022.0, 125.0),
    (2032.6, 135.0),
    (2043.0, 140.0),
    (2053.5, 145.0),
    (2063.8, 150.0),
];

/// Rise-time parameter of the cycle shape, months.
const CYCLE_RISE_MONTHS: f64 = 50.0;
/// Offset in the cycle shape denominator; keeps the early rise cubic.
const CYCLE_SHAPE_OFFSET: f64 = 0.71;

/// Solar jitter: AR(1) coefficient and the activity-dependent scale
/// `base_floor + slope·activity` it is multiplied by.
const JITTER_PHI: f64 = 0.4;
const JITTER_FLOOR: f64 = 1.5;
const JITTER_SLOPE: f64 = 0.07;

/// Stochastic amplitude modulations of the solar waveform: band-limited
/// noise (hard spectral mask between the two periods, in months) scaling
/// the whole base by `1 + depth·value`. A few percent of depth is enough
/// to carry a band signal while staying far below the year-to-year
/// variation a short-lag regression could read it from. The early band
/// covers the 200–300-month analysis range; the late band sits above it.
const BAND_EARLY_PERIODS: (f64, f64) = (216.0, 372.0);
const BAND_LATE_PERIODS: (f64, f64) = (400.0, 680.0);
const BAND_DEPTH: f64 = 0.04;

/// Width (standard deviation, months) of the Gaussian low-pass producing
/// the secular driver: the century-scale solar activity level, far above
/// the ~11-year cycle, so the driver carries no cycle line.
const SECULAR_SIGMA_MONTHS: f64 = 156.0;
/// Temperatures respond to solar activity this many months later.
const RESPONSE_LAG_MONTHS: usize = 30;

/// Temperature response amplitudes, in 0.01 °C per standard deviation of
/// each solar driver.
const SECULAR_RESPONSE_NORTH: f64 = 2.0;
const SECULAR_RESPONSE_SOUTH: f64 = 0.5;

/// Responses to the two solar amplitude modulations, and the years over
/// which the early-band coupling fades to zero (cosine taper). The fade is
/// the scenario under study: an early-record band coupling that no longer
/// holds in the later decades. The late-band coupling persists.
const BAND_EARLY_RESPONSE_NORTH: f64 = 5.0;
const BAND_EARLY_RESPONSE_SOUTH: f64 = 0.6;
const BAND_LATE_RESPONSE_NORTH: f64 = 5.0;
const BAND_LATE_RESPONSE_SOUTH: f64 = 0.7;
const BAND_FADE_YEARS: (f64, f64) = (1948.0, 1960.0);

/// Warming per million metric tons of carbon emitted per year, 0.01 °C.
const WARMING_PER_MTC_NORTH: f64 = 0.0100;
const WARMING_PER_MTC_SOUTH: f64 = 0.0072;

/// ENSO-like shared term: damped oscillator pseudo-period and pole radius,
/// plus the amplitude (0.01 °C) and per-hemisphere weights.
const ENSO_PERIOD_MONTHS: f64 = 60.0;
const ENSO_POLE_RADIUS: f64 = 0.985;
const ENSO_AMPLITUDE: f64 = 14.0;
const ENSO_WEIGHT_NORTH: f64 = 0.9;
const ENSO_WEIGHT_SOUTH: f64 = 1.1;

/// Hemispheric noise: AR(1) coefficient and innovation scale (0.01 °C).
const NOISE_PHI: f64 = 0.65;
const NOISE_INNOVATION: f64 = 8.0;

/// Extra noise on the global record beyond the hemispheric mean.
const GLOBAL_EPS_PHI: f64 = 0.3;
const GLOBAL_EPS_INNOVATION: f64 = 0.7;

/// Anomaly base period (inclusive years) used to re-center temperatures.
const BASE_PERIOD: (i32, i32) = (1951, 1980);

/// Annual emission knots `(year, million metric tons of carbon)`; linear
/// interpolation in between. Dips mark the world wars and the Depression.
const EMISSION_KNOTS: &[(i32, f64)] = &[
    (1880, 236.0),
    (1885, 278.0),
    (1890, 356.0),
    (1895, 420.0),
    (1900, 534.0),
    (1905, 663.0),
    (1910, 819.0),
    (1913, 920.0),
    (1915, 840.0),
    (1920, 932.0),
    (1925, 1020.0),
    (1929, 1182.0),
    (1932, 940.0),
    (1936, 1090.0),
    (1939, 1230.0),
    (1942, 1290.0),
    (1945, 1160.0),
    (1950, 1630.0),
    (1955, 2040.0),
    (1960, 2577.0),
    (1965, 3130.0),
    (1970, 4053.0),
    (1975, 4596.0),
    (1980, 5316.0),
    (1983, 5260.0),
    (1985, 5438.0),
    (1990, 6144.0),
    (1995, 6420.0),
    (2000, 6765.0),
    (2005, 7971.0),
    (2010, 9167.0),
    (2013, 9776.0),
];

/// Measurement-era innovation scaling for the hemispheric noise:
/// `(until_year, scale)` knots, linearly interpolated between them.
const ERA_SCALE_KNOTS: &[(f64, f64)] = &[
    (1920.0, 1.05),
    (1930.0, 1.0),
    (1975.0, 1.0),
    (1985.0, 0.9),
];

/// Independent seeds for the five random components of a generated record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedParts {
    pub solar_jitter: u64,
    pub solar_band: u64,
    pub enso: u64,
    pub north: u64,
    pub south: u64,
    pub global_eps: u64,
}

/// Seeds behind the committed `data/` files. Regenerating with these parts
/// and re-running [`write_archive`] reproduces the archive byte-for-byte.
pub const ARCHIVE_SEEDS: SeedParts = SeedParts {
    solar_jitter: 1,
    solar_band: 2,
    enso: 3,
    north: 4,
    south: 5,
    global_eps: 6,
};

/// Expand one seed into independent per-component seeds (splitmix64).
pub fn seed_parts(seed: u64) -> SeedParts {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    };
    SeedParts {
        solar_jitter: next(),
        solar_band: next(),
        enso: next(),
        north: next(),
        south: next(),
        global_eps: next(),
    }
}

/// One full synthetic study input set, exactly as stored in the archive
/// files (values already rounded to their file precision).
#[derive(Debug, Clone)]
pub struct StudyData {
    pub sunspots: TimeSeries,
    pub temp_north: TimeSeries,
    pub temp_south: TimeSeries,
    pub temp_global: TimeSeries,
    pub co2: TimeSeries,
}

/// Generate a record set from a single seed (see [`seed_parts`]).
pub fn generate(seed: u64) -> StudyData {
    generate_from_parts(&seed_parts(seed))
}

/// Generate a record set from explicit per-component seeds.
pub fn generate_from_parts(parts: &SeedParts) -> StudyData {
    let base_ext = solar_base_extended();
    let secular = secular_driver(&base_ext);
    let (early_ext, late_ext) = band_modulations_extended(parts.solar_band);
    let band_early = band_driver(&early_ext, Some(BAND_FADE_YEARS));
    let band_late = band_driver(&late_ext, None);
    let e_tons = emissions_annual();
    let e_monthly = emissions_monthly(&e_tons);

    let sun = sunspot_record(&base_ext, &early_ext, &late_ext, parts.solar_jitter);
    let enso = enso_record(parts.enso);

    let raw_north = temperature_raw(
        &secular,
        &band_early,
        &band_late,
        &e_monthly,
        &enso,
        SECULAR_RESPONSE_NORTH,
        BAND_EARLY_RESPONSE_NORTH,
        BAND_LATE_RESPONSE_NORTH,
        WARMING_PER_MTC_NORTH,
        ENSO_WEIGHT_NORTH,
        parts.north,
    );
    let raw_south = temperature_raw(
        &secular,
        &band_early,
        &band_late,
        &e_monthly,
        &enso,
        SECULAR_RESPONSE_SOUTH,
        BAND_EARLY_RESPONSE_SOUTH,
        BAND_LATE_RESPONSE_SOUTH,
        WARMING_PER_MTC_SOUTH,
        ENSO_WEIGHT_SOUTH,
        parts.south,
    );
    let mut raw_global = ar1_noise(parts.global_eps, GLOBAL_EPS_PHI, GLOBAL_EPS_INNOVATION, MONTHS);
    for t in 0..MONTHS {
        raw_global[t] += 0.5 * (raw_north[t] + raw_south[t]);
    }

    let monthly = |label: &str, values: Vec<f64>| {
        TimeSeries::new(label, Step::Monthly, START_YEAR, 1, values)
            .expect("synthetic monthly axis is valid")
    };
    StudyData {
        sunspots: monthly("sunspots", sun),
        temp_north: monthly("temp_north", anomaly(&raw_north)),
        temp_south: monthly("temp_south", anomaly(&raw_south)),
        temp_global: monthly("temp_global", anomaly(&raw_global)),
        co2: TimeSeries::new("co2_emissions", Step::Annual, START_YEAR, 1, e_tons)
            .expect("synthetic annual axis is valid"),
    }
}

/// Idealized cycle shape: `u^{3/2} / (e^u − c)` with `u = (x/b)²`, zero for
/// `x ≤ 0`; rises over ~4–5 years and decays within the following decade.
fn cycle_shape(months_since_start: f64) -> f64 {
    if months_since_start <= 0.0 {
        return 0.0;
    }
    let u = (months_since_start / CYCLE_RISE_MONTHS).powi(2);
    u.powf(1.5) / (u.exp() - CYCLE_SHAPE_OFFSET)
}

/// Peak value of [`cycle_shape`], used to express amplitudes as peaks.
fn cycle_shape_peak() -> f64 {
    let mut peak = 0.0_f64;
    let mut x = 0.0;
    while x <= 200.0 {
        peak = peak.max(cycle_shape(x));
        x += 0.25;
    }
    peak
}

/// Deterministic (noise-free) solar base on the extended monthly axis.
fn solar_base_extended() -> Vec<f64> {
    let peak = cycle_shape_peak();
    let mut base = vec![0.0; EXT_MONTHS];
    for (t, b) in base.iter_mut().enumerate() {
        let years = EXT_START_YEAR as f64 + (t as f64 + 0.5) / 12.0;
        let mut v = 0.0;
        for &(start, amp) in SOLAR_CYCLES {
            v += amp / peak * cycle_shape((years - start) * 12.0);
        }
        *b = v;
    }
    base
}

/// Lagged Gaussian low-pass of the solar base, on the emitted axis.
fn lagged_lowpass(base_ext: &[f64], sigma: f64, lag_months: usize) -> Vec<f64> {
    let half = (4.0 * sigma).ceil() as usize;
    let kernel: Vec<f64> = (0..=2 * half)
        .map(|k| {
            let u = (k as f64 - half as f64) / sigma;
            (-0.5 * u * u).exp()
        })
        .collect();
    let ksum: f64 = kernel.iter().sum();

    let mut out = vec![0.0; MONTHS];
    for (t, d) in out.iter_mut().enumerate() {
        let center = CROP_OFFSET + t - lag_months;
        let mut acc = 0.0;
        for (k, w) in kernel.iter().enumerate() {
            acc += w * base_ext[center + k - half];
        }
        *d = acc / ksum;
    }
    out
}

/// Standardize in place to zero mean and unit variance.
fn standardize(v: &mut [f64]) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    for x in v {
        *x = (*x - mean) / sd;
    }
}

/// Secular driver: the century-scale solar activity level.
fn secular_driver(base_ext: &[f64]) -> Vec<f64> {
    let mut v = lagged_lowpass(base_ext, SECULAR_SIGMA_MONTHS, RESPONSE_LAG_MONTHS);
    standardize(&mut v);
    v
}

/// The two stochastic amplitude modulations on the extended axis, each
/// standardized band-limited noise: Gaussian white noise spectrally masked
/// to the given period range (months) by a hard FFT mask. Both derive from
/// the one band seed.
fn band_modulations_extended(seed: u64) -> (Vec<f64>, Vec<f64>) {
    (
        band_noise(seed, BAND_EARLY_PERIODS),
        band_noise(seed.wrapping_add(0x9E3779B97F4A7C15), BAND_LATE_PERIODS),
    )
}

/// Band-limited noise: white noise restricted to periods (months) inside
/// `[lo, hi]`, circular on the extended axis, standardized.
fn band_noise(seed: u64, (lo, hi): (f64, f64)) -> Vec<f64> {
    use num_complex::Complex;

    let n = EXT_MONTHS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(rng.sample(StandardNormal), 0.0))
        .collect();

    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        let cycles = k.min(n - k);
        let keep = cycles > 0 && {
            let period = n as f64 / cycles as f64;
            (lo..=hi).contains(&period)
        };
        if !keep {
            *v = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);

    let mut out: Vec<f64> = buf.iter().map(|v| v.re).collect();
    standardize(&mut out);
    out
}

/// Temperature-side driver for an amplitude modulation: lagged by the
/// response lag, standardized, then optionally faded to zero over the
/// given years (cosine taper).
fn band_driver(band_ext: &[f64], fade: Option<(f64, f64)>) -> Vec<f64> {
    let mut v: Vec<f64> = (0..MONTHS)
        .map(|t| band_ext[CROP_OFFSET + t - RESPONSE_LAG_MONTHS])
        .collect();
    standardize(&mut v);
    if let Some((fade_from, fade_to)) = fade {
        for (t, x) in v.iter_mut().enumerate() {
            let year = START_YEAR as f64 + (t as f64 + 0.5) / 12.0;
            let ramp = if year <= fade_from {
                1.0
            } else if year >= fade_to {
                0.0
            } else {
                let u = (year - fade_from) / (fade_to - fade_from);
                (0.5 * PI * u).cos().powi(2)
            };
            *x *= ramp;
        }
    }
    v
}

/// Monthly sunspot record: amplitude-modulated base plus activity-scaled
/// jitter, clamped at zero and rounded to one decimal as stored in the
/// archive layout.
fn sunspot_record(base_ext: &[f64], early_ext: &[f64], late_ext: &[f64], seed: u64) -> Vec<f64> {
    let jitter = ar1_noise(seed, JITTER_PHI, 1.0, MONTHS);
    (0..MONTHS)
        .map(|t| {
            let i = CROP_OFFSET + t;
            let factor = 1.0 + BAND_DEPTH * (early_ext[i] + late_ext[i]);
            let b = base_ext[i] * factor;
            let v = (b + (JITTER_FLOOR + JITTER_SLOPE * b) * jitter[t]).max(0.0);
            (v * 10.0).round() / 10.0
        })
        .collect()
}

/// Standardized ENSO-like record: damped AR(2) oscillator.
fn enso_record(seed: u64) -> Vec<f64> {
    damped_oscillation(seed, ENSO_PERIOD_MONTHS, ENSO_POLE_RADIUS, MONTHS, 300)
}

/// Standardized damped AR(2) oscillation with the given pseudo-period and
/// pole radius, after a burn-in.
fn damped_oscillation(seed: u64, period: f64, pole: f64, n: usize, burn: usize) -> Vec<f64> {
    let a1 = 2.0 * pole * (2.0 * PI / period).cos();
    let a2 = -pole * pole;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x1 = 0.0;
    let mut x2 = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..burn + n {
        let e: f64 = rng.sample(StandardNormal);
        let x = a1 * x1 + a2 * x2 + e;
        x2 = x1;
        x1 = x;
        if t >= burn {
            out.push(x);
        }
    }
    standardize(&mut out);
    out
}

/// AR(1) noise with constant innovation scale, stationary after burn-in.
fn ar1_noise(seed: u64, phi: f64, innovation: f64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 200;
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..burn + n {
        let e: f64 = rng.sample(StandardNormal);
        x = phi * x + innovation * e;
        if t >= burn {
            out.push(x);
        }
    }
    out
}

/// Innovation scaling for the hemispheric noise at a given month.
fn era_scale(t: usize) -> f64 {
    let year = START_YEAR as f64 + (t as f64 + 0.5) / 12.0;
    let knots = ERA_SCALE_KNOTS;
    if year <= knots[0].0 {
        return knots[0].1;
    }
    for w in knots.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if year <= x1 {
            return y0 + (y1 - y0) * (year - x0) / (x1 - x0);
        }
    }
    knots[knots.len() - 1].1
}

/// Raw (un-centered) hemispheric temperature in 0.01 °C.
#[allow(clippy::too_many_arguments)]
fn temperature_raw(
    secular: &[f64],
    band_early: &[f64],
    band_late: &[f64],
    e_monthly: &[f64],
    enso: &[f64],
    secular_response: f64,
    band_early_response: f64,
    band_late_response: f64,
    warming_per_mtc: f64,
    enso_weight: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 200;
    let mut x = 0.0;
    let mut out = Vec::with_capacity(MONTHS);
    for t in 0..burn + MONTHS {
        let e: f64 = rng.sample(StandardNormal);
        let scale = if t < burn { era_scale(0) } else { era_scale(t - burn) };
        x = NOISE_PHI * x + NOISE_INNOVATION * scale * e;
        if t >= burn {
            let i = t - burn;
            out.push(
                warming_per_mtc * (e_monthly[i] / 1.0e6)
                    + secular_response * secular[i]
                    + band_early_response * band_early[i]
                    + band_late_response * band_late[i]
                    + enso_weight * ENSO_AMPLITUDE * enso[i]
                    + x,
            );
        }
    }
    out
}

/// Re-center on the anomaly base period and round to integer hundredths.
fn anomaly(raw: &[f64]) -> Vec<f64> {
    let lo = ((BASE_PERIOD.0 - START_YEAR) * 12) as usize;
    let hi = ((BASE_PERIOD.1 + 1 - START_YEAR) * 12) as usize;
    let mean = raw[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
    raw.iter().map(|v| (v - mean).round()).collect()
}

/// Annual emissions in metric tons of carbon, 1880..=2013.
fn emissions_annual() -> Vec<f64> {
    let mut out = Vec::with_capacity(EMISSION_YEARS);
    for year in START_YEAR..START_YEAR + EMISSION_YEARS as i32 {
        let mut mtc = EMISSION_KNOTS[EMISSION_KNOTS.len() - 1].1;
        for w in EMISSION_KNOTS.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if year <= x1 {
                let f = (year - x0) as f64 / (x1 - x0) as f64;
                mtc = y0 + (y1 - y0) * f.max(0.0);
                break;
            }
        }
        out.push(mtc.round() * 1.0e6);
    }
    out
}

/// Per-month emission rate; years past the annual record extrapolate the
/// last knot slope (the monthly temperatures run 29 months longer).
fn emissions_monthly(e_tons: &[f64]) -> Vec<f64> {
    let last = e_tons[e_tons.len() - 1];
    let slope = last - e_tons[e_tons.len() - 2];
    (0..MONTHS)
        .map(|t| {
            let y = t / 12;
            if y < e_tons.len() {
                e_tons[y]
            } else {
                last + slope * (y - e_tons.len() + 1) as f64
            }
        })
        .collect()
}

/// Write the record set in the archive layouts; returns the paths written
/// (sunspots, north, south, global, emissions).
pub fn write_archive(data: &StudyData, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut paths = Vec::new();
    let mut emit = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(path.display().to_string(), e))?;
        paths.push(path);
        Ok(())
    };
    emit("sunspots.txt", sidc_layout(&data.sunspots))?;
    emit("temp_north.csv", giss_layout(&data.temp_north))?;
    emit("temp_south.csv", giss_layout(&data.temp_south))?;
    emit("temp_global.csv", giss_layout(&data.temp_global))?;
    emit("co2_emissions.csv", cdiac_layout(&data.co2))?;
    Ok(paths)
}

/// Monthly sunspot file: `year;month;decimal_year;value;sd;nobs;prov` rows.
fn sidc_layout(s: &TimeSeries) -> String {
    let mut out = String::new();
    out.push_str("# Synthetic monthly mean total sunspot number (archive layout)\n");
    out.push_str("# year;month;decimal_year;value;std;n_obs;provisional\n");
    for (i, v) in s.values.iter().enumerate() {
        let idx = s.start_index() + i as i64;
        let year = idx.div_euclid(12);
        let month = idx.rem_euclid(12) + 1;
        let dec_year = year as f64 + (month as f64 - 0.5) / 12.0;
        let sd = ((1.0 + 0.08 * v) * 10.0).round() / 10.0;
        let nobs = 300 + (i * 37) % 131;
        let _ = writeln!(out, "{year};{month:02};{dec_year:.3};{v:5.1};{sd:4.1};{nobs};1");
    }
    out
}

/// Wide temperature table: preamble, `Year,Jan..Dec,J-D` header, one row
/// per year with integer hundredths and `***` for missing cells.
fn giss_layout(s: &TimeSeries) -> String {
    let mut out = String::new();
    out.push_str("Synthetic surface air temperature anomaly (archive layout)\n");
    out.push_str("Units: 0.01 degrees Celsius, base period 1951-1980\n");
    out.push_str("\n");
    out.push_str("Year,Jan,Feb,Mar,Apr,May,Jun,Jul,Aug,Sep,Oct,Nov,Dec,J-D\n");
    let start = s.start_index();
    let end = start + s.len() as i64; // exclusive month index
    let first_year = start.div_euclid(12);
    let last_year = (end - 1).div_euclid(12);
    for year in first_year..=last_year {
        let mut cells = Vec::with_capacity(13);
        let mut sum = 0.0;
        let mut present = 0;
        for m in 0..12 {
            let idx = year * 12 + m;
            if idx < start || idx >= end {
                cells.push("***".to_string());
            } else {
                let v = s.values[(idx - start) as usize];
                sum += v;
                present += 1;
                cells.push(format!("{}", v as i64));
            }
        }
        if present == 12 {
            cells.push(format!("{}", (sum / 12.0).round() as i64));
        } else {
            cells.push("***".to_string());
        }
        let _ = writeln!(out, "{},{}", year, cells.join(","));
    }
    out
}

/// Annual emissions file: preamble plus `year,total` rows in metric tons.
fn cdiac_layout(s: &TimeSeries) -> String {
    let mut out = String::new();
    out.push_str("Synthetic global fossil-fuel carbon emission totals (archive layout)\n");
    out.push_str("Units: metric tons of carbon per year\n");
    out.push_str("Year,Total\n");
    for (i, v) in s.values.iter().enumerate() {
        let year = s.start_index() + i as i64;
        let _ = writeln!(out, "{},{}", year, *v as i64);
    }
    out
}
