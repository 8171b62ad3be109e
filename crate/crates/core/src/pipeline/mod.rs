//! File-level orchestration: configuration, the study commands and their
//! on-disk outputs.
//!
//! Commands read the five input records (sunspot numbers, three temperature
//! records, emissions), run the in-memory analyses from the sibling modules
//! and write:
//!
//! * normalized CSV copies (`ingest/`),
//! * power grids + masks and their renderings (`power/`),
//! * coherence grids + masks, uncorrected monthly (`coherence/`) and
//!   emission-corrected annual (`coherence_corrected/`),
//! * causality and stationarity tables (`granger/`), text and JSON.
//!
//! Every text artifact embeds the configuration digest; reruns with equal
//! configuration and inputs produce byte-identical files. Files are written
//! atomically (write to a temporary sibling, then rename).

pub mod gridfile;
pub mod heatmap;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coherence::{wavelet_coherence, CoherenceField, SmoothingSpec};
use crate::cwt::{cwt, make_scale_grid, power, MorletParams, ScaleGrid, WaveletField};
use crate::econ::{
    adf_test, engle_granger, granger_frequency, granger_time, kpss_test, CointegrationFit,
    FreqGrangerBand, TestReport,
};
use crate::error::{Error, Result};
use crate::series::{align, annual_mean, parse_series, write_csv, SeriesFormat, Step, TimeSeries};
use crate::significance::{fit_ar1, significance_coherence, significance_power, SignificanceMask};

use gridfile::GridDoc;
use heatmap::{log_normalize, ArrowLayer, HeatmapOptions};

/// Full parameter set of a study run. Parses from and serializes to a
/// `key = value` text format; the canonical serialization is hashed into a
/// digest that every output embeds.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Input paths and their format presets.
    pub sunspots: String,
    pub sunspots_format: SeriesFormat,
    pub temp_north: String,
    pub temp_north_format: SeriesFormat,
    pub temp_south: String,
    pub temp_south_format: SeriesFormat,
    pub temp_global: String,
    pub temp_global_format: SeriesFormat,
    pub co2: String,
    pub co2_format: SeriesFormat,
    /// Smallest scale as a multiple of the sampling step.
    pub s0_steps: f64,
    /// Scale grid resolution in octave fractions.
    pub dj: f64,
    /// Largest Fourier period for monthly grids, months.
    pub max_period_months: f64,
    /// Largest Fourier period for annual grids, years.
    pub max_period_years: f64,
    /// Morlet center frequency.
    pub omega0: f64,
    /// Time-smoothing width as a multiple of scale.
    pub time_sigma: f64,
    /// Scale-smoothing width in octaves.
    pub scale_octaves: f64,
    /// Monte Carlo significance level.
    pub level: f64,
    /// Surrogate count for the significance masks.
    pub surrogates: usize,
    /// Base seed; each stage derives its own stream from it.
    pub seed: u64,
    /// Squared-coherence threshold for drawing phase arrows.
    pub arrow_threshold: f64,
    /// Arrow decimation along the time axis, years.
    pub arrow_step_years: f64,
    /// When set, `coherence` resamples annually and replaces temperatures
    /// by their cointegration residuals against emissions.
    pub corrected: bool,
    /// Lag-order search bound for the time-domain causality tests.
    pub granger_max_lag: usize,
    /// Autoregressive order of the frequency-domain causality system.
    pub spectral_lag: usize,
    /// Boundary between the "short" and "long" period bands, years.
    pub band_split_years: f64,
    /// Longest period included in the long band, years.
    pub band_max_years: f64,
    /// Bootstrap replications for the frequency-band critical values.
    pub bootstrap: usize,
    /// Output directory.
    pub outdir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sunspots: "data/sunspots.txt".into(),
            sunspots_format: SeriesFormat::SidcSunspots,
            temp_north: "data/temp_north.csv".into(),
            temp_north_format: SeriesFormat::GissTemperature,
            temp_south: "data/temp_south.csv".into(),
            temp_south_format: SeriesFormat::GissTemperature,
            temp_global: "data/temp_global.csv".into(),
            temp_global_format: SeriesFormat::GissTemperature,
            co2: "data/co2_emissions.csv".into(),
            co2_format: SeriesFormat::CdiacCo2,
            s0_steps: 2.0,
            dj: 1.0 / 12.0,
            max_period_months: 512.0,
            max_period_years: 64.0,
            omega0: 6.0,
            time_sigma: 1.0,
            scale_octaves: 0.6,
            level: 0.05,
            surrogates: 300,
            seed: 1880,
            arrow_threshold: 0.5,
            arrow_step_years: 4.0,
            corrected: false,
            granger_max_lag: 12,
            spectral_lag: 11,
            band_split_years: 16.0,
            band_max_years: 64.0,
            bootstrap: 1000,
            outdir: "out".into(),
        }
    }
}

/// `(key, getter, setter)` table driving both serialization directions.
macro_rules! config_fields {
    ($macro:ident) => {
        $macro! {
            sunspots: path,
            sunspots_format: format,
            temp_north: path,
            temp_north_format: format,
            temp_south: path,
            temp_south_format: format,
            temp_global: path,
            temp_global_format: format,
            co2: path,
            co2_format: format,
            s0_steps: f64,
            dj: f64,
            max_period_months: f64,
            max_period_years: f64,
            omega0: f64,
            time_sigma: f64,
            scale_octaves: f64,
            level: f64,
            surrogates: usize,
            seed: u64,
            arrow_threshold: f64,
            arrow_step_years: f64,
            corrected: bool,
            granger_max_lag: usize,
            spectral_lag: usize,
            band_split_years: f64,
            band_max_years: f64,
            bootstrap: usize,
            outdir: path,
        }
    };
}

impl RunConfig {
    /// Canonical text form: one `key = value` line per field, declaration
    /// order, shortest-round-trip float formatting.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        macro_rules! emit {
            ($($key:ident : $kind:ident),* $(,)?) => {
                $(emit!(@one $key $kind);)*
            };
            (@one $key:ident path) => {
                let _ = writeln!(out, "{} = {}", stringify!($key), self.$key);
            };
            (@one $key:ident format) => {
                let _ = writeln!(out, "{} = {}", stringify!($key), self.$key.name());
            };
            (@one $key:ident $kind:ident) => {
                let _ = writeln!(out, "{} = {}", stringify!($key), self.$key);
            };
        }
        config_fields!(emit);
        out
    }

    /// Parse the text form; unset keys keep their defaults, unknown keys
    /// are rejected. Lines starting with `#` and blank lines are ignored.
    pub fn from_text(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: format!("expected \"key = value\", got {line:?}"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Set one field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        macro_rules! assign {
            ($($key:ident : $kind:ident),* $(,)?) => {
                $(
                    if key == stringify!($key) {
                        assign!(@one $key $kind value);
                        return Ok(());
                    }
                )*
                return Err(Error::InvalidParam(format!(
                    "unknown configuration key {key:?}"
                )));
            };
            (@one $key:ident path $value:ident) => {
                self.$key = $value.to_string();
            };
            (@one $key:ident format $value:ident) => {
                self.$key = SeriesFormat::from_name($value)?;
            };
            (@one $key:ident bool $value:ident) => {
                self.$key = match $value {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(Error::InvalidParam(format!(
                            "{} must be true or false, got {:?}",
                            stringify!($key),
                            $value
                        )))
                    }
                };
            };
            (@one $key:ident $ty:ident $value:ident) => {
                self.$key = $value.parse::<$ty>().map_err(|_| {
                    Error::InvalidParam(format!(
                        "{} = {:?} is not a valid {}",
                        stringify!($key),
                        $value,
                        stringify!($ty)
                    ))
                })?;
            };
        }
        config_fields!(assign);
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_text(&text)
    }

    /// SHA-256 over the canonical text form, lowercase hex. The digest
    /// identifies the analysis, so it covers every field except the output
    /// directory: equal inputs and parameters give equal artifacts no
    /// matter where they are written.
    pub fn digest(&self) -> String {
        let canonical: String =
            self.to_text().lines().filter(|l| !l.starts_with("outdir ")).fold(
                String::new(),
                |mut acc, l| {
                    acc.push_str(l);
                    acc.push('\n');
                    acc
                },
            );
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let bytes = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in bytes {
            let _ = write!(hex, "{b:02x}");
        }
        hex
    }

    /// Configuration pointing at an input directory written by
    /// [`crate::sampledata::write_archive`], with outputs under `outdir`.
    pub fn for_data_dir(data: impl AsRef<Path>, outdir: impl AsRef<Path>) -> RunConfig {
        let data = data.as_ref();
        RunConfig {
            sunspots: data.join("sunspots.txt").display().to_string(),
            temp_north: data.join("temp_north.csv").display().to_string(),
            temp_south: data.join("temp_south.csv").display().to_string(),
            temp_global: data.join("temp_global.csv").display().to_string(),
            co2: data.join("co2_emissions.csv").display().to_string(),
            outdir: outdir.as_ref().display().to_string(),
            ..RunConfig::default()
        }
    }

    fn morlet(&self) -> Result<MorletParams> {
        MorletParams::new(self.omega0)
    }

    fn smoothing(&self) -> SmoothingSpec {
        SmoothingSpec { time_sigma: self.time_sigma, scale_octaves: self.scale_octaves }
    }

    fn monthly_grid(&self, n: usize) -> Result<ScaleGrid> {
        make_scale_grid(1.0, n, self.s0_steps, self.dj, self.max_period_months, self.morlet()?)
    }

    fn annual_grid(&self, n: usize) -> Result<ScaleGrid> {
        make_scale_grid(1.0, n, self.s0_steps, self.dj, self.max_period_years, self.morlet()?)
    }

    /// The two frequency bands (long, short) as angular frequencies per
    /// year: `(2π/max .. 2π/split]` and `(2π/split .. π]`.
    fn bands(&self) -> [(f64, f64); 2] {
        let split = 2.0 * std::f64::consts::PI / self.band_split_years;
        let lo = 2.0 * std::f64::consts::PI / self.band_max_years;
        [(lo, split), (split, std::f64::consts::PI)]
    }
}

/// Derive a per-stage seed so stages draw independent streams no matter
/// how many surrogates each consumes (splitmix64 of the pair).
fn stage_seed(base: u64, stage: u64) -> u64 {
    let mut z = base ^ stage.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// All five inputs, parsed and validated against their expected steps.
pub struct StudyInputs {
    pub sunspots: TimeSeries,
    pub temp_north: TimeSeries,
    pub temp_south: TimeSeries,
    pub temp_global: TimeSeries,
    pub co2: TimeSeries,
}

/// Parse the five configured inputs.
pub fn load_inputs(cfg: &RunConfig) -> Result<StudyInputs> {
    let expect_step = |ts: TimeSeries, step: Step| -> Result<TimeSeries> {
        if ts.step != step {
            return Err(Error::StepMismatch(format!(
                "series {:?} is {:?}, expected {:?}",
                ts.label, ts.step, step
            )));
        }
        Ok(ts)
    };
    Ok(StudyInputs {
        sunspots: expect_step(parse_series(&cfg.sunspots, cfg.sunspots_format)?, Step::Monthly)?,
        temp_north: expect_step(parse_series(&cfg.temp_north, cfg.temp_north_format)?, Step::Monthly)?,
        temp_south: expect_step(parse_series(&cfg.temp_south, cfg.temp_south_format)?, Step::Monthly)?,
        temp_global: expect_step(parse_series(&cfg.temp_global, cfg.temp_global_format)?, Step::Monthly)?,
        co2: expect_step(parse_series(&cfg.co2, cfg.co2_format)?, Step::Annual)?,
    })
}

/// Annual mean of a monthly temperature, truncated to the emission years,
/// and its cointegration fit: the residual is the "corrected" record.
pub fn corrected_annual(
    temp_monthly: &TimeSeries,
    co2: &TimeSeries,
) -> Result<(TimeSeries, CointegrationFit)> {
    let annual = annual_mean(temp_monthly)?;
    let (temp, emissions) = align(&annual, co2)?;
    let fit = engle_granger(&temp, &emissions)?;
    Ok((fit.residuals.clone(), fit))
}

fn reject_constant(ts: &TimeSeries) -> Result<()> {
    let first = ts.values[0];
    if ts.values.iter().all(|v| (v - first).abs() < 1e-300) {
        return Err(Error::Degenerate(format!("series {:?} is constant", ts.label)));
    }
    Ok(())
}

/// Atomic file write: a temporary sibling is renamed over the target.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

/// Parse, validate and normalize the inputs: writes one generic-CSV copy
/// per series plus a summary, and returns the paths written.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let inputs = load_inputs(cfg)?;
    let dir = Path::new(&cfg.outdir).join("ingest");
    ensure_dir(&dir)?;
    let digest = cfg.digest();

    let mut summary = format!("# config {digest}\n");
    let mut paths = Vec::new();
    let sources = [
        ("sunspots", &inputs.sunspots, &cfg.sunspots),
        ("temp_north", &inputs.temp_north, &cfg.temp_north),
        ("temp_south", &inputs.temp_south, &cfg.temp_south),
        ("temp_global", &inputs.temp_global, &cfg.temp_global),
        ("co2", &inputs.co2, &cfg.co2),
    ];
    for (role, ts, source) in sources {
        let _ = writeln!(
            summary,
            "{role}: {:?} {} {}..{}, n = {}, mean = {:.4}, source = {}",
            ts.label,
            match ts.step {
                Step::Monthly => "monthly",
                Step::Annual => "annual",
            },
            ts.time_label(0),
            ts.time_label(ts.len() - 1),
            ts.len(),
            ts.mean(),
            source,
        );
        let path = dir.join(format!("{role}.csv"));
        write_csv(ts, &path)?;
        paths.push(path);
    }
    let path = dir.join("summary.txt");
    write_text(&path, &summary)?;
    paths.push(path);
    Ok(paths)
}

fn grid_meta_common(cfg: &RunConfig, grid: &ScaleGrid) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("config".into(), cfg.digest());
    meta.insert("omega0".into(), format!("{}", cfg.omega0));
    meta.insert("s0".into(), format!("{}", grid.s0));
    meta.insert("dj".into(), format!("{}", grid.dj));
    meta.insert("dt".into(), format!("{}", grid.dt));
    meta.insert("level".into(), format!("{}", cfg.level));
    meta.insert("surrogates".into(), format!("{}", cfg.surrogates));
    meta
}

fn time_years(field_time: &crate::cwt::TimeAxis, n: usize) -> Vec<f64> {
    (0..n).map(|i| field_time.years(i)).collect()
}

/// Wavelet power with a red-noise significance mask for each input series.
pub fn cmd_power(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let inputs = load_inputs(cfg)?;
    let dir = Path::new(&cfg.outdir).join("power");
    ensure_dir(&dir)?;

    let mut paths = Vec::new();
    let series = [
        ("sunspots", &inputs.sunspots),
        ("temp_north", &inputs.temp_north),
        ("temp_south", &inputs.temp_south),
        ("temp_global", &inputs.temp_global),
    ];
    for (stage, (role, ts)) in series.into_iter().enumerate() {
        reject_constant(ts)?;
        let grid = cfg.monthly_grid(ts.len())?;
        let field = cwt(ts, &grid, cfg.morlet()?)?;
        let model = fit_ar1(ts)?;
        let seed = stage_seed(cfg.seed, 1 + stage as u64);
        let sig = significance_power(&field, &model, cfg.surrogates, cfg.level, seed)?;
        let pw = power(&field);

        let mut doc = power_doc(cfg, &field, &pw, &sig, role);
        doc.meta.insert("ar1_mean".into(), format!("{}", model.mean));
        doc.meta.insert("ar1_phi".into(), format!("{}", model.phi));
        doc.meta.insert("ar1_sigma".into(), format!("{}", model.sigma));
        let grid_path = dir.join(format!("{role}.grid"));
        doc.write(&grid_path)?;
        paths.push(grid_path);

        let img = heatmap::render(
            &log_normalize(&pw),
            &doc.periods,
            &doc.coi,
            Some(&sig.mask),
            None,
            &HeatmapOptions::default(),
        );
        let png_path = dir.join(format!("{role}.png"));
        heatmap::save_png(&img, &png_path)?;
        paths.push(png_path);
    }
    Ok(paths)
}

fn power_doc(
    cfg: &RunConfig,
    field: &WaveletField,
    pw: &ndarray::Array2<f64>,
    sig: &SignificanceMask,
    role: &str,
) -> GridDoc {
    let n = field.grid.n;
    let mut doc = GridDoc::new(
        field.label.clone(),
        field.grid.periods(),
        time_years(&field.time, n),
        field.coi.clone(),
    );
    doc.meta = grid_meta_common(cfg, &field.grid);
    doc.meta.insert("role".into(), role.into());
    doc.meta.insert("seed".into(), format!("{}", sig.rng_seed));
    doc.push_plane("power", pw.clone());
    doc.push_plane("null_q", sig.quantile.clone());
    doc.push_bool_plane("sig", &sig.mask);
    doc
}

/// Squared coherence, phase and significance for sunspots against each
/// temperature record. Uncorrected: monthly inputs as parsed. Corrected:
/// annual means with temperatures replaced by their cointegration
/// residuals against emissions.
pub fn cmd_coherence(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let inputs = load_inputs(cfg)?;
    let subdir = if cfg.corrected { "coherence_corrected" } else { "coherence" };
    let dir = Path::new(&cfg.outdir).join(subdir);
    ensure_dir(&dir)?;

    let mut paths = Vec::new();
    let temps = [
        ("north", &inputs.temp_north),
        ("south", &inputs.temp_south),
        ("global", &inputs.temp_global),
    ];
    for (stage, (role, temp)) in temps.into_iter().enumerate() {
        let seed = stage_seed(cfg.seed, 5 + 3 * cfg.corrected as u64 + stage as u64);
        let (x, y, fit, grid) = if cfg.corrected {
            let (resid, fit) = corrected_annual(temp, &inputs.co2)?;
            let sun_annual = annual_mean(&inputs.sunspots)?;
            let (x, y) = align(&sun_annual, &resid)?;
            let grid = cfg.annual_grid(x.len())?;
            (x, y, Some(fit), grid)
        } else {
            let (x, y) = align(&inputs.sunspots, temp)?;
            let grid = cfg.monthly_grid(x.len())?;
            (x, y, None, grid)
        };
        reject_constant(&x)?;
        reject_constant(&y)?;

        let spec = cfg.smoothing();
        let field = wavelet_coherence(&x, &y, &grid, cfg.morlet()?, &spec, cfg.arrow_threshold)?;
        let sig = significance_coherence(
            &x,
            &y,
            &grid,
            cfg.morlet()?,
            &spec,
            cfg.surrogates,
            cfg.level,
            seed,
        )?;

        let doc = coherence_doc(cfg, &field, &sig, fit.as_ref(), role);
        let grid_path = dir.join(format!("{role}.grid"));
        doc.write(&grid_path)?;
        paths.push(grid_path);

        let dt_years = if cfg.corrected { 1.0 } else { 1.0 / 12.0 };
        let col_step = (cfg.arrow_step_years / dt_years).round().max(1.0) as usize;
        let opts = HeatmapOptions {
            arrow_col_step: col_step,
            arrow_row_step: 6,
            ..Default::default()
        };
        let img = heatmap::render(
            &field.r2,
            &doc.periods,
            &doc.coi,
            Some(&sig.mask),
            Some(ArrowLayer { phase: &field.phase, cells: &field.arrow_mask }),
            &opts,
        );
        let png_path = dir.join(format!("{role}.png"));
        heatmap::save_png(&img, &png_path)?;
        paths.push(png_path);
    }
    Ok(paths)
}

fn coherence_doc(
    cfg: &RunConfig,
    field: &CoherenceField,
    sig: &SignificanceMask,
    fit: Option<&CointegrationFit>,
    role: &str,
) -> GridDoc {
    let n = field.grid.n;
    let mut doc = GridDoc::new(
        format!("{} x {}", field.label_x, field.label_y),
        field.grid.periods(),
        time_years(&field.time, n),
        field.coi.clone(),
    );
    doc.meta = grid_meta_common(cfg, &field.grid);
    doc.meta.insert("role".into(), role.into());
    doc.meta.insert("seed".into(), format!("{}", sig.rng_seed));
    doc.meta.insert("time_sigma".into(), format!("{}", field.smoothing.time_sigma));
    doc.meta.insert("scale_octaves".into(), format!("{}", field.smoothing.scale_octaves));
    doc.meta.insert("arrow_threshold".into(), format!("{}", field.arrow_threshold));
    doc.meta.insert("label_x".into(), field.label_x.clone());
    doc.meta.insert("label_y".into(), field.label_y.clone());
    if let Some(fit) = fit {
        doc.meta.insert("correction_slope".into(), format!("{}", fit.slope));
        doc.meta.insert("correction_intercept".into(), format!("{}", fit.intercept));
        doc.meta.insert("correction_decision".into(), format!("{}", fit.decision));
    }
    doc.push_plane("r2", field.r2.clone());
    doc.push_plane("phase", field.phase.clone());
    doc.push_bool_plane("arrows", &field.arrow_mask);
    doc.push_bool_plane("sig", &sig.mask);
    doc
}

/// One row of the time-domain causality table.
#[derive(Debug, Clone, Serialize)]
pub struct TimeDomainRow {
    pub effect: String,
    pub variant: String,
    pub report: TestReport,
}

/// Stationarity diagnostics for one series.
#[derive(Debug, Clone, Serialize)]
pub struct StationarityRow {
    pub series: String,
    pub adf: TestReport,
    pub kpss: TestReport,
}

/// Cointegration fit for one temperature record against emissions.
#[derive(Debug, Clone, Serialize)]
pub struct CointegrationRow {
    pub pair: String,
    pub fit: CointegrationFit,
}

/// One frequency-band causality result.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyRow {
    pub variant: String,
    pub period_low_years: f64,
    pub period_high_years: f64,
    pub band: FreqGrangerBand,
}

/// Everything `granger` computes, serializable as one document.
#[derive(Debug, Clone, Serialize)]
pub struct GrangerReport {
    pub config: String,
    pub time_domain: Vec<TimeDomainRow>,
    pub stationarity: Vec<StationarityRow>,
    pub cointegration: Vec<CointegrationRow>,
    pub frequency: Vec<FrequencyRow>,
}

/// Run the causality study on the annual records: six time-domain rows
/// (three temperatures × original/corrected), stationarity diagnostics,
/// cointegration fits, and the two period bands × original/corrected
/// frequency-domain results.
pub fn granger_report(cfg: &RunConfig) -> Result<GrangerReport> {
    let inputs = load_inputs(cfg)?;
    let sun_annual = annual_mean(&inputs.sunspots)?;
    let (sun, co2) = align(&sun_annual, &inputs.co2)?;

    // Annual temperatures on the emission sample, and their corrections.
    let mut originals = Vec::new();
    let mut corrected = Vec::new();
    let mut cointegration = Vec::new();
    for temp in [&inputs.temp_north, &inputs.temp_south, &inputs.temp_global] {
        let annual = annual_mean(temp)?;
        let (aligned, _) = align(&annual, &co2)?;
        let (resid, fit) = corrected_annual(temp, &inputs.co2)?;
        cointegration.push(CointegrationRow {
            pair: resid.label.clone(),
            fit,
        });
        originals.push(aligned);
        corrected.push(resid);
    }

    let mut time_domain = Vec::new();
    for (variant, set) in [("original", &originals), ("corrected", &corrected)] {
        for temp in set {
            let report = granger_time(&sun, temp, cfg.granger_max_lag)?;
            time_domain.push(TimeDomainRow {
                effect: temp.label.clone(),
                variant: variant.into(),
                report,
            });
        }
    }

    let mut stationarity = Vec::new();
    let mut diagnostics: Vec<&TimeSeries> = vec![&sun];
    diagnostics.extend(originals.iter());
    diagnostics.push(&co2);
    for ts in diagnostics {
        let max_lag = (4.0 * (ts.len() as f64 / 100.0).powf(0.25)).floor() as usize;
        stationarity.push(StationarityRow {
            series: ts.label.clone(),
            adf: adf_test(ts, max_lag)?,
            kpss: kpss_test(ts)?,
        });
    }

    let bands = cfg.bands();
    let mut frequency = Vec::new();
    for (stage, (variant, set)) in [("original", &originals), ("corrected", &corrected)]
        .into_iter()
        .enumerate()
    {
        let effects: Vec<&TimeSeries> = set.iter().collect();
        let seed = stage_seed(cfg.seed, 11 + stage as u64);
        let results =
            granger_frequency(&sun, &effects, cfg.spectral_lag, &bands, cfg.bootstrap, seed)?;
        for band in results {
            let period_high = 2.0 * std::f64::consts::PI / band.omega_low;
            let period_low = 2.0 * std::f64::consts::PI / band.omega_high;
            frequency.push(FrequencyRow {
                variant: variant.into(),
                period_low_years: period_low,
                period_high_years: period_high,
                band,
            });
        }
    }

    Ok(GrangerReport {
        config: cfg.digest(),
        time_domain,
        stationarity,
        cointegration,
        frequency,
    })
}

/// Format the report as a fixed-width text table.
pub fn granger_table(report: &GrangerReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config {}", report.config);

    let _ = writeln!(out, "\n== time-domain causality (cause: sunspot record) ==");
    let _ = writeln!(
        out,
        "{:<24} {:<10} {:>4} {:>9} {:>9}  decision",
        "effect", "variant", "lags", "F", "p-value"
    );
    for row in &report.time_domain {
        let _ = writeln!(
            out,
            "{:<24} {:<10} {:>4} {:>9.4} {:>9.4}  {}",
            row.effect,
            row.variant,
            row.report.lags,
            row.report.statistic,
            row.report.p_value.unwrap_or(f64::NAN),
            row.report.decision
        );
    }

    let _ = writeln!(out, "\n== stationarity ==");
    let _ = writeln!(
        out,
        "{:<24} {:>10} {:>8} {:>10} {:>8}",
        "series", "adf", "", "kpss", ""
    );
    for row in &report.stationarity {
        let _ = writeln!(
            out,
            "{:<24} {:>10.4} {:>8} {:>10.4} {:>8}",
            row.series,
            row.adf.statistic,
            row.adf.decision.to_string().replace(' ', "-"),
            row.kpss.statistic,
            row.kpss.decision.to_string().replace(' ', "-"),
        );
    }

    let _ = writeln!(out, "\n== cointegration against emissions ==");
    let _ = writeln!(
        out,
        "{:<34} {:>13} {:>13} {:>9}  decision",
        "pair", "slope", "intercept", "resid-adf"
    );
    for row in &report.cointegration {
        let _ = writeln!(
            out,
            "{:<34} {:>13.6e} {:>13.4} {:>9.4}  {}",
            row.pair, row.fit.slope, row.fit.intercept, row.fit.adf.statistic, row.fit.decision
        );
    }

    let _ = writeln!(out, "\n== frequency-band causality (joint over the three temperatures) ==");
    let _ = writeln!(
        out,
        "{:<22} {:<10} {:>10} {:>10}  decision",
        "band (years)", "variant", "statistic", "cv(90%)"
    );
    for row in &report.frequency {
        let band = format!("{:.1} .. {:.1}", row.period_low_years, row.period_high_years);
        let _ = writeln!(
            out,
            "{:<22} {:<10} {:>10.4} {:>10.4}  {}",
            band, row.variant, row.band.statistic, row.band.critical_value_90, row.band.decision
        );
    }
    out
}

/// Run the causality study and write the text and JSON tables.
pub fn cmd_granger(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let report = granger_report(cfg)?;
    let dir = Path::new(&cfg.outdir).join("granger");
    ensure_dir(&dir)?;
    let txt_path = dir.join("tests.txt");
    write_text(&txt_path, &granger_table(&report))?;
    let json_path = dir.join("tests.json");
    let json = serde_json::to_string_pretty(&report)
        .expect("report serialization cannot fail");
    write_text(&json_path, &json)?;
    Ok(vec![txt_path, json_path])
}

/// The full study: ingest, power, coherence (uncorrected and corrected),
/// causality tables, plus the resolved configuration and a manifest.
pub fn cmd_reproduce(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let out_root = Path::new(&cfg.outdir);
    ensure_dir(out_root)?;

    let mut paths = Vec::new();
    paths.extend(cmd_ingest(cfg)?);
    paths.extend(cmd_power(cfg)?);
    let mut uncorrected = cfg.clone();
    uncorrected.corrected = false;
    paths.extend(cmd_coherence(&uncorrected)?);
    let mut corrected = cfg.clone();
    corrected.corrected = true;
    paths.extend(cmd_coherence(&corrected)?);
    paths.extend(cmd_granger(cfg)?);

    let cfg_path = out_root.join("config.txt");
    write_text(&cfg_path, &cfg.to_text())?;
    paths.push(cfg_path);

    let mut manifest = format!("# config {}\n", cfg.digest());
    for p in &paths {
        let shown = p.strip_prefix(out_root).unwrap_or(p);
        let _ = writeln!(manifest, "{}", shown.display());
    }
    let manifest_path = out_root.join("manifest.txt");
    write_text(&manifest_path, &manifest)?;
    paths.push(manifest_path);
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_its_text_form() {
        let mut cfg = RunConfig::default();
        cfg.surrogates = 150;
        cfg.level = 0.1;
        cfg.corrected = true;
        cfg.sunspots = "elsewhere/sun.csv".into();
        cfg.sunspots_format = SeriesFormat::GenericCsv;
        cfg.dj = 0.125;
        let text = cfg.to_text();
        let back = RunConfig::from_text(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn digest_tracks_every_field_except_outdir() {
        let base = RunConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(base.digest());
        let text = base.to_text();
        // flip each line's value and expect a new digest
        for line in text.lines() {
            let (key, value) = line.split_once('=').unwrap();
            let (key, value) = (key.trim(), value.trim());
            let new_value = match key {
                k if k.ends_with("_format") => "generic".to_string(),
                "corrected" => "true".to_string(),
                _ if value.parse::<f64>().is_ok() => {
                    format!("{}", value.parse::<f64>().unwrap() + 1.0)
                }
                _ => format!("{value}.changed"),
            };
            let mut cfg = base.clone();
            cfg.set(key, &new_value).unwrap();
            if key == "outdir" {
                // placement does not change what is computed
                assert_eq!(cfg.digest(), base.digest());
            } else {
                assert!(seen.insert(cfg.digest()), "digest collision after changing {key}");
            }
        }
    }

    #[test]
    fn unknown_and_malformed_keys_are_rejected() {
        assert!(RunConfig::from_text("no_such_key = 3\n").is_err());
        assert!(RunConfig::from_text("surrogates = many\n").is_err());
        assert!(RunConfig::from_text("just a line\n").is_err());
        // comments and blanks are fine
        let cfg = RunConfig::from_text("# comment\n\nseed = 99\n").unwrap();
        assert_eq!(cfg.seed, 99);
    }

    #[test]
    fn bands_cover_long_and_short_periods() {
        let cfg = RunConfig::default();
        let [(lo1, hi1), (lo2, hi2)] = cfg.bands();
        assert!(lo1 < hi1 && hi1 == lo2 && lo2 < hi2);
        assert!((2.0 * std::f64::consts::PI / hi1 - 16.0).abs() < 1e-12);
        assert!((hi2 - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn stage_seeds_differ_between_stages() {
        let s: Vec<u64> = (0..16).map(|i| stage_seed(1880, i)).collect();
        let unique: std::collections::BTreeSet<_> = s.iter().collect();
        assert_eq!(unique.len(), s.len());
    }
}
