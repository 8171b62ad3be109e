//! Continuous wavelet coherence and causality analysis for paired
//! climate/solar time series.
//!
//! The crate is organised as a small set of layered modules:
//!
//! * [`series`] — ingestion of monthly/annual records (several archive
//!   layouts), annual aggregation and time alignment.
//! * [`cwt`] — Morlet continuous wavelet transform on a dyadic scale grid,
//!   wavelet power and the cone of influence.
//! * [`coherence`] — cross-wavelet spectrum, scale-adaptive smoothing,
//!   squared coherence and relative phase.
//! * [`significance`] — red-noise (AR(1)) Monte Carlo significance masks for
//!   power and coherence.
//! * [`econ`] — unit-root and cointegration tests, time-domain and
//!   frequency-band Granger causality.
//! * [`pipeline`] — file-level runs: configuration, grid-file output,
//!   heatmap rendering and the end-to-end study driver used by the CLI.
//! * [`sampledata`] — deterministic synthetic stand-ins for the archive
//!   series, used by the examples and the test suite.

pub mod coherence;
pub mod cwt;
pub mod econ;
pub mod error;
pub mod pipeline;
pub mod sampledata;
pub mod series;
pub mod significance;

pub use coherence::{smooth, wavelet_coherence, xwt, CoherenceField, SmoothingSpec};
pub use cwt::{cwt, make_scale_grid, power, MorletParams, ScaleGrid, TimeAxis, WaveletField};
pub use econ::{
    adf_test, engle_granger, granger_frequency, granger_time, kpss_test, CointegrationFit,
    Decision, FreqGrangerBand, TestReport,
};
pub use error::{Error, Result};
pub use series::{
    align, annual_mean, parse_series, parse_series_opts, parse_series_str, to_csv_string,
    write_csv, GapFill, SeriesFormat, Step, TimeSeries,
};
pub use significance::{
    fit_ar1, significance_coherence, significance_power, surrogate, Ar1Model, SignificanceMask,
};
