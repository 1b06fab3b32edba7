//! Periodicity detection for noisy univariate time series.
//!
//! A series is embedded with a sliding window, the cyclicity of the embedded
//! cloud is measured by dimension-1 Vietoris-Rips persistence, and the period
//! is read from landmark return times. A spectral AR baseline is included for
//! comparison.

pub mod baseline;
pub mod embedding;
pub mod error;
pub mod landmarks;
pub mod par;
pub mod period;
pub mod persistence;
pub mod pipeline;
pub mod series;

pub use baseline::{find_frequency, rolling_baseline, BaselineSummary, RollingBaseline};
pub use embedding::{swe, PointCloud};
pub use error::{Error, Result};
pub use landmarks::{
    assign_symbols, select_landmarks, Assignment, LandmarkMethod, Landmarks, SymbolicSequence,
};
pub use par::Execution;
pub use period::{estimate_period, PeriodEstimate};
pub use persistence::{
    diagram_norm, dominant_intervals, rips_persistence, Cap, Interval, NormKind, PersistenceDiagram,
};
pub use pipeline::{
    chop_and_search, cyclicity_score, dimension_sweep, noise_sweep, PeriodSeries, PipelineConfig,
    Threshold,
};
pub use series::{add_noise, generate, load_csv, Column, Family, GeneratorSpec, TimeSeries};
