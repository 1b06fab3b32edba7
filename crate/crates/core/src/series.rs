//! Time series container, CSV ingestion and synthetic generators.
//!
//! Randomness comes exclusively from [`ChaCha8Rng`] seeded through
//! `seed_from_u64`, which is stable across platforms and releases of
//! `rand_chacha`, so generated series (and everything downstream of them)
//! are reproducible bit-for-bit.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled univariate series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    step: f64,
    label: String,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, step: f64, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param(
                "values",
                "series must contain at least one sample",
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(
                "values",
                format!("sample {pos} is not finite ({})", values[pos]),
            ));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("step", format!("must be > 0, got {step}")));
        }
        Ok(TimeSeries {
            values,
            step,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Samples `[start, end)` as a new series with the same step.
    pub fn slice(&self, start: usize, end: usize) -> Result<TimeSeries> {
        if start >= end || end > self.len() {
            return Err(Error::param(
                "range",
                format!(
                    "{start}..{end} is not a non-empty range within 0..{}",
                    self.len()
                ),
            ));
        }
        TimeSeries::new(
            self.values[start..end].to_vec(),
            self.step,
            self.label.clone(),
        )
    }

    /// `index,value` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }
}

/// Which CSV column holds the samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Column::Index(i) => write!(f, "{i}"),
            Column::Name(n) => f.write_str(n),
        }
    }
}

/// Read one column of a CSV file. A non-numeric first row is taken as the
/// header; any later non-numeric cell is an error naming its 1-based line.
/// The step is set to 1.0 (one observation).
pub fn load_csv(path: impl AsRef<Path>, column: &Column) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, column, label)
}

/// Same as [`load_csv`] for any reader.
pub fn read_csv(reader: impl std::io::Read, column: &Column, label: String) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut col_idx = match column {
        Column::Index(i) => Some(*i),
        Column::Name(_) => None,
    };
    let mut values = Vec::new();
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let row = record
            .position()
            .map_or(values.len() + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if let Column::Name(name) = column {
                let idx = record
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::MissingColumn(name.clone()))?;
                col_idx = Some(idx);
                continue;
            }
            let idx = col_idx.expect("index column");
            if let Some(cell) = record.get(idx) {
                if cell.parse::<f64>().is_err() {
                    // header row
                    continue;
                }
            }
        }
        let idx = col_idx.expect("column resolved");
        let cell = record.get(idx).ok_or_else(|| Error::Csv {
            row,
            message: format!("no column {column}"),
        })?;
        let v: f64 = cell.parse().map_err(|_| Error::Csv {
            row,
            message: format!("cannot parse `{cell}` as a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Csv {
                row,
                message: format!("non-finite value `{cell}`"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyColumn(column.to_string()));
    }
    TimeSeries::new(values, 1.0, label)
}

/// Shape of a synthetic series. All functions are evaluated on
/// `x_i = i * step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `amplitude * sin(frequency * x)`
    Sine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
    },
    /// `sin(fast * x) + sin(slow * x)`
    CompositeSine {
        #[serde(default = "two")]
        fast: f64,
        #[serde(default = "half")]
        slow: f64,
    },
    /// `sin(frequency * x) + slope * x`
    SineWithTrend {
        #[serde(default = "two")]
        frequency: f64,
        #[serde(default = "half")]
        slope: f64,
    },
    /// Consecutive sine segments with phase-continuous junctions.
    /// `boundaries[s]` is the first sample of segment `s + 1`.
    PiecewisePeriod {
        #[serde(default = "default_piece_frequencies")]
        frequencies: Vec<f64>,
        #[serde(default = "default_piece_boundaries")]
        boundaries: Vec<usize>,
    },
    /// Half-waves of |sin| with signs P N P P N P P P N ...
    FlippedSine,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn half() -> f64 {
    0.5
}
fn default_piece_frequencies() -> Vec<f64> {
    vec![1.0, 3.0, 0.5]
}
fn default_piece_boundaries() -> Vec<usize> {
    vec![250, 625]
}

impl Family {
    /// Family with default parameters from its kebab-case name.
    pub fn from_name(name: &str) -> Result<Family> {
        Ok(match name {
            "sine" => Family::Sine {
                amplitude: 1.0,
                frequency: 1.0,
            },
            "composite-sine" => Family::CompositeSine {
                fast: 2.0,
                slow: 0.5,
            },
            "sine-with-trend" => Family::SineWithTrend {
                frequency: 2.0,
                slope: 0.5,
            },
            "piecewise-period" => Family::PiecewisePeriod {
                frequencies: default_piece_frequencies(),
                boundaries: default_piece_boundaries(),
            },
            "flipped-sine" => Family::FlippedSine,
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Sine { .. } => "sine",
            Family::CompositeSine { .. } => "composite-sine",
            Family::SineWithTrend { .. } => "sine-with-trend",
            Family::PiecewisePeriod { .. } => "piecewise-period",
            Family::FlippedSine => "flipped-sine",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    /// Length of the sampled domain `[0, domain_length]`.
    pub domain_length: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    /// Upper bound of the one-sided uniform noise `[0, noise_level]`.
    #[serde(default)]
    pub noise_level: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_step() -> f64 {
    0.1
}

impl GeneratorSpec {
    pub fn new(family: Family, domain_length: f64) -> Self {
        GeneratorSpec {
            family,
            domain_length,
            step: 0.1,
            noise_level: 0.0,
            seed: 0,
        }
    }

    pub fn with_noise(mut self, level: f64, seed: u64) -> Self {
        self.noise_level = level;
        self.seed = seed;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Number of grid points in `[0, domain_length]`.
    pub fn sample_count(&self) -> usize {
        (self.domain_length / self.step + 1e-9).floor() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param(
                "step",
                format!("must be > 0, got {}", self.step),
            ));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return Err(Error::param(
                "noise_level",
                format!("must be >= 0, got {}", self.noise_level),
            ));
        }
        if !(self.domain_length >= self.step && self.domain_length.is_finite()) {
            return Err(Error::param(
                "domain_length",
                format!(
                    "must be >= step ({}), got {}",
                    self.step, self.domain_length
                ),
            ));
        }
        if let Family::PiecewisePeriod {
            frequencies,
            boundaries,
        } = &self.family
        {
            if frequencies.len() != boundaries.len() + 1 {
                return Err(Error::param(
                    "boundaries",
                    format!(
                        "{} frequencies need {} boundaries, got {}",
                        frequencies.len(),
                        frequencies.len().saturating_sub(1),
                        boundaries.len()
                    ),
                ));
            }
            if boundaries.windows(2).any(|w| w[0] >= w[1]) || boundaries.first() == Some(&0) {
                return Err(Error::param(
                    "boundaries",
                    "must be positive and strictly increasing",
                ));
            }
        }
        Ok(())
    }
}

/// Evaluate the spec on its grid and add its noise.
pub fn generate(spec: &GeneratorSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let count = spec.sample_count();
    let h = spec.step;
    let xs = (0..count).map(|i| i as f64 * h);
    let clean: Vec<f64> = match &spec.family {
        Family::Sine {
            amplitude,
            frequency,
        } => xs.map(|x| amplitude * (frequency * x).sin()).collect(),
        Family::CompositeSine { fast, slow } => {
            xs.map(|x| (fast * x).sin() + (slow * x).sin()).collect()
        }
        Family::SineWithTrend { frequency, slope } => {
            xs.map(|x| (frequency * x).sin() + slope * x).collect()
        }
        Family::PiecewisePeriod {
            frequencies,
            boundaries,
        } => piecewise(count, h, frequencies, boundaries),
        Family::FlippedSine => xs.map(flipped_sine).collect(),
    };
    let ts = TimeSeries::new(clean, h, spec.family.name())?;
    add_noise(&ts, spec.noise_level, spec.seed)
}

fn piecewise(count: usize, h: f64, frequencies: &[f64], boundaries: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    let mut seg_start = 0usize;
    let mut phase0 = 0.0f64;
    for i in 0..count {
        while seg < boundaries.len() && i >= boundaries[seg] {
            // carry the phase the old segment would reach at the junction
            phase0 += frequencies[seg] * (boundaries[seg] - seg_start) as f64 * h;
            seg_start = boundaries[seg];
            seg += 1;
        }
        let phase = phase0 + frequencies[seg] * (i - seg_start) as f64 * h;
        out.push(phase.sin());
    }
    out
}

/// Sign of half-wave `h` in the pattern P N PP N PPP N ...
fn half_wave_sign(h: usize) -> f64 {
    // group g occupies g positive half-waves followed by one negative
    let mut start = 0usize;
    let mut g = 1usize;
    loop {
        let end = start + g + 1;
        if h < end {
            return if h == end - 1 { -1.0 } else { 1.0 };
        }
        start = end;
        g += 1;
    }
}

fn flipped_sine(x: f64) -> f64 {
    let h = (x / PI).floor().max(0.0) as usize;
    half_wave_sign(h) * x.sin().abs()
}

/// `out[i] = ts[i] + u_i` with `u_i ~ Uniform[0, level)`.
pub fn add_noise(ts: &TimeSeries, level: f64, seed: u64) -> Result<TimeSeries> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::param("level", format!("must be >= 0, got {level}")));
    }
    if level == 0.0 {
        return Ok(ts.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = ts
        .values
        .iter()
        .map(|v| v + level * rng.random::<f64>())
        .collect();
    TimeSeries::new(values, ts.step, ts.label.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(domain: f64) -> GeneratorSpec {
        GeneratorSpec::new(Family::from_name("sine").unwrap(), domain)
    }

    #[test]
    fn sine_closed_form() {
        let ts = generate(&sine(6.2)).unwrap();
        assert_eq!(ts.len(), 63);
        assert_eq!(ts.values()[0], 0.0);
        assert!((ts.values()[16] - 0.9996).abs() < 1e-4);
        for (i, v) in ts.values().iter().enumerate() {
            assert!((v - (i as f64 * 0.1).sin()).abs() <= 1e-12);
        }
    }

    #[test]
    fn noise_is_one_sided_and_bounded() {
        let clean = generate(&sine(100.0)).unwrap();
        let noisy = generate(&sine(100.0).with_noise(0.5, 7)).unwrap();
        for (c, n) in clean.values().iter().zip(noisy.values()) {
            assert!(*n >= *c && *n <= c + 0.5);
        }
    }

    #[test]
    fn add_noise_contract() {
        let ts = generate(&sine(40.0)).unwrap();
        assert_eq!(add_noise(&ts, 0.0, 3).unwrap(), ts);
        let a = add_noise(&ts, 4.0, 11).unwrap();
        let b = add_noise(&ts, 4.0, 11).unwrap();
        assert_eq!(a, b);
        let diffs: Vec<f64> = a
            .values()
            .iter()
            .zip(ts.values())
            .map(|(o, i)| o - i)
            .collect();
        assert!(diffs.iter().all(|&d| (0.0..=4.0).contains(&d)));
        assert!(matches!(
            add_noise(&ts, -1.0, 0),
            Err(Error::InvalidParameter { .. })
        ));
        assert_ne!(add_noise(&ts, 4.0, 12).unwrap(), a);
    }

    #[test]
    fn piecewise_segments_have_expected_periods() {
        let spec = GeneratorSpec::new(Family::from_name("piecewise-period").unwrap(), 99.9);
        let ts = generate(&spec).unwrap();
        assert_eq!(ts.len(), 1000);
        let v = ts.values();
        // junctions are continuous
        for b in [250usize, 625] {
            assert!((v[b] - v[b - 1]).abs() < 0.31, "jump at {b}");
        }
        // closed-form periods in samples: 2*pi/(w*h)
        let periods: Vec<f64> = [1.0, 3.0, 0.5]
            .iter()
            .map(|w| 2.0 * PI / (w * 0.1))
            .collect();
        assert_eq!(
            periods.iter().map(|p| p.round() as i64).collect::<Vec<_>>(),
            vec![63, 21, 126]
        );
        // inside each segment the signal repeats after one period
        assert!((v[100] - (10.0f64).sin()).abs() < 1e-12);
        let p2 = 2.0 * PI / 0.3;
        let a = 300.0;
        let phase_a: f64 = 25.0 + 3.0 * (a - 250.0) * 0.1;
        assert!((v[300] - phase_a.sin()).abs() < 1e-12);
        assert!(p2 > 20.0 && p2 < 21.0);
    }

    #[test]
    fn flipped_sine_pattern() {
        let signs: Vec<f64> = (0..10).map(half_wave_sign).collect();
        assert_eq!(
            signs,
            vec![1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0]
        );
        let spec = GeneratorSpec::new(Family::FlippedSine, 20.0);
        let ts = generate(&spec).unwrap();
        // second half-wave (x in (pi, 2pi)) is negative, third and fourth positive
        assert!(ts.values()[47] < 0.0);
        assert!(ts.values()[78] > 0.0);
        assert!(ts.values()[110] > 0.0);
        assert!(ts.values()[141] < 0.0);
    }

    #[test]
    fn unknown_family_and_invalid_spec() {
        assert!(matches!(
            Family::from_name("cosine"),
            Err(Error::UnknownFamily(_))
        ));
        let mut spec = sine(10.0);
        spec.step = 0.0;
        assert!(generate(&spec).is_err());
        let mut spec = sine(10.0);
        spec.noise_level = -0.1;
        assert!(generate(&spec).is_err());
        assert!(generate(&sine(0.05)).is_err());
    }

    #[test]
    fn generator_spec_json_roundtrip() {
        let spec = GeneratorSpec::new(Family::from_name("composite-sine").unwrap(), 100.0)
            .with_noise(1.0, 3);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"family\":\"composite-sine\""));
        let back: GeneratorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let minimal: GeneratorSpec =
            serde_json::from_str(r#"{"family":"sine","domain_length":10}"#).unwrap();
        assert_eq!(minimal.step, 0.1);
        assert_eq!(minimal.family, Family::from_name("sine").unwrap());
    }

    #[test]
    fn csv_read_back() {
        let ts = read_csv("1.0\n2.0\n3.0".as_bytes(), &Column::Index(0), "x".into()).unwrap();
        assert_eq!(ts.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(ts.step(), 1.0);
    }

    #[test]
    fn csv_header_and_named_column() {
        let data = "date,temp\n1981-01-01,20.7\n1981-01-02,17.9\n";
        let ts = read_csv(data.as_bytes(), &Column::Name("temp".into()), "m".into()).unwrap();
        assert_eq!(ts.values(), &[20.7, 17.9]);
        let ts = read_csv(data.as_bytes(), &Column::Index(1), "m".into()).unwrap();
        assert_eq!(ts.values(), &[20.7, 17.9]);
        assert!(matches!(
            read_csv(data.as_bytes(), &Column::Name("rain".into()), "m".into()),
            Err(Error::MissingColumn(_))
        ));
    }

    #[test]
    fn csv_bad_cell_names_row() {
        let data = "1\n2\n3\n4\nabc\n6\n";
        match read_csv(data.as_bytes(), &Column::Index(0), "x".into()) {
            Err(Error::Csv { row, .. }) => assert_eq!(row, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_empty_and_missing_file() {
        assert!(matches!(
            read_csv("value\n".as_bytes(), &Column::Index(0), "x".into()),
            Err(Error::EmptyColumn(_))
        ));
        assert!(matches!(
            load_csv("/definitely/not/here.csv", &Column::Index(0)),
            Err(Error::Io { .. })
        ));
    }
}
