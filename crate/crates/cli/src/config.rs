//! Flags, the optional TOML config file, and their merge into a
//! [`RunConfig`]. Flags override file values field by field.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use swe_period::{
    Cap, Column, Execution, Family, GeneratorSpec, LandmarkMethod, NormKind, PipelineConfig,
    Threshold,
};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "swe-period",
    version,
    about = "Periodicity detection with sliding-window embeddings and persistent homology"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write a synthetic series.
    Generate,
    /// Write the sliding-window embedding of a series.
    Embed,
    /// Write the Rips persistence diagram of the whole embedding.
    Persist,
    /// Rolling period estimation.
    Period,
    /// Rolling period estimation next to the spectral baseline.
    Compare,
    /// Dominant H1 lengths across embedding dimensions.
    SweepDim,
    /// Diagram norms across noise levels.
    SweepNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Input CSV file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Column of the input CSV, by 0-based index or header name.
    #[arg(long, global = true)]
    pub column: Option<Column>,

    /// Generator family: sine, composite-sine, sine-with-trend, piecewise-period, flipped-sine.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Length of the sampled domain [0, L].
    #[arg(long, global = true)]
    pub domain: Option<f64>,
    /// Sampling step on the domain.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Upper bound of the one-sided uniform noise.
    #[arg(long, global = true)]
    pub noise: Option<f64>,
    /// Noise seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Embedding dimension is n + 1.
    #[arg(long, global = true, conflicts_with = "dim")]
    pub n: Option<usize>,
    /// Embedding dimension n + 1, as an alternative to --n.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Delay between embedded coordinates, in samples.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Window length M in embedded points.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Step between window ends, in embedded points.
    #[arg(long, global = true)]
    pub stride: Option<usize>,
    /// Number of landmarks.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// maxmin or kmeans.
    #[arg(long, global = true)]
    pub landmarks: Option<String>,
    /// Seed of k-means landmark selection.
    #[arg(long, global = true)]
    pub landmark_seed: Option<u64>,
    /// L1 or L2.
    #[arg(long, global = true)]
    pub norm: Option<String>,
    /// Cyclicity threshold as a fraction of the window diameter.
    #[arg(long, global = true, conflicts_with = "threshold_abs")]
    pub threshold: Option<f64>,
    /// Cyclicity threshold as an absolute norm value.
    #[arg(long, global = true)]
    pub threshold_abs: Option<f64>,
    /// Filtration cap: `auto` (enclosing radius) or a distance.
    #[arg(long, global = true)]
    pub cap: Option<String>,
    /// Evaluate windows on one thread.
    #[arg(long, global = true)]
    pub serial: bool,

    /// Rolling window of the spectral baseline.
    #[arg(long, global = true)]
    pub baseline_window: Option<usize>,

    /// Embedding dimensions for sweep-dim, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Noise levels for sweep-noise, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Repetitions per noise level.
    #[arg(long, global = true)]
    pub reps: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output formats, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<FileInput>,
    generator: Option<GeneratorSpec>,
    #[serde(default)]
    pipeline: Option<PipelineConfig>,
    #[serde(default)]
    baseline: FileBaseline,
    #[serde(default)]
    sweep: FileSweep,
    #[serde(default)]
    output: FileOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileInput {
    path: PathBuf,
    #[serde(default = "default_column")]
    column: Column,
}

fn default_column() -> Column {
    Column::Index(0)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileBaseline {
    window: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSweep {
    dims: Option<Vec<usize>>,
    levels: Option<Vec<f64>>,
    reps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    dir: Option<PathBuf>,
    formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Csv { path: PathBuf, column: Column },
    Generator(GeneratorSpec),
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Input,
    pub pipeline: PipelineConfig,
    pub baseline_window: usize,
    pub dims: Vec<usize>,
    pub levels: Vec<f64>,
    pub reps: usize,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

pub const DEFAULT_DIMS: [usize; 7] = [2, 5, 10, 15, 20, 25, 30];
pub const DEFAULT_BASELINE_WINDOW: usize = 250;
pub const DEFAULT_REPS: usize = 10;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("--config `{}`: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| config_err(format!("--config `{}`: {e}", path.display())))
}

fn parse_cap(s: &str) -> Result<Cap> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Cap::Auto);
    }
    s.parse::<f64>()
        .map(Cap::Value)
        .map_err(|_| config_err(format!("--cap: expected `auto` or a number, got `{s}`")))
}

fn resolve_input(opts: &Opts, file: &FileConfig) -> Result<Input> {
    let generator_flags = opts.family.is_some()
        || opts.domain.is_some()
        || opts.step.is_some()
        || opts.noise.is_some()
        || opts.seed.is_some();
    if opts.input.is_some() && generator_flags {
        return Err(config_err(
            "--input cannot be combined with generator flags (--family, --domain, --step, --noise, --seed): exactly one input source",
        ));
    }
    if let Some(path) = &opts.input {
        let column = opts
            .column
            .clone()
            .or_else(|| file.input.as_ref().map(|i| i.column.clone()))
            .unwrap_or_else(default_column);
        return Ok(Input::Csv {
            path: path.clone(),
            column,
        });
    }
    // a generator flag replaces a CSV input from the file
    if !generator_flags {
        match (&file.input, &file.generator) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "config file sets both [input] and [generator]: exactly one input source",
                ))
            }
            (Some(i), None) => {
                let column = opts.column.clone().unwrap_or_else(|| i.column.clone());
                return Ok(Input::Csv { path: i.path.clone(), column });
            }
            (None, None) => {
                return Err(config_err(
                    "no input: pass --input <csv> or --family/--domain, or set [input] or [generator] in --config",
                ))
            }
            (None, Some(_)) => {}
        }
    }
    let mut spec = match (&file.generator, &opts.family) {
        (_, Some(name)) => {
            let family = Family::from_name(name)?;
            let domain = opts
                .domain
                .or(file.generator.as_ref().map(|g| g.domain_length))
                .ok_or_else(|| config_err("--domain is required with --family"))?;
            match &file.generator {
                Some(g) if g.family.name() == family.name() => g.clone(),
                Some(g) => GeneratorSpec {
                    family,
                    ..g.clone()
                },
                None => GeneratorSpec::new(family, domain),
            }
        }
        (Some(g), None) => g.clone(),
        (None, None) => return Err(config_err("--family is required to generate a series")),
    };
    if let Some(v) = opts.domain {
        spec.domain_length = v;
    }
    if let Some(v) = opts.step {
        spec.step = v;
    }
    if let Some(v) = opts.noise {
        spec.noise_level = v;
    }
    if let Some(v) = opts.seed {
        spec.seed = v;
    }
    spec.validate()?;
    Ok(Input::Generator(spec))
}

fn resolve_pipeline(opts: &Opts, file: &FileConfig) -> Result<PipelineConfig> {
    let mut p = file.pipeline.clone().unwrap_or_default();
    if let Some(v) = opts.n {
        p.n = v;
    }
    if let Some(dim) = opts.dim {
        if dim < 2 {
            return Err(CliError::Config(format!("--dim must be >= 2, got {dim}")));
        }
        p.n = dim - 1;
    }
    if let Some(v) = opts.d {
        p.d = v;
    }
    if let Some(v) = opts.window {
        p.window = v;
    }
    if let Some(v) = opts.stride {
        p.stride = v;
    }
    if let Some(v) = opts.k {
        p.k = v;
    }
    if let Some(v) = &opts.landmarks {
        p.landmark_method = v.parse::<LandmarkMethod>()?;
    }
    if let Some(v) = opts.landmark_seed {
        p.seed = v;
    }
    if let Some(v) = &opts.norm {
        p.norm = v.parse::<NormKind>()?;
    }
    if let Some(v) = opts.threshold {
        p.threshold = Threshold::Relative(v);
    }
    if let Some(v) = opts.threshold_abs {
        p.threshold = Threshold::Absolute(v);
    }
    if let Some(v) = &opts.cap {
        p.cap = parse_cap(v)?;
    }
    if opts.serial {
        p.execution = Execution::Serial;
    }
    p.validate()?;
    Ok(p)
}

impl RunConfig {
    pub fn resolve(command: Command, opts: &Opts) -> Result<RunConfig> {
        let file = match &opts.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let input = resolve_input(opts, &file)?;
        let pipeline = resolve_pipeline(opts, &file)?;
        let baseline_window = opts
            .baseline_window
            .or(file.baseline.window)
            .unwrap_or(DEFAULT_BASELINE_WINDOW);
        let dims = opts
            .dims
            .clone()
            .or(file.sweep.dims.clone())
            .unwrap_or_else(|| DEFAULT_DIMS.to_vec());
        let levels = opts
            .levels
            .clone()
            .or(file.sweep.levels.clone())
            .unwrap_or_else(|| (0..10).map(f64::from).collect());
        let reps = opts.reps.or(file.sweep.reps).unwrap_or(DEFAULT_REPS);
        if reps == 0 {
            return Err(config_err("--reps must be >= 1"));
        }
        if dims.is_empty() {
            return Err(config_err("--dims must list at least one dimension"));
        }
        if levels.is_empty() || levels.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
            return Err(config_err(
                "--levels must be a non-empty list of values >= 0",
            ));
        }
        if command == Command::SweepNoise && !matches!(input, Input::Generator(_)) {
            return Err(config_err(
                "sweep-noise needs a generator input (--family/--domain), not --input",
            ));
        }
        let out_dir = opts
            .out
            .clone()
            .or(file.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        let mut formats = opts
            .format
            .clone()
            .or(file.output.formats.clone())
            .unwrap_or_else(|| vec![Format::Csv]);
        formats.sort_by_key(|f| *f as u8);
        formats.dedup();
        Ok(RunConfig {
            command,
            input,
            pipeline,
            baseline_window,
            dims,
            levels,
            reps,
            out_dir,
            formats,
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}
