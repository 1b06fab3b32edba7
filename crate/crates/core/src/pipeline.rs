//! Rolling "chop and search for loop" driver and the parameter sweeps.
//!
//! For every evaluation index `i` the SWE points `[max(0, i - M), i]` form a
//! window. Its H1 diagram norm is the cyclicity score; windows scoring at or
//! above the threshold go through landmark selection, hard Voronoi labelling
//! and [`estimate_period`]. Windows are independent and are evaluated through
//! [`crate::par::map`], so serial and parallel runs give identical output.

use serde::{Deserialize, Serialize};

use crate::embedding::{swe, PointCloud};
use crate::error::{Error, Result};
use crate::landmarks::{assign_symbols, select_landmarks, Assignment, LandmarkMethod};
use crate::par::{self, Execution};
use crate::period::{estimate_period, PeriodEstimate};
use crate::persistence::{
    diagram_norm, dominant_intervals, persistence_from_distances, Cap, DistanceMatrix, NormKind,
};
use crate::series::{generate, GeneratorSpec, TimeSeries};

/// Minimum cyclicity score for running the period search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    /// Fraction of the window's diameter.
    Relative(f64),
    Absolute(f64),
}

impl Threshold {
    fn value(self, diameter: f64) -> f64 {
        match self {
            Threshold::Relative(f) => f * diameter,
            Threshold::Absolute(t) => t,
        }
    }

    fn raw(self) -> f64 {
        match self {
            Threshold::Relative(f) | Threshold::Absolute(f) => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub n: usize,
    pub d: usize,
    /// Window length M in SWE points (the window holds up to M + 1 points).
    pub window: usize,
    pub stride: usize,
    pub k: usize,
    pub landmark_method: LandmarkMethod,
    pub seed: u64,
    pub norm: NormKind,
    pub threshold: Threshold,
    pub cap: Cap,
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n: 2,
            d: 5,
            window: 130,
            stride: 5,
            k: 4,
            landmark_method: LandmarkMethod::MaxMin,
            seed: 0,
            norm: NormKind::L2,
            threshold: Threshold::Relative(0.05),
            cap: Cap::Auto,
            execution: Execution::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be >= 1"));
        }
        if self.d == 0 {
            return Err(Error::param("d", "must be >= 1"));
        }
        if self.window < self.n * self.d + 2 {
            return Err(Error::param(
                "window",
                format!(
                    "must be >= n*d + 2 = {}, got {}",
                    self.n * self.d + 2,
                    self.window
                ),
            ));
        }
        if self.stride == 0 {
            return Err(Error::param("stride", "must be >= 1"));
        }
        if self.k == 0 {
            return Err(Error::param("k", "must be >= 1"));
        }
        let t = self.threshold.raw();
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::param("threshold", format!("must be >= 0, got {t}")));
        }
        if let Cap::Value(c) = self.cap {
            if c.is_nan() || c <= 0.0 {
                return Err(Error::param("cap", format!("must be > 0, got {c}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodPoint {
    /// Time index (sample index) of the window's last point.
    pub index: usize,
    pub score: f64,
    pub estimate: PeriodEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSeries {
    /// Periods are in samples (observation steps).
    pub units: String,
    pub points: Vec<PeriodPoint>,
}

impl PeriodSeries {
    /// `index,score,period_mean,period_std`, empty period fields for NONE.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,score,period_mean,period_std\n");
        for p in &self.points {
            match p.estimate.mean_period {
                Some(m) => out.push_str(&format!(
                    "{},{},{},{}\n",
                    p.index, p.score, m, p.estimate.std_period
                )),
                None => out.push_str(&format!("{},{},,\n", p.index, p.score)),
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `(index, mean period)` for windows that produced an estimate.
    pub fn estimates(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.points
            .iter()
            .filter_map(|p| p.estimate.mean_period.map(|m| (p.index, m)))
    }

    /// Median of the estimates at indices `>= from`.
    pub fn stabilized(&self, from: usize) -> Option<f64> {
        let mut v: Vec<f64> = self
            .estimates()
            .filter(|(i, _)| *i >= from)
            .map(|(_, m)| m)
            .collect();
        median(&mut v)
    }
}

pub(crate) fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// H1 norm of the window's Rips diagram; 0 for a window of identical points.
pub fn cyclicity_score(window: &PointCloud, kind: NormKind, cap: Cap) -> Result<f64> {
    if window.len() < 3 {
        return Err(Error::param(
            "window",
            format!("needs at least 3 points, got {}", window.len()),
        ));
    }
    let dist = DistanceMatrix::from_cloud(window);
    score_from_distances(&dist, kind, cap)
}

fn score_from_distances(dist: &DistanceMatrix, kind: NormKind, cap: Cap) -> Result<f64> {
    if dist.diameter() == 0.0 {
        return Ok(0.0);
    }
    let diag = persistence_from_distances(dist, cap)?;
    Ok(diagram_norm(&diag, 1, kind))
}

fn evaluate_window(window: &PointCloud, cfg: &PipelineConfig) -> Result<PeriodPoint> {
    let index = *window.time_indices().last().expect("non-empty window");
    let dist = DistanceMatrix::from_cloud(window);
    let score = score_from_distances(&dist, cfg.norm, cfg.cap)?;
    let theta = cfg.threshold.value(dist.diameter());
    let estimate = if score > 0.0 && score >= theta {
        let k = cfg.k.min(window.len());
        let lm = select_landmarks(window, k, cfg.landmark_method, cfg.seed)?;
        let sym = assign_symbols(window, &lm, Assignment::Hard, 0.0)?;
        estimate_period(&sym)
    } else {
        PeriodEstimate::none()
    };
    Ok(PeriodPoint {
        index,
        score,
        estimate,
    })
}

/// Rolling period estimation over `ts`.
pub fn chop_and_search(ts: &TimeSeries, cfg: &PipelineConfig) -> Result<PeriodSeries> {
    cfg.validate()?;
    if ts.len() <= cfg.n * cfg.d + 2 {
        return Err(Error::SeriesTooShort {
            needed: cfg.n * cfg.d + 3,
            got: ts.len(),
        });
    }
    let cloud = swe(ts, cfg.n, cfg.d)?;
    let ends: Vec<usize> = (2..cloud.len()).step_by(cfg.stride).collect();
    let points = par::map(cfg.execution, &ends, |&i| {
        let window = cloud.window(i.saturating_sub(cfg.window), i);
        evaluate_window(&window, cfg)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(PeriodSeries {
        units: "samples".into(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    /// Embedding dimension n + 1.
    pub dim: usize,
    /// Three longest H1 lengths, or why the dimension could not be run.
    pub lengths: std::result::Result<Vec<f64>, String>,
}

/// Top-3 H1 interval lengths of the whole-series embedding for each
/// embedding dimension (`n = dim - 1`).
pub fn dimension_sweep(
    ts: &TimeSeries,
    dims: &[usize],
    d: usize,
    cap: Cap,
    exec: Execution,
) -> Vec<DimensionRow> {
    par::map(exec, dims, |&dim| {
        let lengths = if dim < 2 {
            Err(format!("dimension must be >= 2, got {dim}"))
        } else {
            swe(ts, dim - 1, d)
                .and_then(|cloud| {
                    let dist = DistanceMatrix::from_cloud(&cloud);
                    persistence_from_distances(&dist, cap)
                })
                .map(|diag| dominant_intervals(&diag, 3))
                .map_err(|e| e.to_string())
        };
        DimensionRow { dim, lengths }
    })
}

/// Table with one column per dimension and rows `1st`, `2nd`, `3rd`.
/// Failed dimensions leave empty cells.
pub fn dimension_table_csv(rows: &[DimensionRow]) -> String {
    let mut out = String::from("dim");
    for r in rows {
        out.push_str(&format!(",{}", r.dim));
    }
    out.push('\n');
    for (rank, name) in ["1st", "2nd", "3rd"].iter().enumerate() {
        out.push_str(name);
        for r in rows {
            match &r.lengths {
                Ok(l) => out.push_str(&format!(",{}", l[rank])),
                Err(_) => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepConfig {
    pub n: usize,
    pub d: usize,
    pub cap: Cap,
}

impl Default for NoiseSweepConfig {
    fn default() -> Self {
        NoiseSweepConfig {
            n: 2,
            d: 5,
            cap: Cap::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseLevelSummary {
    pub level: f64,
    pub mean_l1: f64,
    pub mean_l2: f64,
    /// Mean of the descending H1 length profiles (zero-padded).
    pub profile: Vec<f64>,
}

/// Average H1 norms and length profiles over `reps` noisy copies of `base`
/// per noise level. Repetition `r` uses seed `base.seed + r`.
pub fn noise_sweep(
    base: &GeneratorSpec,
    levels: &[f64],
    reps: usize,
    cfg: NoiseSweepConfig,
    exec: Execution,
) -> Result<Vec<NoiseLevelSummary>> {
    if reps == 0 {
        return Err(Error::param("reps", "must be >= 1"));
    }
    base.validate()?;
    let jobs: Vec<(usize, u64)> = (0..levels.len())
        .flat_map(|l| (0..reps as u64).map(move |r| (l, r)))
        .collect();
    let runs = par::map(exec, &jobs, |&(l, r)| -> Result<Vec<f64>> {
        let spec = base
            .clone()
            .with_noise(levels[l], base.seed.wrapping_add(r));
        let ts = generate(&spec)?;
        let cloud = swe(&ts, cfg.n, cfg.d)?;
        let dist = DistanceMatrix::from_cloud(&cloud);
        let diag = persistence_from_distances(&dist, cfg.cap)?;
        let mut lengths: Vec<f64> = diag
            .h1
            .iter()
            .filter(|iv| iv.is_finite())
            .map(|iv| iv.length())
            .collect();
        lengths.sort_by(|a, b| b.total_cmp(a));
        Ok(lengths)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(levels
        .iter()
        .enumerate()
        .map(|(l, &level)| {
            let group = &runs[l * reps..(l + 1) * reps];
            let width = group.iter().map(Vec::len).max().unwrap_or(0);
            let mut profile = vec![0.0; width];
            let (mut l1, mut l2) = (0.0, 0.0);
            for lengths in group {
                l1 += lengths.iter().sum::<f64>();
                l2 += lengths.iter().map(|x| x * x).sum::<f64>().sqrt();
                for (acc, x) in profile.iter_mut().zip(lengths) {
                    *acc += x;
                }
            }
            let r = reps as f64;
            profile.iter_mut().for_each(|x| *x /= r);
            NoiseLevelSummary {
                level,
                mean_l1: l1 / r,
                mean_l2: l2 / r,
                profile,
            }
        })
        .collect())
}
