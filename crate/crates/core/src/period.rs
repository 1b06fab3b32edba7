//! Period estimation from landmark return times.
//!
//! For every landmark the sorted return times are differenced into jumps.
//! Dwelling inside a Voronoi cell produces short jumps, leaving it and coming
//! back produces a long one. The long ("dominant") jumps are separated from
//! the rest at the largest multiplicative gap of the sorted jump values. The
//! times at which dominant jumps land are re-entries into the cell; their
//! spacing is one full cycle (excursion plus dwell). A landmark contributes
//! the mean re-entry spacing if the spacings are roughly equal, and the
//! estimate is the mean and standard deviation over contributing landmarks.

use serde::{Deserialize, Serialize};

use crate::landmarks::SymbolicSequence;

/// Minimum ratio at the cut between dominant and ordinary jumps.
pub const DOMINANT_GAP_RATIO: f64 = 2.0;
/// Maximum max/min ratio of re-entry spacings for a landmark to count.
pub const EQUAL_SPREAD_TOLERANCE: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PeriodEstimate {
    /// `None` when no landmark produced a proxy.
    pub mean_period: Option<f64>,
    pub std_period: f64,
    pub per_landmark: Vec<f64>,
}

impl PeriodEstimate {
    pub fn none() -> Self {
        PeriodEstimate::default()
    }

    fn from_proxies(per_landmark: Vec<f64>) -> Self {
        if per_landmark.is_empty() {
            return PeriodEstimate::none();
        }
        let n = per_landmark.len() as f64;
        let mean = per_landmark.iter().sum::<f64>() / n;
        let std = if per_landmark.len() > 1 {
            (per_landmark.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        PeriodEstimate {
            mean_period: Some(mean),
            std_period: std,
            per_landmark,
        }
    }

    pub fn is_none(&self) -> bool {
        self.mean_period.is_none()
    }
}

/// Consecutive differences of increasing return times.
pub fn jumps(return_times: &[usize]) -> Vec<usize> {
    return_times.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Positions (in time order) of the dominant jumps.
///
/// A single jump is dominant on its own. Otherwise the sorted values are cut
/// at their largest ratio between neighbours; if that ratio does not exceed
/// [`DOMINANT_GAP_RATIO`] there is no dominant jump.
pub fn dominant_jumps(jumps: &[usize]) -> Vec<usize> {
    match jumps.len() {
        0 => return Vec::new(),
        1 => return vec![0],
        _ => {}
    }
    let mut sorted = jumps.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut best_ratio = 0.0;
    let mut cut = 0usize;
    for (m, w) in sorted.windows(2).enumerate() {
        let ratio = w[0] as f64 / w[1].max(1) as f64;
        if ratio > best_ratio {
            best_ratio = ratio;
            cut = m;
        }
    }
    if best_ratio <= DOMINANT_GAP_RATIO {
        return Vec::new();
    }
    let threshold = sorted[cut];
    jumps
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= threshold)
        .map(|(m, _)| m)
        .collect()
}

/// Period proxy of one landmark, if it has at least two roughly equally
/// spaced re-entries.
pub fn landmark_proxy(return_times: &[usize]) -> Option<f64> {
    let j = jumps(return_times);
    let dominant = dominant_jumps(&j);
    if dominant.len() < 2 {
        return None;
    }
    // jump m lands on return_times[m + 1]
    let spacings: Vec<usize> = dominant
        .windows(2)
        .map(|w| return_times[w[1] + 1] - return_times[w[0] + 1])
        .collect();
    let max = *spacings.iter().max()? as f64;
    let min = *spacings.iter().min()? as f64;
    if max > EQUAL_SPREAD_TOLERANCE * min {
        return None;
    }
    Some(spacings.iter().sum::<usize>() as f64 / spacings.len() as f64)
}

pub fn estimate_period(sym: &SymbolicSequence) -> PeriodEstimate {
    let proxies = sym
        .return_times
        .iter()
        .filter_map(|t| landmark_proxy(t))
        .collect();
    PeriodEstimate::from_proxies(proxies)
}
