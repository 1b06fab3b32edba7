//! Spectral period baseline: linear detrend, Yule-Walker AR fit with AIC
//! order selection, and the period of the AR spectrum's peak.
//!
//! Periods are integers in `{1} ∪ [2, 998]`; 1 means "no period found".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::series::TimeSeries;

/// Number of frequencies on the spectral grid `0, 0.5/499, ..., 0.5`.
pub const N_FREQ: usize = 500;
pub const MAX_AR_ORDER: usize = 24;
/// The peak must exceed this multiple of the spectrum median.
pub const PEAK_TO_MEDIAN: f64 = 10.0;
pub const MIN_LENGTH: usize = 8;

/// Residuals of the least-squares fit `a + b * t`, `t = 1..=n`.
fn detrend(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let t_mean = (n + 1.0) / 2.0;
    let x_mean = x.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let dt = (i + 1) as f64 - t_mean;
        sxy += dt * (v - x_mean);
        sxx += dt * dt;
    }
    let b = sxy / sxx;
    x.iter()
        .enumerate()
        .map(|(i, &v)| v - x_mean - b * ((i + 1) as f64 - t_mean))
        .collect()
}

/// Biased autocovariances at lags `0..=max_lag` of the demeaned series.
fn autocovariance(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|lag| {
            c[..n - lag]
                .iter()
                .zip(&c[lag..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// AR coefficients and innovation variance selected by AIC.
fn yule_walker_aic(x: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len();
    let max_order = (n - 1).min(MAX_AR_ORDER);
    let r = autocovariance(x, max_order);
    // Levinson-Durbin, keeping the coefficients and variance of every order
    let mut coefs: Vec<Vec<f64>> = vec![Vec::new()];
    let mut vars = vec![r[0]];
    let mut phi: Vec<f64> = Vec::new();
    let mut v = r[0];
    for k in 1..=max_order {
        if v <= 0.0 {
            break;
        }
        let acc = r[k]
            - phi
                .iter()
                .enumerate()
                .map(|(j, p)| p * r[k - 1 - j])
                .sum::<f64>();
        let kappa = acc / v;
        let mut next: Vec<f64> = phi
            .iter()
            .enumerate()
            .map(|(j, p)| p - kappa * phi[k - 2 - j])
            .collect();
        next.push(kappa);
        v *= 1.0 - kappa * kappa;
        phi = next;
        coefs.push(phi.clone());
        vars.push(v);
    }
    let nf = n as f64;
    let mut order = 0;
    let mut best = f64::INFINITY;
    for (k, &var) in vars.iter().enumerate() {
        if var <= 0.0 {
            break;
        }
        let aic = nf * var.ln() + 2.0 * k as f64;
        if aic < best {
            best = aic;
            order = k;
        }
    }
    let var_pred = vars[order] * nf / (nf - (order as f64 + 1.0));
    (coefs.swap_remove(order), var_pred)
}

/// AR spectral density on the grid `f_k = k / (2 (N_FREQ - 1))`.
fn ar_spectrum(ar: &[f64], var_pred: f64) -> Vec<f64> {
    (0..N_FREQ)
        .map(|k| {
            let f = 0.5 * k as f64 / (N_FREQ - 1) as f64;
            let (mut re, mut im) = (1.0, 0.0);
            for (j, a) in ar.iter().enumerate() {
                let w = 2.0 * std::f64::consts::PI * f * (j + 1) as f64;
                re -= a * w.cos();
                im += a * w.sin();
            }
            var_pred / (re * re + im * im)
        })
        .collect()
}

fn grid_period(k: usize) -> u32 {
    let f = 0.5 * k as f64 / (N_FREQ - 1) as f64;
    (1.0 / f + 0.5).floor() as u32
}

fn first_argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Dominant period in samples, or 1 if the spectrum has no pronounced peak.
pub fn find_frequency(ts: &TimeSeries) -> Result<u32> {
    period_of(ts.values())
}

fn period_of(x: &[f64]) -> Result<u32> {
    if x.len() < MIN_LENGTH {
        return Err(Error::SeriesTooShort {
            needed: MIN_LENGTH,
            got: x.len(),
        });
    }
    let resid = detrend(x);
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spread = resid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if spread <= 1e-12 * scale || spread == 0.0 {
        return Ok(1);
    }
    let (ar, var_pred) = yule_walker_aic(&resid);
    let spec = ar_spectrum(&ar, var_pred);
    let mut sorted = spec.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[N_FREQ / 2 - 1] + sorted[N_FREQ / 2]);
    let peak = first_argmax(&spec);
    // a NaN spectrum also lands here
    if spec[peak].partial_cmp(&(PEAK_TO_MEDIAN * median)) != Some(std::cmp::Ordering::Greater) {
        return Ok(1);
    }
    if peak > 0 {
        return Ok(grid_period(peak));
    }
    // peak at frequency 0: fall back to the next local maximum
    let Some(rise) = (0..N_FREQ - 1).find(|&k| spec[k + 1] > spec[k]) else {
        return Ok(1);
    };
    let next = rise + 1 + first_argmax(&spec[rise + 1..]);
    Ok(if next < N_FREQ - 1 {
        grid_period(next)
    } else {
        1
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselinePoint {
    /// 0-based index of the window's last sample.
    pub index: usize,
    pub period: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub window: usize,
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: u32,
    pub max: u32,
}

impl BaselineSummary {
    pub fn from_points(window: usize, points: &[BaselinePoint]) -> Self {
        let count = points.len();
        let n = count as f64;
        let mean = points.iter().map(|p| p.period as f64).sum::<f64>() / n;
        let sd = if count > 1 {
            (points
                .iter()
                .map(|p| (p.period as f64 - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0))
                .sqrt()
        } else {
            0.0
        };
        BaselineSummary {
            window,
            count,
            mean,
            sd,
            min: points.iter().map(|p| p.period).min().unwrap_or(0),
            max: points.iter().map(|p| p.period).max().unwrap_or(0),
        }
    }

    pub const CSV_HEADER: &'static str = "length,obs,mean,sd,min,max";

    /// One CSV row without header.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.window, self.count, self.mean, self.sd, self.min, self.max
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingBaseline {
    /// Periods are in samples.
    pub units: String,
    pub points: Vec<BaselinePoint>,
    pub summary: BaselineSummary,
}

impl RollingBaseline {
    /// `index,period` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,period\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.index, p.period));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        format!(
            "{}\n{}\n",
            BaselineSummary::CSV_HEADER,
            self.summary.csv_row()
        )
    }
}

/// Period estimate of every full window; `len - window + 1` windows.
pub fn rolling_baseline(
    ts: &TimeSeries,
    window: usize,
    exec: Execution,
) -> Result<RollingBaseline> {
    if window < MIN_LENGTH {
        return Err(Error::param(
            "window",
            format!("must be >= {MIN_LENGTH}, got {window}"),
        ));
    }
    if window > ts.len() {
        return Err(Error::param(
            "window",
            format!("{window} exceeds series length {}", ts.len()),
        ));
    }
    let ends: Vec<usize> = (window - 1..ts.len()).collect();
    let x = ts.values();
    let points = par::map(exec, &ends, |&end| {
        period_of(&x[end + 1 - window..=end]).map(|period| BaselinePoint { index: end, period })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let summary = BaselineSummary::from_points(window, &points);
    Ok(RollingBaseline {
        units: "samples".into(),
        points,
        summary,
    })
}
