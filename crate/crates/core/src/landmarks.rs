//! Landmark selection and Voronoi symbolic dynamics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{distance, PointCloud};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LandmarkMethod {
    #[default]
    MaxMin,
    KMeans,
}

impl std::str::FromStr for LandmarkMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "maxmin" | "max-min" => Ok(LandmarkMethod::MaxMin),
            "kmeans" | "k-means" => Ok(LandmarkMethod::KMeans),
            other => Err(Error::param(
                "landmark_method",
                format!("expected maxmin or kmeans, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    /// Positions into the cloud; landmark id = position in this list.
    pub indices: Vec<usize>,
    pub coordinates: Vec<Vec<f64>>,
    pub method: LandmarkMethod,
}

impl Landmarks {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assignment {
    Hard,
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicSequence {
    /// Per cloud point, the landmark ids it belongs to (exactly one in hard mode).
    pub labels: Vec<Vec<usize>>,
    /// Time indices of each point, in cloud order.
    pub time_indices: Vec<usize>,
    /// For each landmark, the sorted time indices of its points.
    pub return_times: Vec<Vec<usize>>,
}

impl SymbolicSequence {
    /// `time_index,label` CSV. Soft labels are joined with `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_index,label\n");
        for (t, ls) in self.time_indices.iter().zip(&self.labels) {
            let joined: Vec<String> = ls.iter().map(usize::to_string).collect();
            out.push_str(&format!("{t},{}\n", joined.join(";")));
        }
        out
    }
}

pub fn select_landmarks(
    cloud: &PointCloud,
    k: usize,
    method: LandmarkMethod,
    seed: u64,
) -> Result<Landmarks> {
    if k == 0 || k > cloud.len() {
        return Err(Error::param(
            "k",
            format!("must be in 1..={}, got {k}", cloud.len()),
        ));
    }
    let indices = match method {
        LandmarkMethod::MaxMin => maxmin(cloud, k),
        LandmarkMethod::KMeans => kmeans_landmarks(cloud, k, seed),
    };
    Ok(Landmarks {
        coordinates: indices.iter().map(|&i| cloud.point(i).to_vec()).collect(),
        indices,
        method,
    })
}

/// Greedy farthest-point sampling starting at point 0; ties go to the
/// lowest index.
fn maxmin(cloud: &PointCloud, k: usize) -> Vec<usize> {
    let n = cloud.len();
    let mut chosen = vec![0usize];
    let mut min_dist: Vec<f64> = (0..n)
        .map(|j| distance(cloud.point(0), cloud.point(j)))
        .collect();
    while chosen.len() < k {
        let mut best = None;
        let mut best_d = f64::NEG_INFINITY;
        for (j, &d) in min_dist.iter().enumerate() {
            if d > best_d && !chosen.contains(&j) {
                best_d = d;
                best = Some(j);
            }
        }
        let next = best.expect("k <= n");
        chosen.push(next);
        for (j, md) in min_dist.iter_mut().enumerate() {
            let d = distance(cloud.point(next), cloud.point(j));
            if d < *md {
                *md = d;
            }
        }
    }
    chosen
}

const KMEANS_MAX_ITER: usize = 100;
const KMEANS_TOL: f64 = 1e-6;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding followed by Lloyd iterations; each centroid is then
/// snapped to its nearest unused cloud point.
fn kmeans_landmarks(cloud: &PointCloud, k: usize, seed: u64) -> Vec<usize> {
    let n = cloud.len();
    let dim = cloud.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(cloud.point(rng.random_range(0..n)).to_vec());
    let mut d2: Vec<f64> = cloud.points().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (j, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = j;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centroids.push(cloud.point(next).to_vec());
        for (j, p) in cloud.points().enumerate() {
            d2[j] = d2[j].min(sq_dist(p, &centroids[centroids.len() - 1]));
        }
    }

    let mut assign = vec![0usize; n];
    let mut prev_inertia = f64::INFINITY;
    for _ in 0..KMEANS_MAX_ITER {
        let mut inertia = 0.0;
        for (j, p) in cloud.points().enumerate() {
            let (best, bd) = nearest(p, &centroids);
            assign[j] = best;
            inertia += bd;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (j, p) in cloud.points().enumerate() {
            counts[assign[j]] += 1;
            for (s, x) in sums[assign[j]].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let converged = prev_inertia.is_finite()
            && (prev_inertia - inertia).abs() <= KMEANS_TOL * prev_inertia.max(f64::MIN_POSITIVE);
        prev_inertia = inertia;
        if converged {
            break;
        }
    }

    let mut used = vec![false; n];
    centroids
        .iter()
        .map(|c| {
            let mut best = usize::MAX;
            let mut bd = f64::INFINITY;
            for (j, p) in cloud.points().enumerate() {
                let d = sq_dist(p, c);
                if !used[j] && d < bd {
                    bd = d;
                    best = j;
                }
            }
            used[best] = true;
            best
        })
        .collect()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut bd = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < bd {
            bd = d;
            best = i;
        }
    }
    (best, bd)
}

/// Voronoi labels of every point. Hard mode picks the nearest landmark
/// (lowest id on ties); soft mode keeps every landmark within
/// `(1 + soft_slack)` times the nearest distance.
pub fn assign_symbols(
    cloud: &PointCloud,
    lm: &Landmarks,
    mode: Assignment,
    soft_slack: f64,
) -> Result<SymbolicSequence> {
    if lm.is_empty() {
        return Err(Error::MismatchedLandmarks("no landmarks".into()));
    }
    for (id, (&i, c)) in lm.indices.iter().zip(&lm.coordinates).enumerate() {
        if i >= cloud.len() || cloud.point(i) != c.as_slice() {
            return Err(Error::MismatchedLandmarks(format!(
                "landmark {id} (point {i}) is not a point of the cloud"
            )));
        }
    }
    if soft_slack.is_nan() || soft_slack < 0.0 {
        return Err(Error::param(
            "soft_slack",
            format!("must be >= 0, got {soft_slack}"),
        ));
    }

    let mut labels = Vec::with_capacity(cloud.len());
    let mut return_times = vec![Vec::new(); lm.len()];
    for (p, &t) in cloud.points().zip(cloud.time_indices()) {
        let dists: Vec<f64> = lm.coordinates.iter().map(|c| distance(p, c)).collect();
        let (best, bd) =
            dists.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &d)| if d < acc.1 { (i, d) } else { acc },
            );
        let ids: Vec<usize> = match mode {
            Assignment::Hard => vec![best],
            Assignment::Soft => {
                let bound = (1.0 + soft_slack) * bd;
                (0..lm.len()).filter(|&i| dists[i] <= bound).collect()
            }
        };
        for &i in &ids {
            return_times[i].push(t);
        }
        labels.push(ids);
    }
    // cloud time indices increase, but sort anyway for arbitrary clouds
    for ts in &mut return_times {
        ts.sort_unstable();
    }
    Ok(SymbolicSequence {
        labels,
        time_indices: cloud.time_indices().to_vec(),
        return_times,
    })
}
