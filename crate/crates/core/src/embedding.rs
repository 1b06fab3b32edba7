//! Sliding-window (time-delay) embedding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Points in R^(n+1), stored row-major, each tagged with the sample index of
/// its last coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
    time_indices: Vec<usize>,
    n: usize,
    d: usize,
}

impl PointCloud {
    /// Build a cloud from explicit rows. Time indices are `0..len`, and the
    /// embedding parameters are recorded as `n = dim - 1, d = 1`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::param(
                "rows",
                "all points must have the same dimension",
            ));
        }
        if dim == 0 && !rows.is_empty() {
            return Err(Error::param(
                "rows",
                "points must have at least one coordinate",
            ));
        }
        Ok(PointCloud {
            coords: rows.concat(),
            dim,
            time_indices: (0..rows.len()).collect(),
            n: dim.saturating_sub(1),
            d: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.time_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_indices.is_empty()
    }

    /// Ambient dimension (n + 1 for an embedding).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> (usize, usize) {
        (self.n, self.d)
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.coords[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim.max(1)).take(self.len())
    }

    pub fn time_indices(&self) -> &[usize] {
        &self.time_indices
    }

    /// Points `start..=end` (positions, not time indices) as a new cloud.
    pub fn window(&self, start: usize, end: usize) -> PointCloud {
        assert!(
            start <= end && end < self.len(),
            "window {start}..={end} out of range"
        );
        PointCloud {
            coords: self.coords[start * self.dim..(end + 1) * self.dim].to_vec(),
            dim: self.dim,
            time_indices: self.time_indices[start..=end].to_vec(),
            n: self.n,
            d: self.d,
        }
    }

    /// Subset of points in the given order (used by permutation checks).
    pub fn select(&self, positions: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(positions.len() * self.dim);
        for &p in positions {
            coords.extend_from_slice(self.point(p));
        }
        PointCloud {
            coords,
            dim: self.dim,
            time_indices: positions.iter().map(|&p| self.time_indices[p]).collect(),
            n: self.n,
            d: self.d,
        }
    }

    /// `time_index,x0,x1,...` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_index");
        for c in 0..self.dim {
            out.push_str(&format!(",x{c}"));
        }
        out.push('\n');
        for (t, p) in self.time_indices.iter().zip(self.points()) {
            out.push_str(&t.to_string());
            for v in p {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Euclidean distance.
#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Embed `ts` as `[f_j, f_{j+d}, ..., f_{j+nd}]` for every valid `j`.
/// Point `j` gets time index `j + n*d`.
pub fn swe(ts: &TimeSeries, n: usize, d: usize) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    if d == 0 {
        return Err(Error::param("d", "must be >= 1"));
    }
    let span = n * d;
    let f = ts.values();
    if f.len() < span + 1 {
        return Err(Error::SeriesTooShort {
            needed: span + 1,
            got: f.len(),
        });
    }
    let count = f.len() - span;
    let dim = n + 1;
    let mut coords = Vec::with_capacity(count * dim);
    for j in 0..count {
        coords.extend((0..=n).map(|m| f[j + m * d]));
    }
    Ok(PointCloud {
        coords,
        dim,
        time_indices: (span..span + count).collect(),
        n,
        d,
    })
}
