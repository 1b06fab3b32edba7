#![allow(dead_code)]

pub mod oracle;

use swe_period::PersistenceDiagram;

/// Sorted `(birth, death)` pairs of one dimension.
pub fn pairs(diag: &PersistenceDiagram, dim: usize) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = diag
        .intervals(dim)
        .iter()
        .map(|iv| (iv.birth, iv.death))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}
