//! Reference persistence by brute force: every simplex of the capped Rips
//! 2-skeleton goes into one boundary matrix, reduced by the standard column
//! algorithm. Quadratic memory, only meant for a handful of points.

use std::collections::HashMap;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn enclosing_radius(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .map(|p| points.iter().map(|q| dist(p, q)).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

pub type Pairs = Vec<(f64, f64)>;

/// `(h0, h1)` as sorted `(birth, death)` pairs, zero-length pairs dropped,
/// death `INFINITY` for unpaired classes.
pub fn diagram(points: &[Vec<f64>], cap: f64) -> (Pairs, Pairs) {
    let n = points.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|i| (0.0, vec![i])).collect();
    for i in 0..n {
        for j in i + 1..n {
            let v = dist(&points[i], &points[j]);
            if v <= cap {
                simplices.push((v, vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = dist(&points[i], &points[j])
                    .max(dist(&points[i], &points[k]))
                    .max(dist(&points[j], &points[k]));
                if v <= cap {
                    simplices.push((v, vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });
    let index: HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.1.clone(), i))
        .collect();

    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, s)| {
            let mut col: Vec<usize> = if s.len() == 1 {
                Vec::new()
            } else {
                (0..s.len())
                    .map(|drop| {
                        let face: Vec<usize> = s
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != drop)
                            .map(|(_, v)| *v)
                            .collect();
                        index[&face]
                    })
                    .collect()
            };
            col.sort_unstable();
            col
        })
        .collect();

    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut paired = vec![false; simplices.len()];
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner.get(&low) {
                Some(&other) => {
                    let add = columns[other].clone();
                    columns[j] = symmetric_difference(&columns[j], &add);
                }
                None => {
                    low_owner.insert(low, j);
                    paired[low] = true;
                    paired[j] = true;
                    break;
                }
            }
        }
    }

    let mut h0 = Vec::new();
    let mut h1 = Vec::new();
    for (&low, &j) in &low_owner {
        let (birth, death) = (simplices[low].0, simplices[j].0);
        match simplices[low].1.len() {
            1 => h0.push((birth, death)),
            2 => h1.push((birth, death)),
            _ => {}
        }
    }
    for (i, (v, s)) in simplices.iter().enumerate() {
        if !paired[i] && columns[i].is_empty() {
            match s.len() {
                1 => h0.push((*v, f64::INFINITY)),
                2 => h1.push((*v, f64::INFINITY)),
                _ => {}
            }
        }
    }
    for d in [&mut h0, &mut h1] {
        d.retain(|(b, e)| e > b);
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    (h0, h1)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
