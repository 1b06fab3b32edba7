//! Vietoris–Rips persistent homology in dimensions 0 and 1 over Z/2.
//!
//! The filtration is the 2-skeleton of the Rips complex truncated at `cap`:
//! vertices enter at 0, an edge at the Euclidean distance of its endpoints
//! and a triangle at its longest edge. Simplices of equal value are ordered
//! by dimension and then by their sorted vertex lists, which makes the
//! output independent of scheduling.
//!
//! H0 is read off a union–find sweep over the edges in filtration order.
//! The edges that merge two components are exactly the pivots of the
//! dimension-0 coboundary reduction, so their dimension-1 columns are
//! cleared and never built. H1 is then obtained by column reduction of the
//! coboundary matrix (the anti-transposed boundary matrix, which yields the
//! same persistence pairs), processing edges from the youngest to the
//! oldest. Columns are generated on demand from the distance matrix. A
//! column whose smallest cofacet is not yet claimed is already reduced and is
//! paired without touching a heap; only real collisions pay for a reduction,
//! and only the reduction chain (not the reduced column) is stored.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::embedding::{distance, PointCloud};
use crate::error::{Error, Result};

/// Largest edge length admitted into the filtration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Cap {
    /// The enclosing radius: beyond it some vertex is joined to every other
    /// one, the complex is a cone and no 1-cycle survives.
    #[default]
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L1,
    L2,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            other => Err(Error::param(
                "norm",
                format!("expected L1 or L2, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub birth: f64,
    /// `f64::INFINITY` for classes alive at the cap.
    #[serde(serialize_with = "ser_death", deserialize_with = "de_death")]
    pub death: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }
}

fn ser_death<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_death<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Death {
        Num(f64),
        Text(String),
    }
    match Death::deserialize(d)? {
        Death::Num(v) => Ok(v),
        Death::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Death::Text(t) => Err(serde::de::Error::custom(format!("bad death value `{t}`"))),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub h0: Vec<Interval>,
    pub h1: Vec<Interval>,
}

impl PersistenceDiagram {
    pub fn intervals(&self, dim: usize) -> &[Interval] {
        match dim {
            0 => &self.h0,
            1 => &self.h1,
            _ => &[],
        }
    }

    /// `dim,birth,death` CSV; infinite deaths are written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for (dim, ivs) in [(0, &self.h0), (1, &self.h1)] {
            for iv in ivs {
                if iv.death.is_infinite() {
                    out.push_str(&format!("{dim},{},inf\n", iv.birth));
                } else {
                    out.push_str(&format!("{dim},{},{}\n", iv.birth, iv.death));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn sort(&mut self) {
        let key = |a: &Interval, b: &Interval| {
            a.birth
                .total_cmp(&b.birth)
                .then(a.death.total_cmp(&b.death))
        };
        self.h0.sort_by(key);
        self.h1.sort_by(key);
    }
}

/// Dense symmetric distance matrix.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = distance(cloud.point(i), cloud.point(j));
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// min over points of the distance to the farthest other point.
    pub fn enclosing_radius(&self) -> f64 {
        if self.n <= 1 {
            return 0.0;
        }
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .copied()
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

/// Persistence of the Rips filtration of `cloud` up to `cap`, with
/// zero-length intervals removed.
pub fn rips_persistence(cloud: &PointCloud, cap: Cap) -> Result<PersistenceDiagram> {
    let mut diag = rips_persistence_full(cloud, cap)?;
    diag.h0.retain(|iv| iv.death > iv.birth);
    diag.h1.retain(|iv| iv.death > iv.birth);
    Ok(diag)
}

/// Like [`rips_persistence`] but keeps zero-length intervals, so H0 has
/// exactly one interval per point.
pub fn rips_persistence_full(cloud: &PointCloud, cap: Cap) -> Result<PersistenceDiagram> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let dist = DistanceMatrix::from_cloud(cloud);
    persistence_from_distances(&dist, cap)
}

pub fn persistence_from_distances(dist: &DistanceMatrix, cap: Cap) -> Result<PersistenceDiagram> {
    let cap = match cap {
        Cap::Auto => dist.enclosing_radius(),
        Cap::Value(c) if c > 0.0 && !c.is_nan() => c,
        Cap::Value(c) => return Err(Error::param("cap", format!("must be > 0, got {c}"))),
    };
    if dist.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let edges = filtration_edges(dist, cap);
    let mut diag = PersistenceDiagram::default();
    let cleared = zero_dim(dist.len(), &edges, &mut diag.h0);
    one_dim(dist, cap, &edges, &cleared, &mut diag.h1);
    diag.sort();
    Ok(diag)
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    value: f64,
    u: u32,
    v: u32,
}

fn filtration_edges(dist: &DistanceMatrix, cap: f64) -> Vec<Edge> {
    let n = dist.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let value = dist.get(u, v);
            if value <= cap {
                edges.push(Edge {
                    value,
                    u: u as u32,
                    v: v as u32,
                });
            }
        }
    }
    // (value, lexicographic vertices); `u < v` already holds
    edges.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });
    edges
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (ra, rb) = (ra as usize, rb as usize);
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Returns a mask of edges paired in dimension 0.
fn zero_dim(n: usize, edges: &[Edge], out: &mut Vec<Interval>) -> Vec<bool> {
    let mut uf = UnionFind::new(n);
    let mut cleared = vec![false; edges.len()];
    for (idx, e) in edges.iter().enumerate() {
        if uf.union(e.u, e.v) {
            cleared[idx] = true;
            out.push(Interval {
                birth: 0.0,
                death: e.value,
            });
        }
    }
    let roots = (0..n as u32).filter(|&x| uf.find(x) == x).count();
    out.extend((0..roots).map(|_| Interval {
        birth: 0.0,
        death: f64::INFINITY,
    }));
    cleared
}

/// Filtration key of a triangle: value bits, then lexicographic vertex code.
/// Non-negative `f64` bit patterns order like the values themselves.
type TriKey = (u64, u64);

fn cofacets(dist: &DistanceMatrix, cap: f64, e: &Edge, out: &mut Vec<TriKey>) {
    let n = dist.len();
    let (u, v) = (e.u as usize, e.v as usize);
    let nn = n as u64;
    for w in 0..n {
        if w == u || w == v {
            continue;
        }
        let (du, dv) = (dist.get(u, w), dist.get(v, w));
        if du > cap || dv > cap {
            continue;
        }
        let value = e.value.max(du).max(dv);
        let (a, b, c) = if w < u {
            (w, u, v)
        } else if w < v {
            (u, w, v)
        } else {
            (u, v, w)
        };
        out.push((value.to_bits(), (a as u64 * nn + b as u64) * nn + c as u64));
    }
}

/// Smallest entry with odd multiplicity, left in the heap.
fn pivot(heap: &mut BinaryHeap<Reverse<TriKey>>) -> Option<TriKey> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek() == Some(&Reverse(top)) {
            heap.pop();
            continue;
        }
        heap.push(Reverse(top));
        return Some(top);
    }
    None
}

fn one_dim(
    dist: &DistanceMatrix,
    cap: f64,
    edges: &[Edge],
    cleared: &[bool],
    out: &mut Vec<Interval>,
) {
    // pivot triangle -> (edge, reduction chain without the edge itself)
    let mut pivots: HashMap<TriKey, (usize, Vec<usize>)> = HashMap::new();
    let mut column = Vec::new();
    let mut heap = BinaryHeap::new();

    for idx in (0..edges.len()).rev() {
        if cleared[idx] {
            continue;
        }
        let e = &edges[idx];
        column.clear();
        cofacets(dist, cap, e, &mut column);
        let Some(&first) = column.iter().min() else {
            out.push(Interval {
                birth: e.value,
                death: f64::INFINITY,
            });
            continue;
        };
        if let Entry::Vacant(slot) = pivots.entry(first) {
            slot.insert((idx, Vec::new()));
            out.push(Interval {
                birth: e.value,
                death: f64::from_bits(first.0),
            });
            continue;
        }

        heap.clear();
        heap.extend(column.iter().copied().map(Reverse));
        let mut chain: Vec<usize> = Vec::new();
        loop {
            match pivot(&mut heap) {
                None => {
                    out.push(Interval {
                        birth: e.value,
                        death: f64::INFINITY,
                    });
                    break;
                }
                Some(p) => match pivots.get(&p) {
                    Some((other, other_chain)) => {
                        for &c in std::iter::once(other).chain(other_chain) {
                            column.clear();
                            cofacets(dist, cap, &edges[c], &mut column);
                            heap.extend(column.iter().copied().map(Reverse));
                            chain.push(c);
                        }
                    }
                    None => {
                        out.push(Interval {
                            birth: e.value,
                            death: f64::from_bits(p.0),
                        });
                        pivots.insert(p, (idx, cancel_pairs(chain)));
                        break;
                    }
                },
            }
        }
    }
}

/// Z/2 reduction of a multiset of column ids.
fn cancel_pairs(mut chain: Vec<usize>) -> Vec<usize> {
    chain.sort_unstable();
    let mut out = Vec::with_capacity(chain.len());
    for c in chain {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

/// Sum of finite interval lengths (L1) or the root of their squares (L2).
pub fn diagram_norm(diag: &PersistenceDiagram, dim: usize, kind: NormKind) -> f64 {
    let lengths = diag
        .intervals(dim)
        .iter()
        .filter(|iv| iv.is_finite())
        .map(Interval::length);
    match kind {
        NormKind::L1 => lengths.sum(),
        NormKind::L2 => lengths.map(|l| l * l).sum::<f64>().sqrt(),
    }
}

/// The `count` longest finite H1 lengths, descending, zero-padded.
pub fn dominant_intervals(diag: &PersistenceDiagram, count: usize) -> Vec<f64> {
    let mut lengths: Vec<f64> = diag
        .h1
        .iter()
        .filter(|iv| iv.is_finite())
        .map(Interval::length)
        .collect();
    lengths.sort_by(|a, b| b.total_cmp(a));
    lengths.resize(count, 0.0);
    lengths
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(rows: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn circle(n: usize, r: f64) -> PointCloud {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        PointCloud::from_rows(&rows).unwrap()
    }

    #[test]
    fn single_point() {
        let d = rips_persistence(&cloud(&[[0.3, 0.4]]), Cap::Auto).unwrap();
        assert_eq!(
            d.h0,
            vec![Interval {
                birth: 0.0,
                death: f64::INFINITY
            }]
        );
        assert!(d.h1.is_empty());
    }

    #[test]
    fn unit_square() {
        let sq = cloud(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let d = rips_persistence(&sq, Cap::Auto).unwrap();
        assert_eq!(d.h1.len(), 1);
        assert!((d.h1[0].birth - 1.0).abs() < 1e-12);
        assert!((d.h1[0].death - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(d.h0.len(), 4);
        assert_eq!(d.h0.iter().filter(|iv| !iv.is_finite()).count(), 1);
    }

    #[test]
    fn circle_has_one_dominant_cycle() {
        let d = rips_persistence(&circle(20, 1.0), Cap::Auto).unwrap();
        assert_eq!(d.h1.len(), 1);
        assert!(d.h1[0].death / d.h1[0].birth > 3.0);
    }

    #[test]
    fn empty_cloud_and_bad_cap() {
        let empty = PointCloud::from_rows(&[]).unwrap();
        assert!(matches!(
            rips_persistence(&empty, Cap::Auto),
            Err(Error::EmptyCloud)
        ));
        let c = circle(5, 1.0);
        assert!(rips_persistence(&c, Cap::Value(0.0)).is_err());
        assert!(rips_persistence(&c, Cap::Value(-1.0)).is_err());
    }

    #[test]
    fn small_cap_leaves_infinite_cycle() {
        // the circle's cycle is born but never filled below the cap
        let c = circle(12, 1.0);
        let d = rips_persistence(&c, Cap::Value(0.6)).unwrap();
        assert_eq!(d.h1.len(), 1);
        assert!(d.h1[0].death.is_infinite());
        assert_eq!(diagram_norm(&d, 1, NormKind::L1), 0.0);
    }

    #[test]
    fn norms() {
        let diag = PersistenceDiagram {
            h0: vec![],
            h1: vec![
                Interval {
                    birth: 0.0,
                    death: 1.0,
                },
                Interval {
                    birth: 0.0,
                    death: 2.0,
                },
                Interval {
                    birth: 0.5,
                    death: f64::INFINITY,
                },
            ],
        };
        assert_eq!(diagram_norm(&diag, 1, NormKind::L1), 3.0);
        assert!((diagram_norm(&diag, 1, NormKind::L2) - 5f64.sqrt()).abs() < 1e-12);
        let empty = PersistenceDiagram::default();
        assert_eq!(diagram_norm(&empty, 0, NormKind::L1), 0.0);
        assert_eq!(diagram_norm(&empty, 1, NormKind::L2), 0.0);
    }

    #[test]
    fn dominant() {
        let diag = PersistenceDiagram {
            h0: vec![],
            h1: vec![
                Interval {
                    birth: 0.0,
                    death: 1.0,
                },
                Interval {
                    birth: 0.0,
                    death: 3.0,
                },
                Interval {
                    birth: 1.0,
                    death: 2.0,
                },
            ],
        };
        assert_eq!(dominant_intervals(&diag, 2), vec![3.0, 1.0]);
        assert_eq!(
            dominant_intervals(&PersistenceDiagram::default(), 3),
            vec![0.0; 3]
        );
    }

    #[test]
    fn csv_and_json() {
        let sq = cloud(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let d = rips_persistence(&sq, Cap::Auto).unwrap();
        let csv = d.to_csv();
        assert!(csv.starts_with("dim,birth,death\n0,0,1\n"));
        assert!(csv.contains("0,0,inf\n"));
        assert!(csv.contains("1,1,1.4142135623730951\n"));
        let json = d.to_json().unwrap();
        assert!(json.contains("\"inf\""));
        let back: PersistenceDiagram = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn cancel_pairs_is_mod_two() {
        assert_eq!(cancel_pairs(vec![3, 1, 3, 2, 1, 1]), vec![1, 2]);
    }
}
