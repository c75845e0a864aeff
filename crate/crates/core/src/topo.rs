//! Persistent-homology descriptors of a single fingerprint.
//!
//! A normalized fingerprint is embedded as the planar curve `(i, f̃_i)`. The
//! Vietoris–Rips filtration of that cloud gives H0 bars from the minimum
//! spanning tree and H1 bars from a Z/2 reduction of the triangle boundary
//! matrix. Each diagram is summarized by its pair count and persistence
//! entropy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::preprocess::{NormMode, NormStats};

/// Largest cloud accepted by [`vr_persistence`].
pub const MAX_CLOUD: usize = 64;

pub type Point = [f64; 2];

/// Finite birth–death pairs for H0 and H1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub h0: Vec<(f64, f64)>,
    pub h1: Vec<(f64, f64)>,
}

/// `[NoP0, PE0, NoP1, PE1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhFeatures {
    pub nop0: f64,
    pub pe0: f64,
    pub nop1: f64,
    pub pe1: f64,
}

impl PhFeatures {
    pub fn to_array(self) -> [f64; 4] {
        [self.nop0, self.pe0, self.nop1, self.pe1]
    }
}

/// Points `(i, f̃_i)` with 1-based `i`.
pub fn embed_curve(f: &[f64]) -> Result<Vec<Point>> {
    if f.len() < 2 {
        return Err(Error::Invalid(format!(
            "curve embedding needs at least 2 values, got {}",
            f.len()
        )));
    }
    Ok(f.iter()
        .enumerate()
        .map(|(i, &v)| [(i + 1) as f64, v])
        .collect())
}

#[inline]
fn dist(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Symmetric difference of two sorted index lists.
fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
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

/// H0 and H1 persistence of the Rips filtration of `cloud`.
///
/// H0 keeps all `n − 1` finite bars (the infinite bar is dropped). H1 keeps
/// bars of positive length; the complex is truncated at the enclosing radius,
/// beyond which it is a cone and carries no 1-cycles.
pub fn vr_persistence(cloud: &[Point]) -> Result<PersistenceDiagram> {
    let n = cloud.len();
    if n > MAX_CLOUD {
        return Err(Error::CloudTooLarge(n, MAX_CLOUD));
    }
    if n < 2 {
        return Err(Error::Invalid(format!("persistence needs at least 2 points, got {n}")));
    }
    let mut dm = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(&cloud[i], &cloud[j]);
            dm[i * n + j] = d;
            dm[j * n + i] = d;
        }
    }
    let enclosing = (0..n)
        .map(|i| (0..n).map(|j| dm[i * n + j]).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);

    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((dm[i * n + j], i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    // H0: Kruskal over the filtration order
    let mut uf = UnionFind::new(n);
    let mut h0 = Vec::with_capacity(n - 1);
    let mut negative = vec![false; edges.len()];
    for (e, &(len, i, j)) in edges.iter().enumerate() {
        if uf.union(i, j) {
            h0.push((0.0, len));
            negative[e] = true;
        }
    }

    // H1: reduce triangle columns whose rows are edge filtration indices
    let mut edge_id = vec![usize::MAX; n * n];
    for (e, &(_, i, j)) in edges.iter().enumerate() {
        edge_id[i * n + j] = e;
    }
    let mut tris: Vec<(f64, usize, [usize; 3])> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if dm[i * n + j] > enclosing {
                continue;
            }
            for k in j + 1..n {
                let diam = dm[i * n + j].max(dm[i * n + k]).max(dm[j * n + k]);
                if diam > enclosing {
                    continue;
                }
                let mut faces = [edge_id[i * n + j], edge_id[i * n + k], edge_id[j * n + k]];
                faces.sort_unstable();
                tris.push((diam, faces[2], faces));
            }
        }
    }
    tris.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut low_owner: Vec<Option<Vec<usize>>> = vec![None; edges.len()];
    let mut h1 = Vec::new();
    for (diam, _, faces) in &tris {
        let mut col: Vec<usize> = faces.to_vec();
        while let Some(&low) = col.last() {
            match &low_owner[low] {
                Some(other) => col = xor_sorted(&col, other),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            debug_assert!(!negative[low]);
            let birth = edges[low].0;
            if *diam > birth {
                h1.push((birth, *diam));
            }
            low_owner[low] = Some(col);
        }
    }
    h1.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(PersistenceDiagram { h0, h1 })
}

/// Shannon entropy (natural log) of normalized bar lengths; zero-length bars
/// are ignored.
pub fn persistence_entropy(pairs: &[(f64, f64)]) -> f64 {
    let lens: Vec<f64> = pairs.iter().map(|(b, d)| d - b).filter(|l| *l > 0.0).collect();
    let total: f64 = lens.iter().sum();
    if lens.len() <= 1 || !(total > 0.0) {
        return 0.0;
    }
    let h = -lens
        .iter()
        .map(|l| {
            let p = l / total;
            p * p.ln()
        })
        .sum::<f64>();
    h.max(0.0)
}

pub fn ph_features(diagram: &PersistenceDiagram) -> PhFeatures {
    PhFeatures {
        nop0: diagram.h0.len() as f64,
        pe0: persistence_entropy(&diagram.h0),
        nop1: diagram.h1.len() as f64,
        pe1: persistence_entropy(&diagram.h1),
    }
}

/// Embeds, filters and summarizes one normalized fingerprint.
pub fn fingerprint_features(f_norm: &[f64]) -> Result<PhFeatures> {
    Ok(ph_features(&vr_persistence(&embed_curve(f_norm)?)?))
}

/// [`fingerprint_features`] over many rows, in parallel.
pub fn feature_rows(rows: &[Vec<f64>]) -> Result<Vec<PhFeatures>> {
    rows.par_iter().map(|r| fingerprint_features(r)).collect()
}

/// z-score statistics of training-set PH features.
pub fn fit_ph_stats(train: &[PhFeatures]) -> Result<NormStats> {
    let rows: Vec<Vec<f64>> = train.iter().map(|f| f.to_array().to_vec()).collect();
    NormStats::fit_rows(&rows, NormMode::DbmZscore)
}

/// `[f̃; z-scored φ_PH]`, length d + 4.
pub fn augment(f_norm: &[f64], feats: &PhFeatures, stats: &NormStats) -> Result<Vec<f64>> {
    check_dim(4, stats.dim())?;
    let mut out = f_norm.to_vec();
    out.extend(stats.apply(&feats.to_array())?);
    Ok(out)
}
