//! Multi-target regression forest.
//!
//! Each tree is a CART regressor over both coordinates at once: splits
//! minimize the summed within-child squared error of x and y, and leaves hold
//! the mean position of their training samples. Trees are fit on bootstrap
//! resamples and examine `max_features` random candidate features per node.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datamodel::Position;
use crate::error::{check_dim, Error, Result};
use crate::rng::{self, Rng};

/// Leaves whose summed target variance is below this are pure.
pub const PURITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RfConfig {
    pub n_trees: usize,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    /// `None` uses `⌈√D⌉`.
    pub max_features: Option<usize>,
    pub min_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: Some(28),
            max_features: None,
            min_leaf: 1,
            bootstrap: true,
            seed: 123,
        }
    }
}

/// One tree node. Leaves have `feature == None` and carry `value`; split
/// nodes send `x[feature] <= threshold` to `left`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub feature: Option<u32>,
    pub threshold: f64,
    pub left: u32,
    pub right: u32,
    pub value: [f64; 2],
    pub n_samples: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> [f64; 2] {
        let mut i = 0usize;
        loop {
            let n = &self.nodes[i];
            match n.feature {
                None => return n.value,
                Some(f) => {
                    i = if x[f as usize] <= n.threshold {
                        n.left as usize
                    } else {
                        n.right as usize
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            let n = &t.nodes[i];
            match n.feature {
                None => 0,
                Some(_) => 1 + go(t, n.left as usize).max(go(t, n.right as usize)),
            }
        }
        go(self, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.feature.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfModel {
    pub trees: Vec<Tree>,
    pub config: RfConfig,
    pub n_features: usize,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [Position],
    max_depth: usize,
    max_features: usize,
    min_leaf: usize,
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    sse: f64,
    /// Samples going left, once `idx` is sorted by `feature`.
    n_left: usize,
}

fn mean_and_sse(y: &[Position], idx: &[usize]) -> ([f64; 2], f64) {
    let n = idx.len() as f64;
    let (sx, sy) = idx
        .iter()
        .fold((0.0, 0.0), |(a, b), &i| (a + y[i].x, b + y[i].y));
    let m = [sx / n, sy / n];
    let sse = idx
        .iter()
        .map(|&i| (y[i].x - m[0]).powi(2) + (y[i].y - m[1]).powi(2))
        .sum();
    (m, sse)
}

impl Builder<'_> {
    fn leaf(&mut self, value: [f64; 2], n: usize) -> u32 {
        self.nodes.push(Node {
            feature: None,
            threshold: 0.0,
            left: 0,
            right: 0,
            value,
            n_samples: n as u32,
        });
        (self.nodes.len() - 1) as u32
    }

    fn sort_by_feature(&self, idx: &mut [usize], f: usize) {
        let x = self.x;
        idx.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
    }

    /// Best split on one feature; `idx` must be sorted by that feature.
    fn best_on_feature(&self, idx: &[usize], f: usize, mean: [f64; 2]) -> Option<Split> {
        let n = idx.len();
        let (tx, ty) = idx.iter().fold((0.0, 0.0), |(a, b), &i| {
            (a + self.y[i].x - mean[0], b + self.y[i].y - mean[1])
        });
        let tq: f64 = idx
            .iter()
            .map(|&i| (self.y[i].x - mean[0]).powi(2) + (self.y[i].y - mean[1]).powi(2))
            .sum();
        let (mut lx, mut ly, mut lq) = (0.0, 0.0, 0.0);
        let mut best: Option<Split> = None;
        for k in 0..n - 1 {
            let i = idx[k];
            let cx = self.y[i].x - mean[0];
            let cy = self.y[i].y - mean[1];
            lx += cx;
            ly += cy;
            lq += cx * cx + cy * cy;
            let nl = k + 1;
            let nr = n - nl;
            if nl < self.min_leaf || nr < self.min_leaf {
                continue;
            }
            let a = self.x[i][f];
            let b = self.x[idx[k + 1]][f];
            if a >= b {
                continue;
            }
            let sse_l = lq - (lx * lx + ly * ly) / nl as f64;
            let (rx, ry, rq) = (tx - lx, ty - ly, tq - lq);
            let sse_r = rq - (rx * rx + ry * ry) / nr as f64;
            let sse = sse_l + sse_r;
            if best.as_ref().is_none_or(|s| sse < s.sse) {
                let mut threshold = a + (b - a) / 2.0;
                if threshold >= b {
                    threshold = a;
                }
                best = Some(Split {
                    feature: f,
                    threshold,
                    sse,
                    n_left: nl,
                });
            }
        }
        best
    }

    fn build(&mut self, idx: &mut [usize], depth: usize, rng: &mut Rng) -> u32 {
        let (mean, sse) = mean_and_sse(self.y, idx);
        let n = idx.len();
        if depth >= self.max_depth || n < 2 * self.min_leaf || sse / n as f64 <= PURITY_EPS {
            return self.leaf(mean, n);
        }
        let d = self.x[idx[0]].len();
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(rng);
        let mut best: Option<Split> = None;
        for (visited, &f) in features.iter().enumerate() {
            if visited >= self.max_features && best.is_some() {
                break;
            }
            self.sort_by_feature(idx, f);
            if let Some(s) = self.best_on_feature(idx, f, mean) {
                if best.as_ref().is_none_or(|b| s.sse < b.sse) {
                    best = Some(s);
                }
            }
        }
        let Some(split) = best else {
            return self.leaf(mean, n);
        };
        self.sort_by_feature(idx, split.feature);
        let at = self.nodes.len();
        self.nodes.push(Node {
            feature: Some(split.feature as u32),
            threshold: split.threshold,
            left: 0,
            right: 0,
            value: mean,
            n_samples: n as u32,
        });
        let (l, r) = idx.split_at_mut(split.n_left);
        let left = self.build(l, depth + 1, rng);
        let right = self.build(r, depth + 1, rng);
        self.nodes[at].left = left;
        self.nodes[at].right = right;
        at as u32
    }
}

fn fit_tree(x: &[Vec<f64>], y: &[Position], cfg: &RfConfig, max_features: usize, tree_id: u64) -> Tree {
    let mut rng = rng::rng_from(cfg.seed, &[0x7EE, tree_id]);
    let m = x.len();
    let mut idx: Vec<usize> = if cfg.bootstrap {
        (0..m).map(|_| rng.random_range(0..m)).collect()
    } else {
        (0..m).collect()
    };
    let mut b = Builder {
        x,
        y,
        max_depth: cfg.max_depth.unwrap_or(usize::MAX),
        max_features,
        min_leaf: cfg.min_leaf.max(1),
        nodes: Vec::new(),
    };
    b.build(&mut idx, 0, &mut rng);
    Tree { nodes: b.nodes }
}

/// Fits a forest of `config.n_trees` trees. Deterministic given the seed,
/// independent of thread scheduling.
pub fn train_rf(x: &[Vec<f64>], y: &[Position], config: &RfConfig) -> Result<RfModel> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Invalid(format!(
            "forest needs matching non-empty inputs ({} rows, {} targets)",
            x.len(),
            y.len()
        )));
    }
    if config.n_trees == 0 {
        return Err(Error::Invalid("forest needs at least one tree".into()));
    }
    let d = x[0].len();
    for row in x {
        check_dim(d, row.len())?;
    }
    let max_features = config
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d.max(1));
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| fit_tree(x, y, config, max_features, t as u64))
        .collect();
    Ok(RfModel {
        trees,
        config: *config,
        n_features: d,
    })
}

impl RfModel {
    /// Unweighted mean of the trees' leaf means.
    pub fn predict(&self, x: &[f64]) -> Result<Position> {
        check_dim(self.n_features, x.len())?;
        let (sx, sy) = self.trees.iter().fold((0.0, 0.0), |(a, b), t| {
            let v = t.predict(x);
            (a + v[0], b + v[1])
        });
        let n = self.trees.len() as f64;
        Ok(Position::new(sx / n, sy / n))
    }
}

pub fn predict_rf(model: &RfModel, x: &[f64]) -> Result<Position> {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_target() {
        let x = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        let y = vec![Position::new(3.0, 4.0); 2];
        let m = train_rf(&x, &y, &RfConfig { n_trees: 10, ..RfConfig::default() }).unwrap();
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), Position::new(3.0, 4.0));
        assert_eq!(m.predict(&[9.0, -9.0]).unwrap(), Position::new(3.0, 4.0));
    }

    #[test]
    fn xor_layout_is_learned() {
        // four XOR corners, each surveyed ten times
        let corners = [(0.0, 0.0, 0.0), (0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)];
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..10 {
            for &(a, b, l) in &corners {
                x.push(vec![a, b]);
                y.push(Position::new(l, 1.0 - l));
            }
        }
        let cfg = RfConfig { n_trees: 50, max_depth: Some(2), seed: 3, ..RfConfig::default() };
        let m = train_rf(&x, &y, &cfg).unwrap();
        for (row, target) in x.iter().zip(&y) {
            let p = m.predict(row).unwrap();
            assert!(p.dist(target) < 0.25, "{row:?} -> {p:?}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let x: Vec<Vec<f64>> = (0..60).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos(), i as f64]).collect();
        let y: Vec<Position> = (0..60).map(|i| Position::new((i % 7) as f64, (i % 5) as f64)).collect();
        let cfg = RfConfig { n_trees: 20, ..RfConfig::default() };
        let a = train_rf(&x, &y, &cfg).unwrap();
        let b = train_rf(&x, &y, &cfg).unwrap();
        assert_eq!(a, b);
        for row in &x {
            assert_eq!(a.predict(row).unwrap(), b.predict(row).unwrap());
        }
    }

    #[test]
    fn single_tree_is_its_leaf() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<Position> = (0..20).map(|i| Position::new(i as f64, 0.0)).collect();
        let m = train_rf(&x, &y, &RfConfig { n_trees: 1, max_depth: Some(2), ..RfConfig::default() }).unwrap();
        for row in &x {
            let v = m.trees[0].predict(row);
            assert_eq!(m.predict(row).unwrap(), Position::new(v[0], v[1]));
        }
    }

    #[test]
    fn unbounded_depth_memorizes_separable_data() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect();
        let y: Vec<Position> = (0..40).map(|i| Position::new(i as f64 * 0.5, (i % 3) as f64)).collect();
        let cfg = RfConfig { n_trees: 30, max_depth: None, bootstrap: false, ..RfConfig::default() };
        let m = train_rf(&x, &y, &cfg).unwrap();
        for (row, t) in x.iter().zip(&y) {
            assert!(m.predict(row).unwrap().dist(t) < 1e-6);
        }
    }

    #[test]
    fn leaves_respect_min_leaf_and_depth() {
        let x: Vec<Vec<f64>> = (0..100).map(|i| vec![(i as f64).sqrt(), (i % 9) as f64]).collect();
        let y: Vec<Position> = (0..100).map(|i| Position::new((i % 11) as f64, (i % 4) as f64)).collect();
        let cfg = RfConfig { n_trees: 5, max_depth: Some(4), min_leaf: 3, ..RfConfig::default() };
        let m = train_rf(&x, &y, &cfg).unwrap();
        assert_eq!(m.trees.len(), 5);
        for t in &m.trees {
            assert!(t.depth() <= 4);
            assert!(t.leaves().all(|l| l.n_samples >= 3));
        }
    }

    #[test]
    fn dimension_checks() {
        let m = train_rf(&[vec![1.0], vec![2.0]], &[Position::default(); 2], &RfConfig { n_trees: 2, ..RfConfig::default() }).unwrap();
        assert!(matches!(m.predict(&[1.0, 2.0]), Err(Error::Dimension { .. })));
        assert!(train_rf(&[], &[], &RfConfig::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn tree_order_does_not_matter(seed in 0u64..1000, rot in 1usize..9) {
            let x: Vec<Vec<f64>> = (0..30).map(|i| vec![((i as u64 * 31 + seed) % 17) as f64, (i % 5) as f64]).collect();
            let y: Vec<Position> = (0..30).map(|i| Position::new((i % 6) as f64, (i % 4) as f64)).collect();
            let m = train_rf(&x, &y, &RfConfig { n_trees: 10, seed, ..RfConfig::default() }).unwrap();
            let mut shuffled = m.clone();
            shuffled.trees.rotate_left(rot);
            for row in &x {
                let a = m.predict(row).unwrap();
                let b = shuffled.predict(row).unwrap();
                prop_assert!(a.dist(&b) < 1e-12);
            }
        }
    }
}
