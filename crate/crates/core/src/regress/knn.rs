//! Variance-weighted k-nearest-neighbor regression under a diagonal
//! Mahalanobis metric.
//!
//! Each coordinate is divided by its σ̂ once at build time, so a plain
//! Euclidean kd-tree over the scaled points answers Mahalanobis queries.

use serde::{Deserialize, Serialize};

use super::kdtree::{KdTree, Neighbor};
use crate::datamodel::Position;
use crate::error::{check_dim, Error, Result};
use crate::preprocess::ChannelVariances;

/// Default ε in the inverse-distance weights.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Training points, their labels and the metric. Only the raw points are
/// serialized; the tree is rebuilt on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "KnnIndexData", into = "KnnIndexData")]
pub struct KnnIndex {
    points: Vec<Vec<f64>>,
    labels: Vec<Position>,
    metric: ChannelVariances,
    inv_std: Vec<f64>,
    tree: KdTree,
}

#[derive(Serialize, Deserialize)]
struct KnnIndexData {
    points: Vec<Vec<f64>>,
    labels: Vec<Position>,
    metric: ChannelVariances,
}

impl From<KnnIndexData> for KnnIndex {
    fn from(d: KnnIndexData) -> Self {
        KnnIndex::assemble(d.points, d.labels, d.metric)
    }
}

impl From<KnnIndex> for KnnIndexData {
    fn from(k: KnnIndex) -> Self {
        KnnIndexData {
            points: k.points,
            labels: k.labels,
            metric: k.metric,
        }
    }
}

impl KnnIndex {
    fn assemble(points: Vec<Vec<f64>>, labels: Vec<Position>, metric: ChannelVariances) -> Self {
        let inv_std: Vec<f64> = metric.std().iter().map(|s| 1.0 / s).collect();
        let scaled = points.iter().map(|p| scale(p, &inv_std)).collect();
        KnnIndex {
            tree: KdTree::new(scaled),
            points,
            labels,
            metric,
            inv_std,
        }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[Position] {
        &self.labels
    }

    pub fn metric(&self) -> &ChannelVariances {
        &self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Query point in the scaled space.
    pub fn scale_query(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(scale(x, &self.inv_std))
    }

    /// The `k` nearest training points; `dist2` is the squared Mahalanobis
    /// distance δ.
    pub fn neighbors(&self, x: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        if k == 0 || k > self.len() {
            return Err(Error::Invalid(format!(
                "k = {k} must be in 1..={}",
                self.len()
            )));
        }
        let q = self.scale_query(x)?;
        Ok(self.tree.knn(&q, k))
    }

    /// Same neighbors by a linear scan over the scaled points.
    pub fn neighbors_brute_force(&self, x: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        let q = self.scale_query(x)?;
        Ok(super::kdtree::brute_force_knn(self.tree.points(), &q, k))
    }
}

fn scale(p: &[f64], inv_std: &[f64]) -> Vec<f64> {
    p.iter().zip(inv_std).map(|(v, s)| v * s).collect()
}

/// Builds the index over `x` (M × D) with labels `y`.
pub fn build_knn_index(x: &[Vec<f64>], y: &[Position], metric: &ChannelVariances) -> Result<KnnIndex> {
    if x.is_empty() {
        return Err(Error::Invalid("kNN index needs at least one point".into()));
    }
    check_dim(x.len(), y.len())?;
    for row in x {
        check_dim(metric.dim(), row.len())?;
    }
    Ok(KnnIndex::assemble(x.to_vec(), y.to_vec(), metric.clone()))
}

/// Inverse-distance weighted mean of the `k` nearest labels, w = 1/(δ+ε).
pub fn predict_wknn(index: &KnnIndex, x: &[f64], k: usize, eps: f64) -> Result<Position> {
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("eps must be positive, got {eps}")));
    }
    let nn = index.neighbors(x, k)?;
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for n in &nn {
        let w = 1.0 / (n.dist2 + eps);
        let p = index.labels[n.index];
        sw += w;
        sx += w * p.x;
        sy += w * p.y;
    }
    Ok(Position::new(sx / sw, sy / sw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng as _;

    fn unit_metric(d: usize) -> ChannelVariances {
        ChannelVariances::from_variances(vec![1.0; d], 0.0).unwrap()
    }

    #[test]
    fn stored_point_is_first_at_zero() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 * 0.3, (i % 7) as f64]).collect();
        let y: Vec<Position> = (0..30).map(|i| Position::new(i as f64, 0.0)).collect();
        let idx = build_knn_index(&x, &y, &unit_metric(2)).unwrap();
        let nn = idx.neighbors(&x[11], 3).unwrap();
        assert_eq!((nn[0].index, nn[0].dist2), (11, 0.0));
    }

    #[test]
    fn thousand_points_match_brute_force() {
        let mut r = rng::rng(9);
        let d = 10;
        let x: Vec<Vec<f64>> = (0..1000).map(|_| (0..d).map(|_| r.random::<f64>()).collect()).collect();
        let y = vec![Position::new(0.0, 0.0); 1000];
        let var: Vec<f64> = (0..d).map(|_| r.random_range(0.1..4.0)).collect();
        let idx = build_knn_index(&x, &y, &ChannelVariances::from_variances(var, 0.0).unwrap()).unwrap();
        for _ in 0..100 {
            let q: Vec<f64> = (0..d).map(|_| r.random::<f64>()).collect();
            assert_eq!(idx.neighbors(&q, 7).unwrap(), idx.neighbors_brute_force(&q, 7).unwrap());
        }
    }

    #[test]
    fn huge_variance_channel_is_ignored() {
        // channel 1 carries large differences but has enormous variance
        let x = vec![
            vec![0.0, 50.0],
            vec![1.0, 0.0],
            vec![2.0, -50.0],
            vec![3.0, 10.0],
        ];
        let y = vec![Position::new(0.0, 0.0); 4];
        let plain = build_knn_index(&x, &y, &unit_metric(2)).unwrap();
        let scaled = build_knn_index(
            &x,
            &y,
            &ChannelVariances::from_variances(vec![1.0, 1e8], 0.0).unwrap(),
        )
        .unwrap();
        let q = [0.1, 0.0];
        let order = |i: &KnnIndex| i.neighbors(&q, 4).unwrap().iter().map(|n| n.index).collect::<Vec<_>>();
        assert_eq!(order(&plain)[0], 1);
        assert_eq!(order(&scaled), vec![0, 1, 2, 3]);
    }

    #[test]
    fn hand_cases() {
        let x = vec![vec![0.0], vec![2.0], vec![10.0]];
        let y = vec![Position::new(0.0, 0.0), Position::new(2.0, 0.0), Position::new(9.0, 9.0)];
        let idx = build_knn_index(&x, &y, &unit_metric(1)).unwrap();
        let p = predict_wknn(&idx, &[1.0], 2, DEFAULT_EPS).unwrap();
        assert_eq!((p.x, p.y), (1.0, 0.0));
        let p = predict_wknn(&idx, &[7.0], 1, DEFAULT_EPS).unwrap();
        assert_eq!((p.x, p.y), (9.0, 9.0));
        let p = predict_wknn(&idx, &[2.0], 3, DEFAULT_EPS).unwrap();
        assert!((p.x - 2.0).abs() < 1e-6 && p.y.abs() < 1e-6);
        assert!(predict_wknn(&idx, &[2.0], 4, DEFAULT_EPS).is_err());
        assert!(predict_wknn(&idx, &[2.0, 1.0], 1, DEFAULT_EPS).is_err());
    }

    #[test]
    fn serde_rebuilds_tree() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos()]).collect();
        let y: Vec<Position> = (0..40).map(|i| Position::new(i as f64, -(i as f64))).collect();
        let idx = build_knn_index(&x, &y, &unit_metric(2)).unwrap();
        let back: KnnIndex = serde_json::from_str(&serde_json::to_string(&idx).unwrap()).unwrap();
        for q in [[0.1, 0.2], [-0.5, 0.9]] {
            let a = predict_wknn(&idx, &q, 5, DEFAULT_EPS).unwrap();
            let b = predict_wknn(&back, &q, 5, DEFAULT_EPS).unwrap();
            assert_eq!((a.x.to_bits(), a.y.to_bits()), (b.x.to_bits(), b.y.to_bits()));
        }
    }

    proptest! {
        #[test]
        fn prediction_in_neighbor_box(
            pts in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 0.0..10.0f64, 0.0..10.0f64), 3..60),
            q in (-6.0..6.0f64, -6.0..6.0f64),
            k in 1usize..8,
        ) {
            let x: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.0, p.1]).collect();
            let y: Vec<Position> = pts.iter().map(|p| Position::new(p.2, p.3)).collect();
            let k = k.min(x.len());
            let idx = build_knn_index(&x, &y, &unit_metric(2)).unwrap();
            let nn = idx.neighbors(&[q.0, q.1], k).unwrap();
            let p = predict_wknn(&idx, &[q.0, q.1], k, DEFAULT_EPS).unwrap();
            // each coordinate is a convex combination, so it stays within the
            // neighbors' coordinate range
            let xs: Vec<f64> = nn.iter().map(|n| y[n.index].x).collect();
            let ys: Vec<f64> = nn.iter().map(|n| y[n.index].y).collect();
            let tol = 1e-9;
            prop_assert!(p.x >= xs.iter().cloned().fold(f64::MAX, f64::min) - tol);
            prop_assert!(p.x <= xs.iter().cloned().fold(f64::MIN, f64::max) + tol);
            prop_assert!(p.y >= ys.iter().cloned().fold(f64::MAX, f64::min) - tol);
            prop_assert!(p.y <= ys.iter().cloned().fold(f64::MIN, f64::max) + tol);
        }

        #[test]
        fn uniform_variance_scaling_keeps_ranking(
            pts in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 3), 2..50),
            var in prop::collection::vec(0.1..5.0f64, 3),
            c in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0, 16.0]),
        ) {
            let y = vec![Position::new(0.0, 0.0); pts.len()];
            let a = build_knn_index(&pts, &y, &ChannelVariances::from_variances(var.clone(), 0.0).unwrap()).unwrap();
            let scaled: Vec<f64> = var.iter().map(|v| v * c).collect();
            let b = build_knn_index(&pts, &y, &ChannelVariances::from_variances(scaled, 0.0).unwrap()).unwrap();
            let q = [0.3, -0.2, 1.1];
            let ia: Vec<usize> = a.neighbors(&q, pts.len()).unwrap().iter().map(|n| n.index).collect();
            let ib: Vec<usize> = b.neighbors(&q, pts.len()).unwrap().iter().map(|n| n.index).collect();
            prop_assert_eq!(ia, ib);
        }
    }
}
