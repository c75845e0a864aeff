//! Exact k-nearest-neighbor search with a bucketed kd-tree.
//!
//! Distances are squared Euclidean in the stored coordinates. Ties are broken
//! by the lower point index, so results are a deterministic function of the
//! point set and match a brute-force scan exactly.

const BUCKET: usize = 8;

#[derive(Debug, Clone)]
enum KdNode {
    Leaf { start: usize, end: usize },
    Split { dim: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    points: Vec<Vec<f64>>,
    /// Permutation of point indices; leaves own contiguous ranges.
    order: Vec<usize>,
    nodes: Vec<KdNode>,
}

/// A neighbor: squared distance and point index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub dist2: f64,
    pub index: usize,
}

impl Neighbor {
    fn key_lt(&self, other: &Neighbor) -> bool {
        self.dist2 < other.dist2 || (self.dist2 == other.dist2 && self.index < other.index)
    }
}

/// Squared Euclidean distance, summed in coordinate order.
#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

impl KdTree {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        let dim = points.first().map_or(0, Vec::len);
        let mut tree = KdTree {
            dim,
            order: (0..points.len()).collect(),
            points,
            nodes: Vec::new(),
        };
        if !tree.points.is_empty() {
            let n = tree.points.len();
            tree.build(0, n);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        if end - start <= BUCKET || self.dim == 0 {
            self.nodes.push(KdNode::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        // split on the widest dimension at the median
        let mut best = (0usize, -1.0f64);
        for d in 0..self.dim {
            let (lo, hi) = self.order[start..end].iter().fold((f64::MAX, f64::MIN), |(lo, hi), &i| {
                (lo.min(self.points[i][d]), hi.max(self.points[i][d]))
            });
            if hi - lo > best.1 {
                best = (d, hi - lo);
            }
        }
        let dim = best.0;
        if best.1 <= 0.0 {
            self.nodes.push(KdNode::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        let mid = start + (end - start) / 2;
        let pts = &self.points;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a][dim].total_cmp(&pts[b][dim]).then(a.cmp(&b))
        });
        let value = self.points[self.order[mid]][dim];
        let at = self.nodes.len();
        self.nodes.push(KdNode::Leaf { start, end });
        // left holds [start, mid) with values <= value, right [mid, end) with values >= value
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[at] = KdNode::Split {
            dim,
            value,
            left,
            right,
        };
        at
    }

    /// The `k` nearest points to `query`, closest first.
    pub fn knn(&self, query: &[f64], k: usize) -> Vec<Neighbor> {
        let k = k.min(self.points.len());
        let mut best: Vec<Neighbor> = Vec::with_capacity(k + 1);
        if k > 0 {
            self.search(0, query, k, &mut best);
        }
        best
    }

    fn push(best: &mut Vec<Neighbor>, k: usize, cand: Neighbor) {
        if best.len() == k && !cand.key_lt(&best[k - 1]) {
            return;
        }
        let pos = best.partition_point(|b| b.key_lt(&cand));
        best.insert(pos, cand);
        best.truncate(k);
    }

    fn search(&self, node: usize, q: &[f64], k: usize, best: &mut Vec<Neighbor>) {
        match self.nodes[node] {
            KdNode::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let cand = Neighbor {
                        dist2: dist2(q, &self.points[i]),
                        index: i,
                    };
                    Self::push(best, k, cand);
                }
            }
            KdNode::Split { dim, value, left, right } => {
                let diff = q[dim] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, k, best);
                // points across the plane are at least diff² away; equal bounds are
                // still visited so lower-index ties are found
                if best.len() < k || diff * diff <= best[best.len() - 1].dist2 {
                    self.search(far, q, k, best);
                }
            }
        }
    }
}

/// Reference linear scan with the same distance and tie rule.
pub fn brute_force_knn(points: &[Vec<f64>], query: &[f64], k: usize) -> Vec<Neighbor> {
    let mut all: Vec<Neighbor> = points
        .iter()
        .enumerate()
        .map(|(i, p)| Neighbor {
            dist2: dist2(query, p),
            index: i,
        })
        .collect();
    all.sort_by(|a, b| a.dist2.total_cmp(&b.dist2).then(a.index.cmp(&b.index)));
    all.truncate(k);
    all
}
