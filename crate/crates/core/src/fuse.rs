//! Evidence fusion over a floor grid.
//!
//! Each regressor's point estimate becomes a basic belief assignment (BBA)
//! over grid cells plus the whole frame Θ. The two BBAs are combined with
//! Dempster's rule, and the fused masses give both a point estimate and a
//! belief map. A two-source Choquet integral and a fixed convex blend are
//! available as alternative fusion modes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datamodel::{Bounds, Position};
use crate::error::{Error, Result};

/// Conflict at or above `1 − TOTAL_CONFLICT_EPS` is treated as total.
pub const TOTAL_CONFLICT_EPS: f64 = 1e-12;
/// Default mass kept on Θ by [`bba_from_point`].
pub const DEFAULT_THETA_DISCOUNT: f64 = 0.05;

/// Square cells of width `h` tiling the floor, row-major from `(x_min, y_min)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    bounds: Bounds,
    h: f64,
    nx: usize,
    ny: usize,
    centroids: Vec<Position>,
}

fn cells_along(len: f64, h: f64) -> usize {
    ((len / h) - 1e-9).ceil().max(1.0) as usize
}

pub fn make_grid(bounds: Bounds, h: f64) -> Result<GridSpec> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Invalid(format!("cell width must be positive, got {h}")));
    }
    if !(bounds.width() > 0.0 && bounds.height() > 0.0) {
        return Err(Error::Invalid("grid bounds have zero area".into()));
    }
    let nx = cells_along(bounds.width(), h);
    let ny = cells_along(bounds.height(), h);
    let mid = |lo: f64, hi: f64, i: usize| {
        let a = lo + i as f64 * h;
        let b = (lo + (i + 1) as f64 * h).min(hi);
        a + (b - a) / 2.0
    };
    let mut centroids = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            centroids.push(Position::new(
                mid(bounds.x_min, bounds.x_max, ix),
                mid(bounds.y_min, bounds.y_max, iy),
            ));
        }
    }
    Ok(GridSpec {
        bounds,
        h,
        nx,
        ny,
        centroids,
    })
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn centroids(&self) -> &[Position] {
        &self.centroids
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `(columns, rows)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Distance from `p` to the nearest centroid.
    pub fn min_dist(&self, p: &Position) -> f64 {
        self.centroids
            .iter()
            .map(|c| c.dist(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Masses on single cells plus the mass on Θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bba {
    pub singleton: Vec<f64>,
    pub theta: f64,
}

impl Bba {
    pub fn new(singleton: Vec<f64>, theta: f64) -> Result<Self> {
        let b = Bba { singleton, theta };
        b.validate()?;
        Ok(b)
    }

    /// All mass on Θ.
    pub fn vacuous(s: usize) -> Self {
        Bba {
            singleton: vec![0.0; s],
            theta: 1.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.singleton.iter().sum::<f64>() + self.theta
    }

    pub fn validate(&self) -> Result<()> {
        if self.singleton.iter().chain([&self.theta]).any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::Invalid("belief masses must be finite and non-negative".into()));
        }
        if (self.total() - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("belief masses sum to {}", self.total())));
        }
        Ok(())
    }
}

/// Softmax of `−α·‖r̂ − c_j‖` over cells, scaled by `1 − theta_discount`,
/// with `theta_discount` left on Θ.
pub fn bba_from_point(r_hat: &Position, grid: &GridSpec, alpha: f64, theta_discount: f64) -> Result<Bba> {
    if !(alpha > 0.0) {
        return Err(Error::Invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(0.0..1.0).contains(&theta_discount) {
        return Err(Error::Invalid(format!("theta discount must be in [0, 1), got {theta_discount}")));
    }
    let d: Vec<f64> = grid.centroids.iter().map(|c| c.dist(r_hat)).collect();
    let d_min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut m: Vec<f64> = d.iter().map(|di| (-alpha * (di - d_min)).exp()).collect();
    let z: f64 = m.iter().sum();
    let keep = 1.0 - theta_discount;
    m.iter_mut().for_each(|v| *v = *v / z * keep);
    Ok(Bba {
        singleton: m,
        theta: theta_discount,
    })
}

/// Dempster's rule over singletons and Θ.
pub fn dempster_combine(m1: &Bba, m2: &Bba) -> Result<Bba> {
    if m1.singleton.len() != m2.singleton.len() {
        return Err(Error::Dimension {
            expected: m1.singleton.len(),
            got: m2.singleton.len(),
        });
    }
    let s2: f64 = m2.singleton.iter().sum();
    // K = Σ_{i≠j} m1_i·m2_j, accumulated from non-negative terms
    let conflict: f64 = m1
        .singleton
        .iter()
        .zip(&m2.singleton)
        .map(|(a, b)| a * (s2 - b).max(0.0))
        .sum();
    if conflict >= 1.0 - TOTAL_CONFLICT_EPS {
        return Err(Error::TotalConflict(conflict));
    }
    let norm = 1.0 - conflict;
    let singleton = m1
        .singleton
        .iter()
        .zip(&m2.singleton)
        .map(|(a, b)| (a * b + a * m2.theta + m1.theta * b) / norm)
        .collect();
    Ok(Bba {
        singleton,
        theta: m1.theta * m2.theta / norm,
    })
}

/// Cell with the largest singleton mass (lowest index on ties) and its centroid.
pub fn argmax_belief(m: &Bba, grid: &GridSpec) -> (usize, Position) {
    let mut best = 0;
    for (j, v) in m.singleton.iter().enumerate() {
        if *v > m.singleton[best] {
            best = j;
        }
    }
    (best, grid.centroids[best])
}

/// Centroids averaged with weights equal to the singleton masses.
pub fn fused_point(m: &Bba, grid: &GridSpec) -> Position {
    let total: f64 = m.singleton.iter().sum();
    if !(total > 0.0) {
        return argmax_belief(m, grid).1;
    }
    let (mut x, mut y) = (0.0, 0.0);
    for (w, c) in m.singleton.iter().zip(&grid.centroids) {
        x += w * c.x;
        y += w * c.y;
    }
    Position::new(x / total, y / total)
}

/// `exp(−β · distance to the nearest centroid)`.
pub fn confidence(r_hat: &Position, grid: &GridSpec, beta: f64) -> f64 {
    (-beta * grid.min_dist(r_hat)).exp()
}

/// `1 / median(distances)`; falls back to 1 when the median is zero.
pub fn fit_beta(min_dists: &[f64]) -> Result<f64> {
    if min_dists.is_empty() {
        return Err(Error::Invalid("beta needs at least one distance".into()));
    }
    let mut v = min_dists.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let med = if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    };
    Ok(if med > 0.0 { 1.0 / med } else { 1.0 })
}

/// Fuzzy measure on two sources; `μ(Ω) = 1` implicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoquetMeasure {
    pub mu1: f64,
    pub mu2: f64,
}

impl Default for ChoquetMeasure {
    fn default() -> Self {
        ChoquetMeasure { mu1: 0.5, mu2: 0.5 }
    }
}

/// Two-source Choquet integral.
pub fn choquet(s1: f64, s2: f64, m: &ChoquetMeasure) -> f64 {
    if s1 <= s2 {
        s1 + (s2 - s1) * m.mu2
    } else {
        s2 + (s1 - s2) * m.mu1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoquetFit {
    pub measure: ChoquetMeasure,
    /// False when the data carry no information about some coordinate.
    pub identifiable: bool,
    pub sse: f64,
}

/// Box-constrained least squares for `(μ1, μ2)` by projected coordinate descent.
pub fn fit_choquet_measure(scores: &[(f64, f64)], targets: &[f64]) -> Result<ChoquetFit> {
    if scores.len() != targets.len() {
        return Err(Error::Dimension {
            expected: scores.len(),
            got: targets.len(),
        });
    }
    if scores.len() < 2 {
        return Err(Error::Invalid("Choquet fit needs at least 2 rows".into()));
    }
    let sse = |m: &ChoquetMeasure| {
        scores
            .iter()
            .zip(targets)
            .map(|(s, t)| (choquet(s.0, s.1, m) - t).powi(2))
            .sum::<f64>()
    };
    // Rows with s1 > s2 involve only μ1 and rows with s2 > s1 only μ2, so each
    // coordinate step is an exact clamped 1-D least-squares solve.
    let step = |first: bool| -> Option<f64> {
        let (mut num, mut den) = (0.0, 0.0);
        for ((s1, s2), t) in scores.iter().zip(targets) {
            let (hi, lo) = if first { (s1, s2) } else { (s2, s1) };
            let gap = hi - lo;
            if gap > 0.0 {
                num += (t - lo) * gap;
                den += gap * gap;
            }
        }
        (den > 0.0).then(|| (num / den).clamp(0.0, 1.0))
    };
    let mut m = ChoquetMeasure::default();
    let mut identifiable = true;
    for _ in 0..100 {
        let before = m;
        match step(true) {
            Some(v) => m.mu1 = v,
            None => identifiable = false,
        }
        match step(false) {
            Some(v) => m.mu2 = v,
            None => identifiable = false,
        }
        if (m.mu1 - before.mu1).abs().max((m.mu2 - before.mu2).abs()) < 1e-9 {
            break;
        }
    }
    Ok(ChoquetFit {
        sse: sse(&m),
        measure: m,
        identifiable,
    })
}

/// Weight on the RF estimate in Choquet mode: `s_RF·μ1 / (s_RF·μ1 + s_KNN·μ2)`.
pub fn choquet_lambda(s_rf: f64, s_knn: f64, m: &ChoquetMeasure) -> f64 {
    let a = s_rf * m.mu1;
    let den = a + s_knn * m.mu2;
    if den > 0.0 {
        (a / den).clamp(0.0, 1.0)
    } else {
        0.5
    }
}

/// `λ·r1 + (1 − λ)·r2`.
pub fn convex_combo(r1: &Position, r2: &Position, lambda: f64) -> Position {
    if lambda == 1.0 {
        return *r1;
    }
    if lambda == 0.0 {
        return *r2;
    }
    Position::new(
        lambda * r1.x + (1.0 - lambda) * r2.x,
        lambda * r1.y + (1.0 - lambda) * r2.y,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    #[default]
    Dst,
    Choquet,
    Convex,
}

impl std::str::FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dst" => Ok(FusionMode::Dst),
            "choquet" => Ok(FusionMode::Choquet),
            "convex" => Ok(FusionMode::Convex),
            other => Err(Error::Invalid(format!("unknown fusion mode `{other}`"))),
        }
    }
}

/// `cell_index,cx,cy,mass` rows.
pub fn write_belief_csv(m: &Bba, grid: &GridSpec, w: &mut impl Write) -> Result<()> {
    writeln!(w, "cell_index,cx,cy,mass")?;
    for (j, (c, v)) in grid.centroids.iter().zip(&m.singleton).enumerate() {
        writeln!(w, "{j},{},{},{}", c.x, c.y, v)?;
    }
    Ok(())
}

/// Binary 8-bit PGM, one pixel per cell in grid order, mass scaled so the
/// largest mass is 255.
pub fn write_belief_pgm(m: &Bba, grid: &GridSpec, w: &mut impl Write) -> Result<()> {
    let (nx, ny) = grid.shape();
    let peak = m.singleton.iter().copied().fold(0.0, f64::max);
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    let px: Vec<u8> = m
        .singleton
        .iter()
        .map(|v| if peak > 0.0 { (v / peak * 255.0).round() as u8 } else { 0 })
        .collect();
    w.write_all(&px)?;
    Ok(())
}

/// Writes `<stem>.csv` and `<stem>.pgm`.
pub fn export_belief_map(m: &Bba, grid: &GridSpec, stem: impl AsRef<Path>) -> Result<()> {
    let stem = stem.as_ref();
    let mut csv = std::io::BufWriter::new(std::fs::File::create(stem.with_extension("csv"))?);
    write_belief_csv(m, grid, &mut csv)?;
    csv.flush()?;
    let mut pgm = std::io::BufWriter::new(std::fs::File::create(stem.with_extension("pgm"))?);
    write_belief_pgm(m, grid, &mut pgm)?;
    pgm.flush()?;
    Ok(())
}
