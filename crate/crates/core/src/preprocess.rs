//! Training-set normalization and channel statistics.
//!
//! Two physically consistent normalizations are supported: z-scoring directly
//! in dBm, or converting to linear power (mW) first and z-scoring there.
//! Statistics are fitted once on training data and are immutable afterwards;
//! validation and test data only ever pass through [`NormStats::apply`].

use serde::{Deserialize, Serialize};

use crate::datamodel::RadioMap;
use crate::error::{check_dim, Error, Result};

/// Replacement for a channel standard deviation below this value.
pub const SIGMA_FLOOR: f64 = 1e-9;
/// Diagonal shrinkage added to every channel variance.
pub const VARIANCE_SHRINKAGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    #[default]
    DbmZscore,
    MwZscore,
}

/// dBm to linear milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Per-channel mean and population standard deviation.
pub fn column_mean_std(rows: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Invalid("statistics need at least one row".into()))?;
    let d = first.len();
    let n = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for r in rows {
        check_dim(d, r.len())?;
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for r in rows {
        for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
    Ok((mean, std))
}

/// Fitted normalization statistics (μ, σ in dBm, or μ_p, σ_p in mW).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    mode: NormMode,
    mu: Vec<f64>,
    sigma: Vec<f64>,
    /// Channels whose σ was replaced by [`SIGMA_FLOOR`].
    floored: Vec<bool>,
}

impl NormStats {
    pub fn fit_rows(rows: &[Vec<f64>], mode: NormMode) -> Result<Self> {
        let (mu, std) = match mode {
            NormMode::DbmZscore => column_mean_std(rows)?,
            NormMode::MwZscore => {
                let p: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| r.iter().copied().map(dbm_to_mw).collect())
                    .collect();
                column_mean_std(&p)?
            }
        };
        let floored: Vec<bool> = std.iter().map(|s| *s < SIGMA_FLOOR).collect();
        let sigma = std.into_iter().map(|s| s.max(SIGMA_FLOOR)).collect();
        Ok(Self {
            mode,
            mu,
            sigma,
            floored,
        })
    }

    pub fn mode(&self) -> NormMode {
        self.mode
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn floored(&self) -> &[bool] {
        &self.floored
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Element-wise `(f − μ) / σ`, after the mW conversion in mW mode.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), f.len())?;
        Ok(f.iter()
            .zip(self.mu.iter().zip(&self.sigma))
            .map(|(&v, (m, s))| {
                let v = match self.mode {
                    NormMode::DbmZscore => v,
                    NormMode::MwZscore => dbm_to_mw(v),
                };
                (v - m) / s
            })
            .collect())
    }

    pub fn apply_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

/// Fits normalization statistics on the training fingerprints.
pub fn fit_norm_stats(train: &RadioMap, mode: NormMode) -> Result<NormStats> {
    NormStats::fit_rows(&train.rss_rows(), mode)
}

/// Diagonal metric of the weighted-kNN distance: per-channel sample variance
/// (unbiased) plus shrinkage, fitted in normalized space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelVariances {
    var: Vec<f64>,
    shrinkage: f64,
}

impl ChannelVariances {
    pub fn from_variances(var: Vec<f64>, shrinkage: f64) -> Result<Self> {
        if var.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Invalid("channel variances must be positive".into()));
        }
        Ok(Self { var, shrinkage })
    }

    pub fn var(&self) -> &[f64] {
        &self.var
    }

    pub fn shrinkage(&self) -> f64 {
        self.shrinkage
    }

    pub fn dim(&self) -> usize {
        self.var.len()
    }

    /// Per-channel σ̂ (square roots of the variances).
    pub fn std(&self) -> Vec<f64> {
        self.var.iter().map(|v| v.sqrt()).collect()
    }
}

/// Fits [`ChannelVariances`] on a normalized training matrix (M × d, M ≥ 2).
pub fn fit_channel_variances(train_normalized: &[Vec<f64>]) -> Result<ChannelVariances> {
    let m = train_normalized.len();
    if m < 2 {
        return Err(Error::Invalid(format!(
            "channel variances need at least 2 rows, got {m}"
        )));
    }
    let d = train_normalized[0].len();
    let mut mean = vec![0.0; d];
    for r in train_normalized {
        check_dim(d, r.len())?;
        for (a, v) in mean.iter_mut().zip(r) {
            *a += v;
        }
    }
    mean.iter_mut().for_each(|a| *a /= m as f64);
    let mut ss = vec![0.0; d];
    for r in train_normalized {
        for ((s, v), mu) in ss.iter_mut().zip(r).zip(&mean) {
            *s += (v - mu) * (v - mu);
        }
    }
    let var = ss
        .into_iter()
        .map(|s| s / (m - 1) as f64 + VARIANCE_SHRINKAGE)
        .collect();
    ChannelVariances::from_variances(var, VARIANCE_SHRINKAGE)
}
