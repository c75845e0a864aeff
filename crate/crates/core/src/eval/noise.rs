//! Test-time perturbations.
//!
//! Jitter and bursty outliers act on normalized vectors; the dBm model acts
//! on raw readings before normalization. Every function returns a new vector
//! and leaves its input untouched.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// `z̃_i + η·σ̂_i·ε_i`, ε ~ N(0, 1).
pub fn inject_gauss_jitter(z: &[f64], sigma_hat: &[f64], eta: f64, rng: &mut Rng) -> Vec<f64> {
    z.iter()
        .zip(sigma_hat)
        .map(|(v, s)| {
            let e: f64 = rng.sample(StandardNormal);
            v + eta * s * e
        })
        .collect()
}

/// Standard Laplace draw by inverse CDF.
fn laplace(rng: &mut Rng) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    -u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// With probability `p` per channel, add `κ·σ̂_i·u`, u ~ Laplace(0, 1).
pub fn inject_bursty(z: &[f64], sigma_hat: &[f64], p: f64, kappa: f64, rng: &mut Rng) -> Vec<f64> {
    z.iter()
        .zip(sigma_hat)
        .map(|(v, s)| {
            let hit = rng.random::<f64>() < p;
            let u = laplace(rng);
            if hit {
                v + kappa * s * u
            } else {
                *v
            }
        })
        .collect()
}

/// Raw-dBm perturbation with per-channel std `level·σ_i`.
pub fn inject_dbm_10pct(f_raw: &[f64], sigma_train: &[f64], level: f64, rng: &mut Rng) -> Vec<f64> {
    f_raw
        .iter()
        .zip(sigma_train)
        .map(|(v, s)| {
            let e: f64 = StandardNormal.sample(rng);
            v + level * s * e
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    GaussJitter { eta: f64 },
    Bursty { p: f64, kappa: f64 },
    #[serde(rename = "dbm_10pct")]
    Dbm { level: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub kind: NoiseKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    123
}

impl NoiseSpec {
    pub fn gauss(eta: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::GaussJitter { eta },
            seed,
        }
    }

    pub fn bursty(p: f64, kappa: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Bursty { p, kappa },
            seed,
        }
    }

    pub fn dbm(level: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Dbm { level },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            NoiseKind::GaussJitter { eta } => eta >= 0.0,
            NoiseKind::Bursty { p, kappa } => (0.0..=1.0).contains(&p) && kappa >= 0.0,
            NoiseKind::Dbm { level } => level >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("invalid noise parameters: {self:?}")))
        }
    }

    /// Short label used in reports, e.g. `gauss_jitter(eta=0.1)`.
    pub fn label(&self) -> String {
        match self.kind {
            NoiseKind::GaussJitter { eta } => format!("gauss_jitter(eta={eta})"),
            NoiseKind::Bursty { p, kappa } => format!("bursty(p={p},kappa={kappa})"),
            NoiseKind::Dbm { level } => format!("dbm_10pct(level={level})"),
        }
    }

    /// True for the raw-dBm model, which applies before normalization.
    pub fn is_raw(&self) -> bool {
        matches!(self.kind, NoiseKind::Dbm { .. })
    }

    /// Generator for one sample; independent of processing order.
    pub fn rng_for(&self, sample: u64) -> Rng {
        let tag = match self.kind {
            NoiseKind::GaussJitter { .. } => 1,
            NoiseKind::Bursty { .. } => 2,
            NoiseKind::Dbm { .. } => 3,
        };
        rng::rng_from(self.seed, &[tag, sample])
    }

    /// Applies the raw-dBm model; other kinds return the input unchanged.
    pub fn apply_raw(&self, f: &[f64], sigma_train: &[f64], sample: u64) -> Vec<f64> {
        match self.kind {
            NoiseKind::Dbm { level } => inject_dbm_10pct(f, sigma_train, level, &mut self.rng_for(sample)),
            _ => f.to_vec(),
        }
    }

    /// Applies a normalized-space model; the raw model returns the input unchanged.
    pub fn apply_normalized(&self, z: &[f64], sigma_hat: &[f64], sample: u64) -> Vec<f64> {
        match self.kind {
            NoiseKind::GaussJitter { eta } => inject_gauss_jitter(z, sigma_hat, eta, &mut self.rng_for(sample)),
            NoiseKind::Bursty { p, kappa } => inject_bursty(z, sigma_hat, p, kappa, &mut self.rng_for(sample)),
            NoiseKind::Dbm { .. } => z.to_vec(),
        }
    }
}

/// The jitter grid η ∈ {0.05, 0.10, 0.20}.
pub fn jitter_grid(seed: u64) -> Vec<NoiseSpec> {
    [0.05, 0.10, 0.20].iter().map(|&e| NoiseSpec::gauss(e, seed)).collect()
}

/// Bursty grid p ∈ {0.02, 0.05} × κ ∈ {2, 3}.
pub fn bursty_grid(seed: u64) -> Vec<NoiseSpec> {
    let mut v = Vec::new();
    for p in [0.02, 0.05] {
        for k in [2.0, 3.0] {
            v.push(NoiseSpec::bursty(p, k, seed));
        }
    }
    v
}
