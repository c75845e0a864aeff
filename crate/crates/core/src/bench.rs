//! Latency measurement for the online path and its scaling in the forest
//! size `T`, particle count `M_p` and grid size `S`.

use std::hint::black_box;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{FilterMethod, StreamFilter};
use crate::fuse::{bba_from_point, dempster_combine, fused_point, make_grid};
use crate::pipeline::{Pipeline, ROLE_ONLINE};
use crate::preprocess::NormMode;
use crate::regress::{predict_wknn, RfModel};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub n_queries: usize,
    /// Forest sizes; each must not exceed the model's tree count.
    pub trees: Vec<usize>,
    pub particles: Vec<usize>,
    /// Cell-width multipliers of the model's `h`; 1/√2 steps double `S`.
    pub cell_scales: Vec<f64>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            n_queries: 200,
            trees: vec![25, 50, 100, 200],
            particles: vec![2_500, 5_000, 10_000, 20_000],
            cell_scales: vec![2.0, 2.0 * r, 1.0, r],
            seed: 123,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageLatency {
    pub stage: String,
    pub median_s: f64,
}

/// Median latency against a parameter, with the least-squares slope of
/// log-latency on log-parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub parameter: String,
    pub values: Vec<f64>,
    pub median_s: Vec<f64>,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub n_queries: usize,
    pub stages: Vec<StageLatency>,
    pub scaling: Vec<Scaling>,
    /// Filter-step median for PF at 10⁴ particles over KF.
    pub pf_kf_ratio: f64,
    /// Filter-step median with filtering disabled.
    pub none_filter_median_s: f64,
}

impl BenchReport {
    pub fn scaling(&self, parameter: &str) -> Option<&Scaling> {
        self.scaling.iter().find(|s| s.parameter == parameter)
    }

    pub fn stage(&self, stage: &str) -> Option<f64> {
        self.stages.iter().find(|s| s.stage == stage).map(|s| s.median_s)
    }
}

/// Raw scans drawn around the training distribution.
pub fn probe_scans(model: &Pipeline, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::rng(seed);
    let norm = &model.pre.norm;
    (0..n)
        .map(|_| {
            (0..norm.dim())
                .map(|i| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    let v = norm.mu()[i] + norm.sigma()[i] * z;
                    match norm.mode() {
                        NormMode::DbmZscore => v,
                        NormMode::MwZscore => 10.0 * v.max(1e-12).log10(),
                    }
                })
                .collect()
        })
        .collect()
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Slope of `ln y` on `ln x` by ordinary least squares.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn time_each<T>(items: &[T], mut f: impl FnMut(&T)) -> f64 {
    let mut t: Vec<f64> = items
        .iter()
        .map(|x| {
            let t0 = Instant::now();
            f(x);
            t0.elapsed().as_secs_f64()
        })
        .collect();
    median(&mut t)
}

fn filter_median(model: &Pipeline, method: FilterMethod, particles: Option<usize>, z: &[Vec<f64>]) -> Result<f64> {
    let mut cfg = model.pre.filter.clone();
    cfg.method = method;
    if let Some(m) = particles {
        cfg.pf.n_particles = m;
    }
    let mut f = StreamFilter::new(cfg, (ROLE_ONLINE << 32) | 0xBE7C)?;
    let mut err = None;
    let m = time_each(z, |x| {
        if let Err(e) = f.step(x) {
            err = Some(e);
        }
    });
    err.map_or(Ok(m), Err)
}

/// Per-stage medians of the online path plus the scaling sweeps.
pub fn run_bench(model: &Pipeline, cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.n_queries == 0 {
        return Err(Error::Invalid("bench needs at least one query".into()));
    }
    let raw = probe_scans(model, cfg.n_queries, cfg.seed);
    let z: Vec<Vec<f64>> = raw.iter().map(|s| model.pre.norm.apply(s)).collect::<Result<_>>()?;

    let mut stages = Vec::new();
    stages.push(StageLatency {
        stage: "normalize".into(),
        median_s: time_each(&raw, |s| {
            black_box(model.pre.norm.apply(s).ok());
        }),
    });
    stages.push(StageLatency {
        stage: "filter".into(),
        median_s: filter_median(model, model.pre.filter.method, None, &z)?,
    });
    stages.push(StageLatency {
        stage: "topology".into(),
        median_s: time_each(&z, |x| {
            black_box(model.featurize(std::slice::from_ref(x)).ok());
        }),
    });
    let x = model.featurize(&z)?;
    stages.push(StageLatency {
        stage: "forest".into(),
        median_s: time_each(&x, |v| {
            black_box(model.rf.predict(v).ok());
        }),
    });
    let rf: Vec<_> = x.iter().map(|v| model.rf.predict(v)).collect::<Result<_>>()?;
    let pairs: Vec<_> = if let Some(index) = &model.knn {
        stages.push(StageLatency {
            stage: "knn".into(),
            median_s: time_each(&x, |v| {
                black_box(predict_wknn(index, v, model.config.k, model.config.eps).ok());
            }),
        });
        let knn: Vec<_> = x
            .iter()
            .map(|v| predict_wknn(index, v, model.config.k, model.config.eps))
            .collect::<Result<_>>()?;
        rf.iter().copied().zip(knn).collect()
    } else {
        rf.iter().map(|p| (*p, *p)).collect()
    };
    let fz = &model.config.fusion;
    let dst = |grid: &crate::fuse::GridSpec| {
        time_each(&pairs, |(a, b)| {
            let ma = bba_from_point(a, grid, fz.alpha, fz.theta_discount);
            let mb = bba_from_point(b, grid, fz.alpha, fz.theta_discount);
            if let (Ok(ma), Ok(mb)) = (ma, mb) {
                if let Ok(m) = dempster_combine(&ma, &mb) {
                    black_box(fused_point(&m, grid));
                }
            }
        })
    };
    stages.push(StageLatency {
        stage: "fusion".into(),
        median_s: dst(&model.grid),
    });
    stages.push(StageLatency {
        stage: "total".into(),
        median_s: {
            let mut online = model.online(true)?;
            time_each(&raw, |s| {
                black_box(online.step(s).ok());
            })
        },
    });

    let mut scaling = Vec::new();
    let trees: Vec<usize> = cfg.trees.iter().copied().filter(|&t| t >= 1 && t <= model.rf.trees.len()).collect();
    if trees.len() >= 2 {
        let med: Vec<f64> = trees
            .iter()
            .map(|&t| {
                let sub = RfModel {
                    trees: model.rf.trees[..t].to_vec(),
                    config: model.rf.config.clone(),
                    n_features: model.rf.n_features,
                };
                time_each(&x, |v| {
                    black_box(sub.predict(v).ok());
                })
            })
            .collect();
        let values: Vec<f64> = trees.iter().map(|&t| t as f64).collect();
        scaling.push(Scaling {
            parameter: "trees".into(),
            slope: log_log_slope(&values, &med),
            values,
            median_s: med,
        });
    }
    if cfg.particles.len() >= 2 {
        let med = cfg
            .particles
            .iter()
            .map(|&m| filter_median(model, FilterMethod::Pf, Some(m), &z))
            .collect::<Result<Vec<f64>>>()?;
        let values: Vec<f64> = cfg.particles.iter().map(|&m| m as f64).collect();
        scaling.push(Scaling {
            parameter: "particles".into(),
            slope: log_log_slope(&values, &med),
            values,
            median_s: med,
        });
    }
    if cfg.cell_scales.len() >= 2 {
        let grids = cfg
            .cell_scales
            .iter()
            .map(|s| make_grid(model.grid.bounds(), model.grid.h() * s))
            .collect::<Result<Vec<_>>>()?;
        let med: Vec<f64> = grids.iter().map(&dst).collect();
        let values: Vec<f64> = grids.iter().map(|g| g.len() as f64).collect();
        scaling.push(Scaling {
            parameter: "cells".into(),
            slope: log_log_slope(&values, &med),
            values,
            median_s: med,
        });
    }

    let pf = filter_median(model, FilterMethod::Pf, Some(10_000), &z)?;
    let kf = filter_median(model, FilterMethod::Kf, None, &z)?;
    let none = filter_median(model, FilterMethod::None, None, &z)?;
    Ok(BenchReport {
        n_queries: cfg.n_queries,
        stages,
        scaling,
        pf_kf_ratio: pf / kf,
        none_filter_median_s: none,
    })
}
