//! Component-wise cross-validated grid search.
//!
//! Components are swept one after another (filter, forest, k, fusion), each
//! holding the earlier winners fixed. Every candidate is scored by its mean
//! RMSE over RP-stratified folds of the training map; ties keep the earlier
//! candidate in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datamodel::{stratified_folds, Position, RadioMap};
use crate::error::{Error, Result};
use crate::eval::metrics::rmse_of;
use crate::filters::FilterMethod;
use crate::fuse::make_grid;
use crate::pipeline::{dst_point, ModelConfig, Preprocessor, ROLE_TRAIN};
use crate::preprocess::fit_channel_variances;
use crate::regress::{build_knn_index, predict_wknn, train_rf, RfModel};
use crate::topo::{augment, feature_rows, fit_ph_stats, PhFeatures};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvGrids {
    pub q_gamma: Vec<f64>,
    pub pf_particles: Vec<usize>,
    pub pf_tau: Vec<f64>,
    pub n_trees: Vec<usize>,
    pub max_depth: Vec<Option<usize>>,
    pub k: Vec<usize>,
    pub alpha: Vec<f64>,
    pub h: Vec<f64>,
}

impl Default for CvGrids {
    fn default() -> Self {
        Self {
            q_gamma: vec![0.25, 0.5, 1.0],
            pf_particles: vec![5_000, 10_000, 20_000],
            pf_tau: vec![0.3, 0.5],
            n_trees: vec![100, 200, 400],
            max_depth: vec![Some(16), Some(24), Some(28), None],
            k: vec![3, 5, 7, 9],
            alpha: vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
            h: vec![0.5, 0.75, 1.0],
        }
    }
}

impl CvGrids {
    /// Grids holding only the values already in `cfg`.
    pub fn fixed(cfg: &ModelConfig) -> Self {
        Self {
            q_gamma: vec![cfg.filter.q_gamma],
            pf_particles: vec![cfg.filter.pf.n_particles],
            pf_tau: vec![cfg.filter.pf.ess_tau],
            n_trees: vec![cfg.rf.n_trees],
            max_depth: vec![cfg.rf.max_depth],
            k: vec![cfg.k],
            alpha: vec![cfg.fusion.alpha],
            h: vec![cfg.fusion.h],
        }
    }
}

/// One scored candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTrial {
    pub stage: String,
    pub candidate: String,
    pub fold_rmse: Vec<f64>,
    pub mean_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    /// Input configuration with every winner filled in. Fusion grids are
    /// emptied so a refit keeps the selected α and h.
    pub config: ModelConfig,
    pub trials: Vec<CvTrial>,
}

struct Fold {
    x_train: Vec<Vec<f64>>,
    y_train: Vec<Position>,
    x_test: Vec<Vec<f64>>,
    y_test: Vec<Position>,
}

fn make_folds(rows: &[Vec<f64>], pos: &[Position], assign: &[usize], k: usize, use_ph: bool) -> Result<Vec<Fold>> {
    let feats: Option<Vec<PhFeatures>> = if use_ph { Some(feature_rows(rows)?) } else { None };
    (0..k)
        .map(|f| {
            let (tr, te): (Vec<usize>, Vec<usize>) = (0..rows.len()).partition(|&i| assign[i] != f);
            let featurize = |idx: &[usize]| -> Result<Vec<Vec<f64>>> {
                match &feats {
                    None => Ok(idx.iter().map(|&i| rows[i].clone()).collect()),
                    Some(ft) => {
                        let train_feats: Vec<PhFeatures> = tr.iter().map(|&i| ft[i]).collect();
                        let stats = fit_ph_stats(&train_feats)?;
                        idx.iter().map(|&i| augment(&rows[i], &ft[i], &stats)).collect()
                    }
                }
            };
            Ok(Fold {
                x_train: featurize(&tr)?,
                y_train: tr.iter().map(|&i| pos[i]).collect(),
                x_test: featurize(&te)?,
                y_test: te.iter().map(|&i| pos[i]).collect(),
            })
        })
        .collect()
}

fn rf_fold_errors(fold: &Fold, cfg: &ModelConfig) -> Result<(RfModel, Vec<Position>)> {
    let model = train_rf(&fold.x_train, &fold.y_train, &cfg.rf)?;
    let pred = fold.x_test.iter().map(|x| model.predict(x)).collect::<Result<_>>()?;
    Ok((model, pred))
}

fn fold_rmse(pred: &[Position], truth: &[Position]) -> f64 {
    let e: Vec<f64> = pred.iter().zip(truth).map(|(p, t)| p.dist(t)).collect();
    rmse_of(&e)
}

/// Picks the lowest mean; the first candidate wins ties.
fn select<T>(cands: &[(T, String)], scores: Vec<Vec<f64>>, stage: &str, trials: &mut Vec<CvTrial>) -> usize {
    let mut best = 0;
    let mut best_mean = f64::INFINITY;
    for (i, fold_rmse) in scores.into_iter().enumerate() {
        let mean_rmse = fold_rmse.iter().sum::<f64>() / fold_rmse.len() as f64;
        if mean_rmse < best_mean {
            best = i;
            best_mean = mean_rmse;
        }
        trials.push(CvTrial {
            stage: stage.into(),
            candidate: cands[i].1.clone(),
            fold_rmse,
            mean_rmse,
        });
    }
    best
}

fn filter_candidates(cfg: &ModelConfig, g: &CvGrids) -> Vec<(ModelConfig, String)> {
    let mut out = Vec::new();
    match cfg.filter.method {
        FilterMethod::None => out.push((cfg.clone(), "none".into())),
        FilterMethod::Kf | FilterMethod::Ukf => {
            for &q in &g.q_gamma {
                let mut c = cfg.clone();
                c.filter.q_gamma = q;
                out.push((c, format!("gamma={q}")));
            }
        }
        FilterMethod::Pf => {
            for &m in &g.pf_particles {
                for &tau in &g.pf_tau {
                    let mut c = cfg.clone();
                    c.filter.pf.n_particles = m;
                    c.filter.pf.ess_tau = tau;
                    out.push((c, format!("particles={m},tau={tau}")));
                }
            }
        }
    }
    out
}

/// Runs the sequential search on `train` with `folds` RP-stratified folds.
pub fn cv_grid_search(
    train: &RadioMap,
    base: &ModelConfig,
    grids: &CvGrids,
    folds: usize,
    seed: u64,
) -> Result<CvResult> {
    let nonempty = [
        grids.n_trees.len(),
        grids.max_depth.len(),
        grids.k.len(),
        grids.alpha.len(),
        grids.h.len(),
    ];
    if nonempty.contains(&0) {
        return Err(Error::Invalid("every cross-validation grid needs at least one value".into()));
    }
    let assign = stratified_folds(train, folds, seed)?;
    let pos = train.positions();
    let mut trials = Vec::new();

    // filter
    let cands = filter_candidates(base, grids);
    if cands.is_empty() {
        return Err(Error::Invalid("empty filter grid".into()));
    }
    let mut scores = Vec::new();
    for (c, _) in &cands {
        let pre = Preprocessor::fit(train, c.norm_mode, &c.filter)?;
        let rows = pre.denoise(train, ROLE_TRAIN, None)?;
        let fs = make_folds(&rows, &pos, &assign, folds, c.use_ph)?;
        scores.push(
            fs.iter()
                .map(|f| rf_fold_errors(f, c).map(|(_, p)| fold_rmse(&p, &f.y_test)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut cfg = cands[select(&cands, scores, "filter", &mut trials)].0.clone();

    let pre = Preprocessor::fit(train, cfg.norm_mode, &cfg.filter)?;
    let rows = pre.denoise(train, ROLE_TRAIN, None)?;
    let fs = make_folds(&rows, &pos, &assign, folds, cfg.use_ph)?;

    // forest
    let mut cands = Vec::new();
    for &t in &grids.n_trees {
        for &d in &grids.max_depth {
            let mut c = cfg.clone();
            c.rf.n_trees = t;
            c.rf.max_depth = d;
            let depth = d.map_or("none".to_string(), |v| v.to_string());
            cands.push((c, format!("trees={t},depth={depth}")));
        }
    }
    let mut rf_preds = Vec::new();
    let mut scores: Vec<Vec<f64>> = Vec::new();
    for (c, _) in &cands {
        let preds: Vec<Vec<Position>> = fs.iter().map(|f| rf_fold_errors(f, c).map(|r| r.1)).collect::<Result<_>>()?;
        scores.push(preds.iter().zip(&fs).map(|(p, f)| fold_rmse(p, &f.y_test)).collect());
        rf_preds.push(preds);
    }
    let win = select(&cands, scores, "forest", &mut trials);
    cfg = cands[win].0.clone();
    let rf_pred = rf_preds.swap_remove(win);

    if !cfg.use_knn {
        return Ok(finish(cfg, trials));
    }

    // k
    let indices = fs
        .par_iter()
        .map(|f| {
            let metric = fit_channel_variances(&f.x_train)?;
            build_knn_index(&f.x_train, &f.y_train, &metric)
        })
        .collect::<Result<Vec<_>>>()?;
    let cands: Vec<(usize, String)> = grids.k.iter().map(|&k| (k, format!("k={k}"))).collect();
    let mut knn_preds = Vec::new();
    let mut scores = Vec::new();
    for &(k, _) in &cands {
        let preds: Vec<Vec<Position>> = fs
            .iter()
            .zip(&indices)
            .map(|(f, idx)| f.x_test.iter().map(|x| predict_wknn(idx, x, k, cfg.eps)).collect())
            .collect::<Result<_>>()?;
        scores.push(preds.iter().zip(&fs).map(|(p, f)| fold_rmse(p, &f.y_test)).collect::<Vec<f64>>());
        knn_preds.push(preds);
    }
    let win = select(&cands, scores, "k", &mut trials);
    cfg.k = cands[win].0;
    let knn_pred = &knn_preds[win];

    // fusion
    let mut cands = Vec::new();
    for &h in &grids.h {
        for &a in &grids.alpha {
            cands.push(((h, a), format!("h={h},alpha={a}")));
        }
    }
    let bounds = train.bounds();
    let scores = cands
        .iter()
        .map(|((h, a), _)| {
            let grid = make_grid(bounds, *h)?;
            fs.iter()
                .enumerate()
                .map(|(fi, f)| {
                    let e = rf_pred[fi]
                        .iter()
                        .zip(&knn_pred[fi])
                        .zip(&f.y_test)
                        .map(|((r, n), t)| dst_point(r, n, &grid, *a, cfg.fusion.theta_discount).map(|p| p.0.dist(t)))
                        .collect::<Result<Vec<f64>>>()?;
                    Ok(rmse_of(&e))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (h, a) = cands[select(&cands, scores, "fusion", &mut trials)].0;
    cfg.fusion.h = h;
    cfg.fusion.alpha = a;
    Ok(finish(cfg, trials))
}

fn finish(mut config: ModelConfig, trials: Vec<CvTrial>) -> CvResult {
    config.fusion.alpha_grid.clear();
    config.fusion.h_grid.clear();
    CvResult { config, trials }
}
