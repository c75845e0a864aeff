//! End-to-end model: normalization, stream filtering, PH augmentation, the
//! two regressors and the fusion layer, plus its JSON artifact.
//!
//! Processing order for every sample is raw dBm → (raw noise) → normalize →
//! (normalized noise) → filter → augment → regress → fuse. Filtering runs on
//! per-RP streams in acquisition order, so a map's samples for one RP are
//! treated as consecutive scans at that location.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datamodel::{Bounds, MapMeta, Position, RadioMap};
use crate::error::{check_dim, Error, Result};
use crate::eval::metrics::rmse_of;
use crate::eval::noise::NoiseSpec;
use crate::filters::{filter_stream_with_id, FilterConfig, FilterMethod, PfConfig, StreamFilter, UkfParams};
use crate::fuse::{
    argmax_belief, bba_from_point, choquet_lambda, confidence, convex_combo, dempster_combine, fit_beta,
    fit_choquet_measure, fused_point, make_grid, Bba, ChoquetFit, FusionMode, GridSpec,
    DEFAULT_THETA_DISCOUNT,
};
use crate::preprocess::{column_mean_std, fit_channel_variances, ChannelVariances, NormMode, NormStats};
use crate::regress::{build_knn_index, predict_wknn, train_rf, KnnIndex, RfConfig, RfModel};
use crate::topo::{augment, feature_rows, fit_ph_stats};

/// Version written into every artifact.
pub const ARTIFACT_VERSION: u32 = 1;

/// Stream roles; filter seeds differ per role so train, validation, test
/// and online streams never share particle draws.
pub const ROLE_TRAIN: u64 = 0;
pub const ROLE_VAL: u64 = 1;
pub const ROLE_TEST: u64 = 2;
pub const ROLE_ONLINE: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterSettings {
    pub method: FilterMethod,
    pub q_gamma: f64,
    pub pf: PfConfig,
    pub ukf: UkfParams,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self {
            method: FilterMethod::Pf,
            q_gamma: 0.25,
            pf: PfConfig::default(),
            ukf: UkfParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionSettings {
    pub mode: FusionMode,
    pub alpha: f64,
    /// Cell width in meters.
    pub h: f64,
    pub theta_discount: f64,
    /// RF weight in convex mode.
    pub lambda: f64,
    /// When both grids are non-empty, (h, α) are chosen on the validation set.
    pub alpha_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
}

impl Default for FusionSettings {
    fn default() -> Self {
        Self {
            mode: FusionMode::Dst,
            alpha: 1.0,
            h: 0.5,
            theta_discount: DEFAULT_THETA_DISCOUNT,
            lambda: 0.5,
            alpha_grid: vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
            h_grid: vec![0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub norm_mode: NormMode,
    pub filter: FilterSettings,
    pub rf: RfConfig,
    pub k: usize,
    pub eps: f64,
    pub use_ph: bool,
    /// Without the kNN branch the RF estimate is returned unfused.
    pub use_knn: bool,
    pub fusion: FusionSettings,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            norm_mode: NormMode::DbmZscore,
            filter: FilterSettings::default(),
            rf: RfConfig::default(),
            k: 7,
            eps: crate::regress::DEFAULT_EPS,
            use_ph: true,
            use_knn: true,
            fusion: FusionSettings::default(),
        }
    }
}

/// Training-set statistics and the filter they calibrate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub norm: NormStats,
    /// Normalized-space channel variances; `R_i` is taken from these.
    pub variances: ChannelVariances,
    /// Per-channel std of the raw training dBm values.
    pub raw_sigma_dbm: Vec<f64>,
    pub filter: FilterConfig,
}

impl Preprocessor {
    pub fn fit(train: &RadioMap, mode: NormMode, settings: &FilterSettings) -> Result<Self> {
        let raw = train.rss_rows();
        let norm = NormStats::fit_rows(&raw, mode)?;
        let variances = fit_channel_variances(&norm.apply_rows(&raw)?)?;
        let (_, raw_sigma_dbm) = column_mean_std(&raw)?;
        let filter = FilterConfig {
            method: settings.method,
            q_gamma: settings.q_gamma,
            r: variances.var().to_vec(),
            pf: settings.pf,
            ukf: settings.ukf,
        };
        filter.validate()?;
        Ok(Self {
            norm,
            variances,
            raw_sigma_dbm,
            filter,
        })
    }

    pub fn dim(&self) -> usize {
        self.norm.dim()
    }

    /// Normalizes one raw scan, applying `noise` at its stage.
    pub fn normalize(&self, raw: &[f64], noise: Option<&NoiseSpec>, sample: u64) -> Result<Vec<f64>> {
        check_dim(self.dim(), raw.len())?;
        match noise {
            None => self.norm.apply(raw),
            Some(n) => {
                let f = n.apply_raw(raw, &self.raw_sigma_dbm, sample);
                let z = self.norm.apply(&f)?;
                Ok(n.apply_normalized(&z, &self.variances.std(), sample))
            }
        }
    }

    /// Normalized and filtered rows, filtering each RP's samples as one
    /// stream in acquisition order.
    pub fn denoise(&self, map: &RadioMap, role: u64, noise: Option<&NoiseSpec>) -> Result<Vec<Vec<f64>>> {
        let keys: Vec<u32> = map.samples().iter().map(|s| s.rp_id).collect();
        self.denoise_rows(&map.rss_rows(), &keys, role, noise)
    }

    pub fn denoise_rows(
        &self,
        raw: &[Vec<f64>],
        stream_keys: &[u32],
        role: u64,
        noise: Option<&NoiseSpec>,
    ) -> Result<Vec<Vec<f64>>> {
        check_dim(raw.len(), stream_keys.len())?;
        let z: Vec<Vec<f64>> = raw
            .iter()
            .enumerate()
            .map(|(i, r)| self.normalize(r, noise, i as u64))
            .collect::<Result<_>>()?;
        let mut streams: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, k) in stream_keys.iter().enumerate() {
            streams.entry(*k).or_default().push(i);
        }
        let mut out = vec![Vec::new(); z.len()];
        for (key, idx) in streams {
            let series: Vec<Vec<f64>> = idx.iter().map(|&i| z[i].clone()).collect();
            let filtered = filter_stream_with_id(&series, &self.filter, stream_id(role, key))?;
            for (i, row) in idx.into_iter().zip(filtered) {
                out[i] = row;
            }
        }
        Ok(out)
    }
}

fn stream_id(role: u64, key: u32) -> u64 {
    (role << 32) | key as u64
}

/// Denoised training and validation data, shared by every model variant fit
/// on the same split.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub pre: Preprocessor,
    pub norm_mode: NormMode,
    pub filter_settings: FilterSettings,
    pub train_rows: Vec<Vec<f64>>,
    pub train_pos: Vec<Position>,
    pub val_rows: Vec<Vec<f64>>,
    pub val_pos: Vec<Position>,
    pub bounds: Bounds,
    pub meta: MapMeta,
}

pub fn prepare(train: &RadioMap, val: &RadioMap, cfg: &ModelConfig) -> Result<Prepared> {
    let pre = Preprocessor::fit(train, cfg.norm_mode, &cfg.filter).map_err(|e| e.at("normalize"))?;
    let train_rows = pre.denoise(train, ROLE_TRAIN, None).map_err(|e| e.at("filter"))?;
    let val_rows = pre.denoise(val, ROLE_VAL, None).map_err(|e| e.at("filter"))?;
    Ok(Prepared {
        pre,
        norm_mode: cfg.norm_mode,
        filter_settings: cfg.filter.clone(),
        train_rows,
        train_pos: train.positions(),
        val_rows,
        val_pos: val.positions(),
        bounds: train.bounds(),
        meta: train.meta().clone(),
    })
}

/// One localization result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// Final estimate under the configured fusion mode.
    pub position: Position,
    pub rf: Position,
    pub knn: Option<Position>,
    /// Mass-weighted centroid of the fused belief.
    pub fused: Option<Position>,
    /// Peak cell of the fused belief and its centroid.
    pub cell: Option<(usize, Position)>,
    pub s_rf: f64,
    pub s_knn: Option<f64>,
    /// RF weight used in Choquet or convex mode.
    pub lambda: Option<f64>,
}

/// A fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub config: ModelConfig,
    pub pre: Preprocessor,
    pub ph_stats: Option<NormStats>,
    pub rf: RfModel,
    pub knn: Option<KnnIndex>,
    pub grid: GridSpec,
    pub beta: f64,
    pub choquet: Option<ChoquetFit>,
    pub meta: MapMeta,
}

impl PartialEq for KnnIndex {
    fn eq(&self, other: &Self) -> bool {
        self.points() == other.points() && self.labels() == other.labels() && self.metric() == other.metric()
    }
}

impl Pipeline {
    /// Fits every stage on `train`, calibrating fusion on `val`.
    pub fn fit(train: &RadioMap, val: &RadioMap, cfg: &ModelConfig) -> Result<Self> {
        Self::fit_prepared(&prepare(train, val, cfg)?, cfg)
    }

    /// Fits regressors and fusion on already denoised data. The normalization
    /// and filter settings of `prepared` take precedence over `cfg`.
    pub fn fit_prepared(prepared: &Prepared, cfg: &ModelConfig) -> Result<Self> {
        let mut config = cfg.clone();
        config.norm_mode = prepared.norm_mode;
        config.filter = prepared.filter_settings.clone();

        let ph_stats = if config.use_ph {
            let feats = feature_rows(&prepared.train_rows).map_err(|e| e.at("topology"))?;
            Some(fit_ph_stats(&feats).map_err(|e| e.at("topology"))?)
        } else {
            None
        };
        let x_train = featurize_rows(&prepared.train_rows, ph_stats.as_ref()).map_err(|e| e.at("topology"))?;
        let x_val = featurize_rows(&prepared.val_rows, ph_stats.as_ref()).map_err(|e| e.at("topology"))?;
        let rf = train_rf(&x_train, &prepared.train_pos, &config.rf).map_err(|e| e.at("forest"))?;
        let knn = if config.use_knn {
            if config.k == 0 || config.k > x_train.len() {
                return Err(Error::Invalid(format!("k = {} exceeds {} training rows", config.k, x_train.len())).at("knn"));
            }
            let metric = fit_channel_variances(&x_train).map_err(|e| e.at("knn"))?;
            Some(build_knn_index(&x_train, &prepared.train_pos, &metric).map_err(|e| e.at("knn"))?)
        } else {
            None
        };

        let mut model = Pipeline {
            grid: make_grid(prepared.bounds, config.fusion.h).map_err(|e| e.at("fusion"))?,
            config,
            pre: prepared.pre.clone(),
            ph_stats,
            rf,
            knn,
            beta: 1.0,
            choquet: None,
            meta: prepared.meta.clone(),
        };
        if prepared.val_rows.is_empty() {
            return Ok(model);
        }
        model.calibrate(&x_val, &prepared.val_pos, prepared.bounds).map_err(|e| e.at("fusion"))?;
        Ok(model)
    }

    fn calibrate(&mut self, x_val: &[Vec<f64>], truth: &[Position], bounds: Bounds) -> Result<()> {
        let rf: Vec<Position> = x_val.iter().map(|x| self.rf.predict(x)).collect::<Result<_>>()?;
        let Some(index) = &self.knn else {
            let d: Vec<f64> = rf.iter().map(|p| self.grid.min_dist(p)).collect();
            self.beta = fit_beta(&d)?;
            return Ok(());
        };
        let knn: Vec<Position> = x_val
            .iter()
            .map(|x| predict_wknn(index, x, self.config.k, self.config.eps))
            .collect::<Result<_>>()?;

        let fz = &mut self.config.fusion;
        if !fz.alpha_grid.is_empty() && !fz.h_grid.is_empty() {
            let mut best: Option<(f64, f64, f64)> = None;
            for &h in &fz.h_grid {
                let grid = make_grid(bounds, h)?;
                for &alpha in &fz.alpha_grid {
                    let errs: Vec<f64> = rf
                        .iter()
                        .zip(&knn)
                        .zip(truth)
                        .map(|((a, b), t)| {
                            dst_point(a, b, &grid, alpha, fz.theta_discount).map(|p| p.0.dist(t))
                        })
                        .collect::<Result<_>>()?;
                    let score = rmse_of(&errs);
                    if best.is_none_or(|b| score < b.0) {
                        best = Some((score, h, alpha));
                    }
                }
            }
            let (_, h, alpha) = best.expect("non-empty grids");
            fz.h = h;
            fz.alpha = alpha;
            self.grid = make_grid(bounds, h)?;
        }

        let dists: Vec<f64> = rf.iter().chain(&knn).map(|p| self.grid.min_dist(p)).collect();
        self.beta = fit_beta(&dists)?;
        let scores: Vec<(f64, f64)> = rf
            .iter()
            .zip(&knn)
            .map(|(a, b)| (confidence(a, &self.grid, self.beta), confidence(b, &self.grid, self.beta)))
            .collect();
        let targets: Vec<f64> = rf
            .iter()
            .zip(&knn)
            .zip(truth)
            .map(|((a, b), t)| (-self.beta * convex_combo(a, b, 0.5).dist(t)).exp())
            .collect();
        if scores.len() >= 2 {
            self.choquet = Some(fit_choquet_measure(&scores, &targets)?);
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.pre.dim()
    }

    /// Appends PH features when the model uses them.
    pub fn featurize(&self, denoised: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        featurize_rows(denoised, self.ph_stats.as_ref())
    }

    /// Regresses and fuses one feature vector.
    pub fn estimate(&self, x: &[f64]) -> Result<Estimate> {
        let rf = self.rf.predict(x)?;
        let s_rf = confidence(&rf, &self.grid, self.beta);
        let Some(index) = &self.knn else {
            return Ok(Estimate {
                position: rf,
                rf,
                knn: None,
                fused: None,
                cell: None,
                s_rf,
                s_knn: None,
                lambda: None,
            });
        };
        let knn = predict_wknn(index, x, self.config.k, self.config.eps)?;
        let s_knn = confidence(&knn, &self.grid, self.beta);
        let fz = &self.config.fusion;
        let (fused, cell) = match dst_point(&rf, &knn, &self.grid, fz.alpha, fz.theta_discount) {
            Ok((p, c)) => (Some(p), Some(c)),
            Err(Error::TotalConflict(_)) => (None, None),
            Err(e) => return Err(e),
        };
        let (position, lambda) = match fz.mode {
            FusionMode::Dst => (fused.unwrap_or_else(|| convex_combo(&rf, &knn, 0.5)), None),
            FusionMode::Choquet => {
                let m = self.choquet.map(|c| c.measure).unwrap_or_default();
                let l = choquet_lambda(s_rf, s_knn, &m);
                (convex_combo(&rf, &knn, l), Some(l))
            }
            FusionMode::Convex => (convex_combo(&rf, &knn, fz.lambda), Some(fz.lambda)),
        };
        Ok(Estimate {
            position,
            rf,
            knn: Some(knn),
            fused,
            cell,
            s_rf,
            s_knn: Some(s_knn),
            lambda,
        })
    }

    /// Fused belief behind an estimate, if the model has two sources.
    pub fn belief(&self, est: &Estimate) -> Result<Option<Bba>> {
        let Some(knn) = est.knn else { return Ok(None) };
        let fz = &self.config.fusion;
        let a = bba_from_point(&est.rf, &self.grid, fz.alpha, fz.theta_discount)?;
        let b = bba_from_point(&knn, &self.grid, fz.alpha, fz.theta_discount)?;
        Ok(Some(dempster_combine(&a, &b)?))
    }

    /// Estimates for every sample of `map`, filtered as per-RP streams.
    pub fn predict_map(&self, map: &RadioMap, noise: Option<&NoiseSpec>) -> Result<Vec<Estimate>> {
        let denoised = self.pre.denoise(map, ROLE_TEST, noise)?;
        self.predict_denoised(&denoised)
    }

    pub fn predict_denoised(&self, denoised: &[Vec<f64>]) -> Result<Vec<Estimate>> {
        self.featurize(denoised)?.iter().map(|x| self.estimate(x)).collect()
    }

    /// Scan-by-scan predictor. In stream mode filter state carries across
    /// scans; otherwise each scan starts a fresh filter.
    pub fn online(&self, stream: bool) -> Result<OnlinePredictor<'_>> {
        Ok(OnlinePredictor {
            model: self,
            filter: StreamFilter::new(self.pre.filter.clone(), stream_id(ROLE_ONLINE, 0))?,
            stream,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = self.to_json()?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&PipelineArtifactRef {
            format_version: ARTIFACT_VERSION,
            pipeline: self,
        })?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format_version: u32,
        }
        let h: Header = serde_json::from_str(s)?;
        if h.format_version != ARTIFACT_VERSION {
            return Err(Error::Version {
                found: h.format_version,
                expected: ARTIFACT_VERSION,
            });
        }
        let a: PipelineArtifact = serde_json::from_str(s)?;
        Ok(a.pipeline)
    }
}

/// On-disk form of a [`Pipeline`].
#[derive(Debug, Clone, Deserialize)]
pub struct PipelineArtifact {
    pub format_version: u32,
    pub pipeline: Pipeline,
}

#[derive(Serialize)]
struct PipelineArtifactRef<'a> {
    format_version: u32,
    pipeline: &'a Pipeline,
}

fn featurize_rows(rows: &[Vec<f64>], ph_stats: Option<&NormStats>) -> Result<Vec<Vec<f64>>> {
    let Some(stats) = ph_stats else {
        return Ok(rows.to_vec());
    };
    let feats = feature_rows(rows)?;
    rows.iter().zip(&feats).map(|(r, f)| augment(r, f, stats)).collect()
}

/// DST fusion of two point estimates: the fused-belief centroid and the peak cell.
pub fn dst_point(
    a: &Position,
    b: &Position,
    grid: &GridSpec,
    alpha: f64,
    theta_discount: f64,
) -> Result<(Position, (usize, Position))> {
    let ma = bba_from_point(a, grid, alpha, theta_discount)?;
    let mb = bba_from_point(b, grid, alpha, theta_discount)?;
    let m = dempster_combine(&ma, &mb)?;
    Ok((fused_point(&m, grid), argmax_belief(&m, grid)))
}

/// Scan-at-a-time inference.
pub struct OnlinePredictor<'a> {
    model: &'a Pipeline,
    filter: StreamFilter,
    stream: bool,
}

impl OnlinePredictor<'_> {
    pub fn step(&mut self, raw_scan: &[f64]) -> Result<Estimate> {
        let z = self.model.pre.normalize(raw_scan, None, 0)?;
        if !self.stream {
            self.filter.reset();
        }
        let f = self.filter.step(&z)?;
        let x = self.model.featurize(std::slice::from_ref(&f))?.remove(0);
        self.model.estimate(&x)
    }
}
