//! The ablation ladder: four model variants, evaluated clean and under each
//! noise model over repeated stratified splits.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datamodel::{stratified_split, synth_radio_map, Position, RadioMap, SplitSpec, SynthSpec};
use crate::error::{Error, Result};
use crate::eval::metrics::{errors, rmse_of};
use crate::eval::noise::NoiseSpec;
use crate::eval::stats::{holm_bonferroni, mean_ci, paired_t_test, wilcoxon_signed_rank, MeanCi, TTestResult, WilcoxonResult};
use crate::pipeline::{prepare, ModelConfig, Pipeline, ROLE_TEST};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "PF+RF")]
    PfRf,
    #[serde(rename = "PF+RF+KNN+DST")]
    PfRfKnnDst,
    #[serde(rename = "PF+PH+RF")]
    PfPhRf,
    #[serde(rename = "PF+PH+RF+KNN+DST")]
    Full,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::PfRf, Variant::PfRfKnnDst, Variant::PfPhRf, Variant::Full];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PfRf => "PF+RF",
            Variant::PfRfKnnDst => "PF+RF+KNN+DST",
            Variant::PfPhRf => "PF+PH+RF",
            Variant::Full => "PF+PH+RF+KNN+DST",
        }
    }

    pub fn uses_ph(self) -> bool {
        matches!(self, Variant::PfPhRf | Variant::Full)
    }

    pub fn uses_knn(self) -> bool {
        matches!(self, Variant::PfRfKnnDst | Variant::Full)
    }

    /// `base` with this variant's components switched on or off.
    pub fn configure(self, base: &ModelConfig) -> ModelConfig {
        let mut c = base.clone();
        c.use_ph = self.uses_ph();
        c.use_knn = self.uses_knn();
        c
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown variant `{s}`")))
    }
}

/// Where each repeat's radio map comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// A fresh synthetic map per repeat, seeded `spec.seed + repeat`.
    Synth(SynthSpec),
    /// One map, re-split per repeat.
    Map(RadioMap),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AblationConfig {
    pub model: ModelConfig,
    pub variants: Vec<Variant>,
    pub noises: Vec<NoiseSpec>,
    /// Evaluate the noise-free condition as well.
    pub include_clean: bool,
    pub repeats: usize,
    /// Repeat `r` splits with seed `seed + r`.
    pub seed: u64,
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub ci_level: f64,
    pub alpha: f64,
    pub baseline: Variant,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            variants: Variant::ALL.to_vec(),
            noises: vec![NoiseSpec::dbm(0.10, 123)],
            include_clean: true,
            repeats: 10,
            seed: 0,
            train: 0.70,
            val: 0.15,
            test: 0.15,
            ci_level: 0.95,
            alpha: 0.05,
            baseline: Variant::PfRf,
        }
    }
}

pub const CLEAN: &str = "clean";

/// One variant on one split under one condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub variant: Variant,
    pub condition: String,
    pub split: usize,
    pub rmse: f64,
    /// RMSE of the peak-belief cell centroid, for fused variants.
    pub rmse_argmax: Option<f64>,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: Variant,
    pub condition: String,
    pub mean_rmse: f64,
    pub ci: Option<MeanCi>,
    pub mean_rmse_argmax: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestLevel {
    /// Paired over per-split RMSE.
    Split,
    /// Paired over per-sample errors pooled across splits.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTest {
    pub condition: String,
    pub variant: Variant,
    pub baseline: Variant,
    pub level: TestLevel,
    pub wilcoxon: WilcoxonResult,
    pub t_test: Option<TTestResult>,
    /// Holm-adjusted Wilcoxon p within the family of the same level.
    pub holm_p: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub median_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub conditions: Vec<String>,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub tests: Vec<ComparisonTest>,
    pub timings: Vec<StageTiming>,
}

impl EvalReport {
    pub fn rmse_of(&self, variant: Variant, condition: &str) -> Vec<f64> {
        let mut r: Vec<&RunRecord> = self
            .runs
            .iter()
            .filter(|r| r.variant == variant && r.condition == condition)
            .collect();
        r.sort_by_key(|r| r.split);
        r.iter().map(|r| r.rmse).collect()
    }

    pub fn test(&self, variant: Variant, condition: &str, level: TestLevel) -> Option<&ComparisonTest> {
        self.tests
            .iter()
            .find(|t| t.variant == variant && t.condition == condition && t.level == level)
    }

    /// Flat `variant,condition,split,rmse` rows.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["variant", "condition", "split", "rmse"]).map_err(csv_err)?;
        for r in &self.runs {
            out.write_record([r.variant.name(), &r.condition, &r.split.to_string(), &r.rmse.to_string()])
                .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `stem.json` and `stem.csv`.
    pub fn save(&self, stem: impl AsRef<Path>) -> Result<()> {
        let stem = stem.as_ref();
        std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(self)?)?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(stem.with_extension("csv"))?);
        self.write_csv(&mut f)
    }

    /// Table lines `variant  condition  mean ± hw`.
    pub fn table(&self) -> String {
        let mut s = String::new();
        for row in &self.summary {
            let v = match &row.ci {
                Some(ci) => ci.display(),
                None => format!("{:.3}", row.mean_rmse),
            };
            s.push_str(&format!("{:<18} {:<28} {v}\n", row.variant.name(), row.condition));
        }
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

struct RepeatOutput {
    runs: Vec<RunRecord>,
    timings: Vec<(String, f64)>,
}

fn run_repeat(map: &RadioMap, cfg: &AblationConfig, r: usize) -> Result<RepeatOutput> {
    let split = SplitSpec {
        train: cfg.train,
        val: cfg.val,
        test: cfg.test,
        seed: cfg.seed + r as u64,
    };
    let (train, val, test) = stratified_split(map, &split).map_err(|e| e.at("split"))?;
    let mut timings = Vec::new();
    let t0 = Instant::now();
    let prepared = prepare(&train, &val, &cfg.model)?;
    timings.push(("prepare".to_string(), t0.elapsed().as_secs_f64()));

    let truth = test.positions();
    let mut conditions: Vec<(String, Option<&NoiseSpec>)> = Vec::new();
    if cfg.include_clean {
        conditions.push((CLEAN.to_string(), None));
    }
    conditions.extend(cfg.noises.iter().map(|n| (n.label(), Some(n))));
    let t0 = Instant::now();
    let test_rows = conditions
        .iter()
        .map(|(_, n)| prepared.pre.denoise(&test, ROLE_TEST, *n))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at("filter"))?;
    timings.push(("filter_test".to_string(), t0.elapsed().as_secs_f64()));

    let mut runs = Vec::new();
    for &v in &cfg.variants {
        let t0 = Instant::now();
        let model = Pipeline::fit_prepared(&prepared, &v.configure(&cfg.model))?;
        timings.push((format!("fit {v}"), t0.elapsed().as_secs_f64()));
        for ((name, _), rows) in conditions.iter().zip(&test_rows) {
            let t0 = Instant::now();
            let est = model.predict_denoised(rows).map_err(|e| e.at("predict"))?;
            timings.push((format!("predict {v}"), t0.elapsed().as_secs_f64()));
            let pred: Vec<Position> = est.iter().map(|e| e.position).collect();
            let errs = errors(&pred, &truth)?;
            let rmse_argmax = if est.iter().all(|e| e.cell.is_some()) && v.uses_knn() {
                let cells: Vec<Position> = est.iter().map(|e| e.cell.expect("checked").1).collect();
                Some(rmse_of(&errors(&cells, &truth)?))
            } else {
                None
            };
            runs.push(RunRecord {
                variant: v,
                condition: name.clone(),
                split: r,
                rmse: rmse_of(&errs),
                rmse_argmax,
                errors: errs,
            });
        }
    }
    Ok(RepeatOutput { runs, timings })
}

/// Runs every variant under every condition for `cfg.repeats` splits.
pub fn run_ablation_ladder(source: &DataSource, cfg: &AblationConfig) -> Result<EvalReport> {
    if cfg.repeats == 0 || cfg.variants.is_empty() || (cfg.noises.is_empty() && !cfg.include_clean) {
        return Err(Error::Invalid(
            "ablation needs at least one repeat, one variant and one condition".into(),
        ));
    }
    for n in &cfg.noises {
        n.validate()?;
    }
    let outputs = (0..cfg.repeats)
        .into_par_iter()
        .map(|r| {
            let map = match source {
                DataSource::Map(m) => std::borrow::Cow::Borrowed(m),
                DataSource::Synth(spec) => {
                    let spec = SynthSpec {
                        seed: spec.seed + r as u64,
                        ..spec.clone()
                    };
                    std::borrow::Cow::Owned(synth_radio_map(&spec).map_err(|e| e.at("synth"))?)
                }
            };
            run_repeat(&map, cfg, r)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut conditions = Vec::new();
    if cfg.include_clean {
        conditions.push(CLEAN.to_string());
    }
    conditions.extend(cfg.noises.iter().map(NoiseSpec::label));
    let mut runs = Vec::new();
    let mut stage_times: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for o in outputs {
        runs.extend(o.runs);
        for (s, t) in o.timings {
            stage_times.entry(s).or_default().push(t);
        }
    }
    let mut report = EvalReport {
        conditions,
        runs,
        summary: Vec::new(),
        tests: Vec::new(),
        timings: stage_times
            .into_iter()
            .map(|(stage, mut v)| {
                v.sort_by(f64::total_cmp);
                StageTiming {
                    stage,
                    median_s: v[v.len() / 2],
                    total_s: v.iter().sum(),
                }
            })
            .collect(),
    };
    summarize(&mut report, cfg)?;
    Ok(report)
}

fn summarize(report: &mut EvalReport, cfg: &AblationConfig) -> Result<()> {
    for &v in &cfg.variants {
        for c in &report.conditions {
            let vals = report.rmse_of(v, c);
            let argmax: Vec<f64> = report
                .runs
                .iter()
                .filter(|r| r.variant == v && &r.condition == c)
                .filter_map(|r| r.rmse_argmax)
                .collect();
            report.summary.push(SummaryRow {
                variant: v,
                condition: c.clone(),
                mean_rmse: vals.iter().sum::<f64>() / vals.len() as f64,
                ci: if vals.len() >= 2 { Some(mean_ci(&vals, cfg.ci_level)?) } else { None },
                mean_rmse_argmax: (!argmax.is_empty()).then(|| argmax.iter().sum::<f64>() / argmax.len() as f64),
            });
        }
    }
    if !cfg.variants.contains(&cfg.baseline) {
        return Ok(());
    }
    for level in [TestLevel::Split, TestLevel::Sample] {
        if level == TestLevel::Split && cfg.repeats < 2 {
            continue;
        }
        let mut family = Vec::new();
        for c in &report.conditions {
            for &v in cfg.variants.iter().filter(|v| **v != cfg.baseline) {
                let (a, b) = match level {
                    TestLevel::Split => (report.rmse_of(cfg.baseline, c), report.rmse_of(v, c)),
                    TestLevel::Sample => (pooled_errors(report, cfg.baseline, c), pooled_errors(report, v, c)),
                };
                family.push(ComparisonTest {
                    condition: c.clone(),
                    variant: v,
                    baseline: cfg.baseline,
                    level,
                    wilcoxon: wilcoxon_signed_rank(&a, &b)?,
                    t_test: if a.len() >= 2 { Some(paired_t_test(&a, &b)?) } else { None },
                    holm_p: 1.0,
                    reject: false,
                });
            }
        }
        let p: Vec<f64> = family.iter().map(|t| t.wilcoxon.p).collect();
        let holm = holm_bonferroni(&p, cfg.alpha)?;
        for (i, t) in family.iter_mut().enumerate() {
            t.holm_p = holm.adjusted[i];
            t.reject = holm.reject[i];
        }
        report.tests.extend(family);
    }
    Ok(())
}

fn pooled_errors(report: &EvalReport, v: Variant, c: &str) -> Vec<f64> {
    let mut r: Vec<&RunRecord> = report.runs.iter().filter(|r| r.variant == v && r.condition == c).collect();
    r.sort_by_key(|r| r.split);
    r.iter().flat_map(|r| r.errors.iter().copied()).collect()
}
