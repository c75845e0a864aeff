//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for internal failures, 2 for usage, input and
//! I/O errors.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bench::{run_bench, BenchConfig};
use crate::datamodel::{
    load_radio_map, save_radio_map, stratified_split, synth_radio_map, CsvSchema, Position, RadioMap, SplitSpec,
    SynthSpec, MISSING_DBM,
};
use crate::error::{Error, Result};
use crate::eval::ablation::{run_ablation_ladder, AblationConfig, DataSource, EvalReport, Variant};
use crate::eval::cv::{cv_grid_search, CvGrids, CvTrial};
use crate::eval::metrics::rmse_xy;
use crate::eval::noise::{bursty_grid, jitter_grid, NoiseSpec};
use crate::fuse::{export_belief_map, FusionMode};
use crate::pipeline::{Estimate, ModelConfig, Pipeline};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fpfuse", version, about = "Hybrid Wi-Fi/BLE fingerprint localization")]
pub struct Cli {
    /// Base seed for splits, folds, synthetic maps and repeats.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split, cross-validate, train and write a model artifact.
    Fit(FitArgs),
    /// Localize raw scans with a trained model.
    Predict(PredictArgs),
    /// Evaluate the four-variant ablation ladder.
    Ablate(AblateArgs),
    /// Evaluate every variant over a noise grid.
    NoiseSweep(SweepArgs),
    /// Measure online latency and its scaling.
    Bench(BenchArgs),
    /// Write a synthetic radio map CSV.
    Synth(SynthArgs),
    /// Write the fused belief map of one scan as CSV and PGM.
    ExportBeliefMap(BeliefArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset CSV (`rp_id,x,y,wifi_*,ble_*`); synthetic data when omitted.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Skip cross-validation and use the configured hyper-parameters.
    #[arg(long)]
    pub no_cv: bool,
    /// Artifact file name inside the output directory.
    #[arg(long, default_value = "model.json")]
    pub model: String,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Model artifact.
    #[arg(long)]
    pub model: PathBuf,
    /// One raw scan as comma-separated dBm values; may repeat.
    #[arg(long, allow_hyphen_values = true)]
    pub scan: Vec<String>,
    /// CSV of raw scans; `rp_id`, `x` and `y` columns are ignored.
    #[arg(long)]
    pub scans: Option<PathBuf>,
    /// Keep filter state across scans instead of restarting per scan.
    #[arg(long)]
    pub stream: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub scans: ScanArgs,
    #[arg(long)]
    pub fusion: Option<FusionMode>,
    /// RF weight for convex fusion.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Also write belief maps to this path stem (`.csv` and `.pgm`).
    #[arg(long)]
    pub belief_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BeliefArgs {
    #[command(flatten)]
    pub scans: ScanArgs,
    /// Which scan to export, counted from 0.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Output path stem inside the output directory.
    #[arg(long, default_value = "belief")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub repeats: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Jitter levels η; defaults to 0.05, 0.10, 0.20.
    #[arg(long, value_delimiter = ',')]
    pub eta: Vec<f64>,
    /// Add the bursty-outlier grid.
    #[arg(long)]
    pub bursty: bool,
    /// Add the noise-free condition.
    #[arg(long)]
    pub with_clean: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub queries: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// File name inside the output directory.
    #[arg(long, default_value = "synth.csv")]
    pub file: String,
}

/// Contents of `--config`; every field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Dataset CSV; mutually exclusive with `synth`.
    pub data: Option<PathBuf>,
    pub synth: Option<SynthSpec>,
    pub n_wifi: Option<usize>,
    pub n_ble: Option<usize>,
    pub split: SplitSpec,
    pub model: ModelConfig,
    pub cv: CvGrids,
    pub cv_folds: usize,
    pub variants: Vec<Variant>,
    pub noises: Option<Vec<NoiseSpec>>,
    pub repeats: usize,
    pub bench: BenchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            synth: None,
            n_wifi: None,
            n_ble: None,
            split: SplitSpec::default(),
            model: ModelConfig::default(),
            cv: CvGrids::default(),
            cv_folds: 5,
            variants: Variant::ALL.to_vec(),
            noises: None,
            repeats: 10,
            bench: BenchConfig::default(),
        }
    }
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let mut inner = &e;
        while let Error::Stage { source, .. } = inner {
            inner = source;
        }
        let code = match inner {
            Error::TotalConflict(_) | Error::CloudTooLarge(..) | Error::Numerical(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        let message = match e.stage() {
            Some(stage) => format!("[{stage}] {inner}"),
            None => e.to_string(),
        };
        CliError { code, message }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {}", e.message);
        return e.code;
    }
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("FPFUSE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| usage(format!("FPFUSE_THREADS must be a positive integer, got `{v}`")))?;
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Fit(a) => cmd_fit(cli, &cfg, a),
        Command::Predict(a) => cmd_predict(cli, a),
        Command::Ablate(a) => cmd_ablate(cli, &cfg, a),
        Command::NoiseSweep(a) => cmd_noise_sweep(cli, &cfg, a),
        Command::Bench(a) => cmd_bench(cli, &cfg, a),
        Command::Synth(a) => cmd_synth(cli, &cfg, a),
        Command::ExportBeliefMap(a) => cmd_export_belief_map(cli, a),
    }
}

fn load_config(path: Option<&Path>) -> CliResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).at("config"))?;
    let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::from(e).at("config"))?;
    if cfg.data.is_some() && cfg.synth.is_some() {
        return Err(usage("config may name either `data` or `synth`, not both"));
    }
    Ok(cfg)
}

fn out_path(cli: &Cli, name: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::from(e).at("output"))?;
    Ok(cli.out.join(name))
}

/// Writes `bytes` next to `path` and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Error::from(e).at("output"))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::from(e).at("output"))?;
    write_atomic(path, text.as_bytes())
}

fn synth_spec(cli: &Cli, cfg: &RunConfig) -> SynthSpec {
    let mut spec = cfg.synth.clone().unwrap_or_default();
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    spec
}

fn schema(cfg: &RunConfig) -> CsvSchema {
    CsvSchema {
        n_wifi: cfg.n_wifi,
        n_ble: cfg.n_ble,
        ..CsvSchema::default()
    }
}

fn data_source(cli: &Cli, cfg: &RunConfig, data: &DataArgs) -> CliResult<DataSource> {
    if data.data.is_some() && cfg.synth.is_some() {
        return Err(usage("--data conflicts with `synth` in the config"));
    }
    match data.data.as_ref().or(cfg.data.as_ref()) {
        Some(p) => Ok(DataSource::Map(
            load_radio_map(p, &schema(cfg)).map_err(|e| e.at("ingest"))?,
        )),
        None => Ok(DataSource::Synth(synth_spec(cli, cfg))),
    }
}

fn load_map(cli: &Cli, cfg: &RunConfig, data: &DataArgs) -> CliResult<RadioMap> {
    match data_source(cli, cfg, data)? {
        DataSource::Map(m) => Ok(m),
        DataSource::Synth(spec) => Ok(synth_radio_map(&spec).map_err(|e| e.at("synth"))?),
    }
}

#[derive(Debug, Serialize)]
struct FitReport {
    train: usize,
    val: usize,
    test: usize,
    test_rmse: f64,
    test_rmse_rf: f64,
    test_rmse_knn: Option<f64>,
    config: ModelConfig,
    cv_trials: Vec<CvTrial>,
}

fn cmd_fit(cli: &Cli, cfg: &RunConfig, a: &FitArgs) -> CliResult<()> {
    let map = load_map(cli, cfg, &a.data)?;
    let seed = cli.seed.unwrap_or(cfg.split.seed);
    let split = SplitSpec { seed, ..cfg.split };
    let (train, val, test) = stratified_split(&map, &split).map_err(|e| e.at("split"))?;
    let (model_cfg, trials) = if a.no_cv {
        (cfg.model.clone(), Vec::new())
    } else {
        let r = cv_grid_search(&train, &cfg.model, &cfg.cv, cfg.cv_folds, seed).map_err(|e| e.at("cv"))?;
        (r.config, r.trials)
    };
    let model = Pipeline::fit(&train, &val, &model_cfg)?;
    let est = model.predict_map(&test, None).map_err(|e| e.at("predict"))?;
    let truth = test.positions();
    let col = |f: &dyn Fn(&Estimate) -> Option<Position>| -> Result<Option<f64>> {
        let p: Option<Vec<Position>> = est.iter().map(f).collect();
        p.map(|p| rmse_xy(&p, &truth)).transpose()
    };
    let report = FitReport {
        train: train.len(),
        val: val.len(),
        test: test.len(),
        test_rmse: col(&|e| Some(e.position))?.unwrap_or(f64::NAN),
        test_rmse_rf: col(&|e| Some(e.rf))?.unwrap_or(f64::NAN),
        test_rmse_knn: col(&|e| e.knn)?,
        config: model.config.clone(),
        cv_trials: trials,
    };
    let json = model.to_json().map_err(|e| e.at("output"))?;
    write_atomic(&out_path(cli, &a.model)?, json.as_bytes())?;
    write_json(&out_path(cli, "fit_report.json")?, &report)?;
    println!("test rmse {:.4} m ({} test samples)", report.test_rmse, report.test);
    Ok(())
}

/// Reads scans from `--scan` values and the `--scans` file, in that order.
fn read_scans(a: &ScanArgs, dim: usize) -> CliResult<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for s in &a.scan {
        let v = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                if t.is_empty() {
                    Ok(MISSING_DBM)
                } else {
                    t.parse::<f64>().map_err(|_| usage(format!("bad scan value `{t}`")))
                }
            })
            .collect::<CliResult<Vec<f64>>>()?;
        out.push(v);
    }
    if let Some(p) = &a.scans {
        out.extend(read_scan_file(p)?);
    }
    if out.is_empty() {
        return Err(usage("no scans given; use --scan or --scans"));
    }
    for s in &out {
        if s.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: s.len(),
            }
            .at("ingest")
            .into());
        }
    }
    Ok(out)
}

fn read_scan_file(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let ingest = |e: Error| CliError::from(e.at("ingest"));
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| ingest(Error::Io(std::io::Error::other(e))))?;
    let header = r
        .headers()
        .map_err(|e| ingest(Error::Io(std::io::Error::other(e))))?
        .clone();
    let keep: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| !matches!(h.trim(), "rp_id" | "x" | "y"))
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| ingest(Error::Io(std::io::Error::other(e))))?;
        let row = keep
            .iter()
            .map(|&i| {
                let t = rec.get(i).unwrap_or("").trim();
                if t.is_empty() {
                    Ok(MISSING_DBM)
                } else {
                    t.parse::<f64>().map_err(|_| {
                        ingest(Error::Parse {
                            path: path.to_path_buf(),
                            line: line as u64 + 2,
                            msg: format!("bad number `{t}`"),
                        })
                    })
                }
            })
            .collect::<CliResult<Vec<f64>>>()?;
        out.push(row);
    }
    Ok(out)
}

fn load_model(path: &Path) -> CliResult<Pipeline> {
    Ok(Pipeline::load(path).map_err(|e| e.at("ingest"))?)
}

fn estimate_scans(model: &Pipeline, scans: &[Vec<f64>], stream: bool) -> CliResult<Vec<Estimate>> {
    let mut online = model.online(stream).map_err(|e| e.at("predict"))?;
    Ok(scans
        .iter()
        .map(|s| online.step(s))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at("predict"))?)
}

fn belief_stem(path: &Path, i: usize, n: usize) -> PathBuf {
    let stem = path.with_extension("");
    if n == 1 {
        stem
    } else {
        let name = stem.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        stem.with_file_name(format!("{name}_{i}"))
    }
}

fn write_belief(model: &Pipeline, est: &Estimate, stem: &Path) -> CliResult<()> {
    let m = model
        .belief(est)
        .map_err(|e| e.at("fusion"))?
        .ok_or_else(|| usage("belief maps need a model with the kNN branch"))?;
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::from(e).at("output"))?;
    }
    export_belief_map(&m, &model.grid, stem).map_err(|e| e.at("output"))?;
    Ok(())
}

fn cmd_predict(cli: &Cli, a: &PredictArgs) -> CliResult<()> {
    let mut model = load_model(&a.scans.model)?;
    if let Some(mode) = a.fusion {
        model.config.fusion.mode = mode;
    }
    if let Some(l) = a.lambda {
        if !(0.0..=1.0).contains(&l) {
            return Err(usage("--lambda must lie in [0, 1]"));
        }
        model.config.fusion.lambda = l;
    }
    let scans = read_scans(&a.scans, model.input_dim())?;
    let est = estimate_scans(&model, &scans, a.scans.stream)?;

    let mut csv = String::from("scan,x,y,rf_x,rf_y,knn_x,knn_y,cell,s_rf,s_knn\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for (i, e) in est.iter().enumerate() {
        csv.push_str(&format!(
            "{i},{},{},{},{},{},{},{},{},{}\n",
            e.position.x,
            e.position.y,
            e.rf.x,
            e.rf.y,
            opt(e.knn.map(|p| p.x)),
            opt(e.knn.map(|p| p.y)),
            e.cell.map_or(String::new(), |c| c.0.to_string()),
            e.s_rf,
            opt(e.s_knn),
        ));
    }
    write_atomic(&out_path(cli, "predictions.csv")?, csv.as_bytes())?;
    if let Some(bm) = &a.belief_map {
        for (i, e) in est.iter().enumerate() {
            write_belief(&model, e, &belief_stem(bm, i, est.len()))?;
        }
    }
    let mut stdout = std::io::stdout().lock();
    for e in &est {
        let _ = writeln!(stdout, "{} {}", e.position.x, e.position.y);
    }
    Ok(())
}

fn cmd_export_belief_map(cli: &Cli, a: &BeliefArgs) -> CliResult<()> {
    let model = load_model(&a.scans.model)?;
    let scans = read_scans(&a.scans, model.input_dim())?;
    let est = estimate_scans(&model, &scans, a.scans.stream)?;
    let e = est
        .get(a.index)
        .ok_or_else(|| usage(format!("--index {} out of range for {} scans", a.index, est.len())))?;
    let stem = out_path(cli, &a.name)?;
    write_belief(&model, e, &stem)?;
    println!("{}", stem.with_extension("pgm").display());
    Ok(())
}

fn ablation_config(cli: &Cli, cfg: &RunConfig, repeats: Option<usize>) -> AblationConfig {
    AblationConfig {
        model: cfg.model.clone(),
        variants: cfg.variants.clone(),
        noises: cfg.noises.clone().unwrap_or_else(|| vec![NoiseSpec::dbm(0.10, 123)]),
        repeats: repeats.unwrap_or(cfg.repeats),
        seed: cli.seed.unwrap_or(cfg.split.seed),
        train: cfg.split.train,
        val: cfg.split.val,
        test: cfg.split.test,
        ..AblationConfig::default()
    }
}

fn write_report(cli: &Cli, report: &EvalReport, name: &str) -> CliResult<()> {
    report.save(out_path(cli, name)?).map_err(|e| e.at("output"))?;
    print!("{}", report.table());
    Ok(())
}

fn cmd_ablate(cli: &Cli, cfg: &RunConfig, a: &AblateArgs) -> CliResult<()> {
    let source = data_source(cli, cfg, &a.data)?;
    let report = run_ablation_ladder(&source, &ablation_config(cli, cfg, a.repeats))?;
    write_report(cli, &report, "ablation")
}

fn cmd_noise_sweep(cli: &Cli, cfg: &RunConfig, a: &SweepArgs) -> CliResult<()> {
    let source = data_source(cli, cfg, &a.data)?;
    let mut ac = ablation_config(cli, cfg, a.repeats);
    let noise_seed = ac.noises.first().map_or(123, |n| n.seed);
    ac.noises = if a.eta.is_empty() {
        jitter_grid(noise_seed)
    } else {
        a.eta.iter().map(|&e| NoiseSpec::gauss(e, noise_seed)).collect()
    };
    if a.bursty {
        ac.noises.extend(bursty_grid(noise_seed));
    }
    ac.include_clean = a.with_clean;
    let report = run_ablation_ladder(&source, &ac)?;
    write_report(cli, &report, "noise_sweep")
}

fn cmd_bench(cli: &Cli, cfg: &RunConfig, a: &BenchArgs) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let mut bc = cfg.bench.clone();
    if let Some(q) = a.queries {
        bc.n_queries = q;
    }
    if let Some(s) = cli.seed {
        bc.seed = s;
    }
    let report = run_bench(&model, &bc).map_err(|e| e.at("bench"))?;
    write_json(&out_path(cli, "bench.json")?, &report)?;
    for s in &report.stages {
        println!("{:<10} {:>12.2} us", s.stage, s.median_s * 1e6);
    }
    for s in &report.scaling {
        println!("slope vs {:<10} {:.3}", s.parameter, s.slope);
    }
    println!("pf/kf ratio {:.1}", report.pf_kf_ratio);
    Ok(())
}

fn cmd_synth(cli: &Cli, cfg: &RunConfig, a: &SynthArgs) -> CliResult<()> {
    let map = synth_radio_map(&synth_spec(cli, cfg)).map_err(|e| e.at("synth"))?;
    let path = out_path(cli, &a.file)?;
    save_radio_map(&map, &path).map_err(|e| e.at("output"))?;
    println!("{} ({} samples)", path.display(), map.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["fpfuse", "synth", "--seed", "7", "--out", "x"]).unwrap();
        assert_eq!(cli.seed, Some(7));
        assert_eq!(cli.out, PathBuf::from("x"));
        assert!(matches!(cli.command, Command::Synth(_)));
    }

    #[test]
    fn negative_scan_values_parse() {
        let cli = Cli::try_parse_from(["fpfuse", "predict", "--model", "m.json", "--scan", "-50,-60"]).unwrap();
        let Command::Predict(p) = cli.command else { panic!() };
        assert_eq!(read_scans(&p.scans, 2).unwrap(), vec![vec![-50.0, -60.0]]);
        assert!(read_scans(&p.scans, 3).is_err());
    }

    #[test]
    fn error_codes() {
        let io = CliError::from(Error::Io(std::io::Error::other("x")).at("ingest"));
        assert_eq!(io.code, EXIT_USAGE);
        assert!(io.message.starts_with("[ingest]"));
        assert_eq!(CliError::from(Error::Numerical("nan".into())).code, EXIT_INTERNAL);
    }

    #[test]
    fn belief_stems() {
        assert_eq!(belief_stem(Path::new("d/out.pgm"), 0, 1), PathBuf::from("d/out"));
        assert_eq!(belief_stem(Path::new("d/out.pgm"), 2, 3), PathBuf::from("d/out_2"));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>("{\"repeat\": 3}").is_err());
        let c: RunConfig = serde_json::from_str("{\"repeats\": 3, \"model\": {\"k\": 5}}").unwrap();
        assert_eq!((c.repeats, c.model.k), (3, 5));
    }
}
