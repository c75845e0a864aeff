//! Radio-map types, CSV ingestion, synthetic survey generation and
//! RP-stratified splitting.
//!
//! A [`RadioMap`] is the labelled survey: one [`Sample`] per windowed
//! fingerprint, each tagged with the reference point (RP) it was recorded at.
//! Sample order is acquisition order and is preserved by every operation here,
//! which is what lets the filters treat the per-RP sample sequence as a stream.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Sentinel written into a missing RSS cell.
pub const MISSING_DBM: f64 = -100.0;
/// Plausible RSS range after imputation.
pub const MIN_DBM: f64 = -120.0;
pub const MAX_DBM: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Wifi,
    Ble,
}

/// Channel layout of a fingerprint: `n_wifi` Wi-Fi channels followed by
/// `n_ble` BLE channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelLayout {
    pub n_wifi: usize,
    pub n_ble: usize,
}

impl ChannelLayout {
    pub fn new(n_wifi: usize, n_ble: usize) -> Result<Self> {
        if n_wifi + n_ble == 0 {
            return Err(Error::Invalid("fingerprint needs at least one channel".into()));
        }
        Ok(Self { n_wifi, n_ble })
    }

    pub fn dim(&self) -> usize {
        self.n_wifi + self.n_ble
    }

    pub fn kind(&self, i: usize) -> ChannelKind {
        if i < self.n_wifi {
            ChannelKind::Wifi
        } else {
            ChannelKind::Ble
        }
    }

    pub fn kinds(&self) -> Vec<ChannelKind> {
        (0..self.dim()).map(|i| self.kind(i)).collect()
    }
}

/// One RSS vector in dBm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub rss: Vec<f64>,
    pub layout: ChannelLayout,
}

impl Fingerprint {
    pub fn new(rss: Vec<f64>, layout: ChannelLayout) -> Result<Self> {
        if rss.len() != layout.dim() {
            return Err(Error::Dimension {
                expected: layout.dim(),
                got: rss.len(),
            });
        }
        if let Some(v) = rss.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite RSS value {v}")));
        }
        Ok(Self { rss, layout })
    }

    pub fn dim(&self) -> usize {
        self.rss.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Axis-aligned floor rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let b = Self {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        if !(b.width() > 0.0 && b.height() > 0.0) || ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid(format!("degenerate floor bounds {b:?}")));
        }
        Ok(b)
    }

    /// Floor of `width × height` meters anchored at the origin.
    pub fn rect(width: f64, height: f64) -> Result<Self> {
        Self::new(0.0, 0.0, width, height)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub fingerprint: Fingerprint,
    pub position: Position,
    pub rp_id: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapMeta {
    pub name: String,
    pub layout: ChannelLayout,
    /// Number of RSS cells that were missing on ingest and set to [`MISSING_DBM`].
    pub imputed_count: usize,
}

/// The labelled survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioMap {
    samples: Vec<Sample>,
    bounds: Bounds,
    meta: MapMeta,
}

impl RadioMap {
    pub fn new(samples: Vec<Sample>, bounds: Bounds, meta: MapMeta) -> Result<Self> {
        let layout = meta.layout;
        for (i, s) in samples.iter().enumerate() {
            if s.fingerprint.layout != layout {
                return Err(Error::Schema(format!(
                    "sample {i} has layout {:?}, map declares {layout:?}",
                    s.fingerprint.layout
                )));
            }
            if !bounds.contains(&s.position) {
                return Err(Error::Invalid(format!(
                    "sample {i} at ({}, {}) lies outside the floor bounds",
                    s.position.x, s.position.y
                )));
            }
        }
        Ok(Self {
            samples,
            bounds,
            meta,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn meta(&self) -> &MapMeta {
        &self.meta
    }

    pub fn layout(&self) -> ChannelLayout {
        self.meta.layout
    }

    pub fn dim(&self) -> usize {
        self.meta.layout.dim()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample indices grouped by RP, in ascending RP order; indices inside a
    /// group keep acquisition order.
    pub fn rp_groups(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, s) in self.samples.iter().enumerate() {
            groups.entry(s.rp_id).or_default().push(i);
        }
        groups
    }

    /// Raw dBm matrix, one row per sample.
    pub fn rss_rows(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.fingerprint.rss.clone()).collect()
    }

    pub fn positions(&self) -> Vec<Position> {
        self.samples.iter().map(|s| s.position).collect()
    }

    /// Sub-map with the given sample indices (in the given order).
    pub fn subset(&self, indices: &[usize]) -> RadioMap {
        RadioMap {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            bounds: self.bounds,
            meta: self.meta.clone(),
        }
    }

    /// Same map with fingerprints replaced; positions, RPs, and order kept.
    pub fn with_rss(&self, rows: Vec<Vec<f64>>) -> Result<RadioMap> {
        if rows.len() != self.samples.len() {
            return Err(Error::Dimension {
                expected: self.samples.len(),
                got: rows.len(),
            });
        }
        let samples = self
            .samples
            .iter()
            .zip(rows)
            .map(|(s, rss)| {
                Ok(Sample {
                    fingerprint: Fingerprint::new(rss, s.fingerprint.layout)?,
                    position: s.position,
                    rp_id: s.rp_id,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RadioMap {
            samples,
            bounds: self.bounds,
            meta: self.meta.clone(),
        })
    }
}

// ---------------------------------------------------------------------------
// CSV

/// Column layout expected in a dataset CSV.
///
/// Counts left as `None` are inferred from the header. When `bounds` is unset
/// the floor is the bounding box of the RP coordinates padded by `pad` meters.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub n_wifi: Option<usize>,
    pub n_ble: Option<usize>,
    pub bounds: Option<Bounds>,
    pub pad: f64,
    pub name: Option<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            n_wifi: None,
            n_ble: None,
            bounds: None,
            pad: 0.5,
            name: None,
        }
    }
}

impl CsvSchema {
    pub fn with_counts(n_wifi: usize, n_ble: usize) -> Self {
        Self {
            n_wifi: Some(n_wifi),
            n_ble: Some(n_ble),
            ..Self::default()
        }
    }
}

fn parse_header(header: &csv::StringRecord, path: &Path) -> Result<ChannelLayout> {
    let parse_err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg,
    };
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "rp_id" || cols[1] != "x" || cols[2] != "y" {
        return Err(parse_err("header must start with `rp_id,x,y`".into()));
    }
    let mut n_wifi = 0;
    let mut n_ble = 0;
    for (j, c) in cols[3..].iter().enumerate() {
        let expect_wifi = format!("wifi_{}", n_wifi + 1);
        let expect_ble = format!("ble_{}", n_ble + 1);
        if n_ble == 0 && *c == expect_wifi {
            n_wifi += 1;
        } else if *c == expect_ble {
            n_ble += 1;
        } else {
            return Err(parse_err(format!(
                "unexpected column `{c}` at position {}",
                j + 4
            )));
        }
    }
    ChannelLayout::new(n_wifi, n_ble).map_err(|e| parse_err(e.to_string()))
}

/// Reads a dataset CSV (`rp_id,x,y,wifi_1..wifi_NW,ble_1..ble_NB`).
///
/// Empty RSS cells are imputed to [`MISSING_DBM`] and counted in the map's
/// metadata.
pub fn load_radio_map(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<RadioMap> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: format!("{other:?}"),
            },
        })?;
    let header = reader.headers().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg: e.to_string(),
    })?;
    let layout = parse_header(header, path)?;
    if schema.n_wifi.is_some_and(|n| n != layout.n_wifi)
        || schema.n_ble.is_some_and(|n| n != layout.n_ble)
    {
        return Err(Error::Schema(format!(
            "header declares {} Wi-Fi + {} BLE channels, schema expects {:?} + {:?}",
            layout.n_wifi, layout.n_ble, schema.n_wifi, schema.n_ble
        )));
    }
    let d = layout.dim();

    let mut samples = Vec::new();
    let mut imputed = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let perr = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        if record.len() != d + 3 {
            return Err(Error::Schema(format!(
                "row at line {line} has {} RSS columns, schema has d = {d}",
                record.len().saturating_sub(3)
            )));
        }
        let rp_id: u32 = record[0]
            .parse()
            .map_err(|_| perr(format!("bad rp_id `{}`", &record[0])))?;
        let coord = |k: usize| -> Result<f64> {
            record[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| perr(format!("bad coordinate `{}`", &record[k])))
        };
        let position = Position::new(coord(1)?, coord(2)?);
        let mut rss = Vec::with_capacity(d);
        for cell in record.iter().skip(3) {
            if cell.is_empty() {
                imputed += 1;
                rss.push(MISSING_DBM);
            } else {
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| perr(format!("bad RSS value `{cell}`")))?;
                rss.push(v);
            }
        }
        samples.push(Sample {
            fingerprint: Fingerprint::new(rss, layout)?,
            position,
            rp_id,
        });
    }
    if samples.is_empty() {
        return Err(Error::Invalid(format!("{}: no data rows", path.display())));
    }

    let bounds = match schema.bounds {
        Some(b) => b,
        None => {
            let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            for s in &samples {
                x0 = x0.min(s.position.x);
                y0 = y0.min(s.position.y);
                x1 = x1.max(s.position.x);
                y1 = y1.max(s.position.y);
            }
            let pad = schema.pad.max(1e-6);
            Bounds::new(x0 - pad, y0 - pad, x1 + pad, y1 + pad)?
        }
    };
    let name = schema.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    RadioMap::new(
        samples,
        bounds,
        MapMeta {
            name,
            layout,
            imputed_count: imputed,
        },
    )
}

/// Writes `map` in the dataset CSV format. Values are printed in shortest
/// round-trip form, so a reload reproduces them exactly.
pub fn save_radio_map(map: &RadioMap, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_radio_map(map, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_radio_map(map: &RadioMap, w: &mut impl Write) -> Result<()> {
    let layout = map.layout();
    let mut header = vec!["rp_id".to_string(), "x".into(), "y".into()];
    header.extend((1..=layout.n_wifi).map(|i| format!("wifi_{i}")));
    header.extend((1..=layout.n_ble).map(|i| format!("ble_{i}")));
    writeln!(w, "{}", header.join(","))?;
    for s in map.samples() {
        write!(w, "{},{},{}", s.rp_id, s.position.x, s.position.y)?;
        for v in &s.fingerprint.rss {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Synthetic surveys

/// Parameters of a synthetic single-slope log-distance survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_rp: usize,
    pub samples_per_rp: usize,
    pub n_wifi: usize,
    pub n_ble: usize,
    pub bounds: Bounds,
    pub path_loss_exponent: f64,
    /// Received power at the 1 m reference distance.
    pub tx_power_dbm: f64,
    /// Per-sample log-normal shadowing.
    pub shadowing_std_dbm: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    /// 15 RPs × 80 fingerprints on a 6 × 14 m floor with 7 Wi-Fi APs and
    /// 3 BLE beacons. Shadowing of 2 dB models windowed (10-scan averaged)
    /// fingerprints.
    fn default() -> Self {
        Self {
            n_rp: 15,
            samples_per_rp: 80,
            n_wifi: 7,
            n_ble: 3,
            bounds: Bounds {
                x_min: 0.0,
                y_min: 0.0,
                x_max: 6.0,
                y_max: 14.0,
            },
            path_loss_exponent: 2.5,
            tx_power_dbm: -40.0,
            shadowing_std_dbm: 2.0,
            seed: 123,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_rp == 0 || self.samples_per_rp == 0 || self.n_wifi + self.n_ble == 0 {
            return Err(Error::Invalid("synthetic survey counts must be >= 1".into()));
        }
        if !(self.shadowing_std_dbm >= 0.0) || !self.path_loss_exponent.is_finite() {
            return Err(Error::Invalid("shadowing std must be >= 0".into()));
        }
        Bounds::new(
            self.bounds.x_min,
            self.bounds.y_min,
            self.bounds.x_max,
            self.bounds.y_max,
        )?;
        Ok(())
    }
}

/// Emitter and RP geometry of a synthetic survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthScene {
    /// One anchor per channel, Wi-Fi first.
    pub anchors: Vec<Position>,
    pub rps: Vec<Position>,
}

/// Minimum emitter distance used by the path-loss model.
const MIN_ANCHOR_DIST: f64 = 0.1;

/// Mean received power at `dist` meters: `tx − 10·n·log10(dist)`.
pub fn log_distance_rss(tx_power_dbm: f64, exponent: f64, dist: f64) -> f64 {
    tx_power_dbm - 10.0 * exponent * dist.max(MIN_ANCHOR_DIST).log10()
}

/// Places anchors uniformly over the floor and RPs on a jittered grid.
pub fn synth_scene(spec: &SynthSpec) -> Result<SynthScene> {
    spec.validate()?;
    let b = spec.bounds;
    let mut rng = rng::rng_from(spec.seed, &[0x5CE7E]);
    let d = spec.n_wifi + spec.n_ble;
    let anchors = (0..d)
        .map(|_| {
            Position::new(
                rng.random_range(b.x_min..=b.x_max),
                rng.random_range(b.y_min..=b.y_max),
            )
        })
        .collect();

    let n = spec.n_rp;
    let cols = ((n as f64 * b.width() / b.height()).sqrt().round() as usize).clamp(1, n);
    let rows = n.div_ceil(cols);
    let cw = b.width() / cols as f64;
    let ch = b.height() / rows as f64;
    let rps = (0..n)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            let jx = rng.random_range(-0.25..=0.25) * cw;
            let jy = rng.random_range(-0.25..=0.25) * ch;
            Position::new(
                b.x_min + (c as f64 + 0.5) * cw + jx,
                b.y_min + (r as f64 + 0.5) * ch + jy,
            )
        })
        .collect();
    Ok(SynthScene { anchors, rps })
}

/// Renders fingerprints for a scene. Samples are emitted RP by RP.
pub fn render_scene(spec: &SynthSpec, scene: &SynthScene) -> Result<RadioMap> {
    spec.validate()?;
    let layout = ChannelLayout::new(spec.n_wifi, spec.n_ble)?;
    if scene.anchors.len() != layout.dim() {
        return Err(Error::Dimension {
            expected: layout.dim(),
            got: scene.anchors.len(),
        });
    }
    let mut rng = rng::rng_from(spec.seed, &[0x5A3D0]);
    let shadow = Normal::new(0.0, spec.shadowing_std_dbm)
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let mut samples = Vec::with_capacity(scene.rps.len() * spec.samples_per_rp);
    for (rp_id, rp) in scene.rps.iter().enumerate() {
        let mean: Vec<f64> = scene
            .anchors
            .iter()
            .map(|a| log_distance_rss(spec.tx_power_dbm, spec.path_loss_exponent, rp.dist(a)))
            .collect();
        for _ in 0..spec.samples_per_rp {
            let rss = mean
                .iter()
                .map(|m| (m + shadow.sample(&mut rng)).clamp(MIN_DBM, MAX_DBM))
                .collect();
            samples.push(Sample {
                fingerprint: Fingerprint::new(rss, layout)?,
                position: *rp,
                rp_id: rp_id as u32,
            });
        }
    }
    RadioMap::new(
        samples,
        spec.bounds,
        MapMeta {
            name: format!("synth-{}", spec.seed),
            layout,
            imputed_count: 0,
        },
    )
}

/// Generates a deterministic synthetic survey.
pub fn synth_radio_map(spec: &SynthSpec) -> Result<RadioMap> {
    let scene = synth_scene(spec)?;
    render_scene(spec, &scene)
}

// ---------------------------------------------------------------------------
// Splitting

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self::standard(123)
    }
}

impl SplitSpec {
    /// 70:15:15.
    pub fn standard(seed: u64) -> Self {
        Self {
            train: 0.70,
            val: 0.15,
            test: 0.15,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = [self.train, self.val, self.test];
        if r.iter().any(|v| !(*v > 0.0)) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!(
                "split ratios must be positive and sum to 1, got {r:?}"
            )));
        }
        Ok(())
    }

    /// Per-RP (train, val, test) counts for an RP with `n` samples.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let nv = (n as f64 * self.val + 1e-9).floor() as usize;
        let nt = (n as f64 * self.test + 1e-9).floor() as usize;
        (n.saturating_sub(nv + nt), nv, nt)
    }
}

/// Splits each RP's samples into train/validation/test by the spec's ratios.
///
/// Validation and test take `floor(n · ratio)` samples per RP and train the
/// remainder. Each output keeps the acquisition order of its samples.
pub fn stratified_split(map: &RadioMap, spec: &SplitSpec) -> Result<(RadioMap, RadioMap, RadioMap)> {
    spec.validate()?;
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (rp_id, mut idx) in map.rp_groups() {
        let (ntr, nv, nt) = spec.counts(idx.len());
        if nv == 0 || nt == 0 || ntr == 0 {
            let needed = (1..)
                .find(|&n| {
                    let (a, b, c) = spec.counts(n);
                    a > 0 && b > 0 && c > 0
                })
                .unwrap_or(usize::MAX);
            return Err(Error::SplitInfeasible {
                rp_id,
                count: idx.len(),
                needed,
            });
        }
        let mut rng = rng::rng_from(spec.seed, &[rp_id as u64]);
        idx.shuffle(&mut rng);
        parts[1].extend_from_slice(&idx[..nv]);
        parts[2].extend_from_slice(&idx[nv..nv + nt]);
        parts[0].extend_from_slice(&idx[nv + nt..]);
    }
    for p in parts.iter_mut() {
        p.sort_unstable();
    }
    Ok((map.subset(&parts[0]), map.subset(&parts[1]), map.subset(&parts[2])))
}

/// RP-stratified fold assignment: within each RP the samples are shuffled
/// and dealt round-robin into `k` folds. Returns the fold index per sample.
pub fn stratified_folds(map: &RadioMap, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Invalid("need at least two folds".into()));
    }
    let mut fold = vec![0; map.len()];
    for (rp_id, mut idx) in map.rp_groups() {
        if idx.len() < 2 {
            return Err(Error::SplitInfeasible {
                rp_id,
                count: idx.len(),
                needed: 2,
            });
        }
        let mut rng = rng::rng_from(seed, &[0xF01D, rp_id as u64]);
        idx.shuffle(&mut rng);
        // Rotate the deal so small RPs do not all miss the same fold.
        let offset = rng.random_range(0..k);
        for (j, i) in idx.into_iter().enumerate() {
            fold[i] = (j + offset) % k;
        }
    }
    Ok(fold)
}
