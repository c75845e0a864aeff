//! Per-channel scalar RSS denoising.
//!
//! Each channel is an independent random walk `x_t = x_{t-1} + v`, observed
//! as `z_t = x_t + n` with `v ~ N(0, Q_i)` and `n ~ N(0, R_i)`. Three filters
//! track it: a Kalman filter, an unscented Kalman filter (identical to the KF
//! on this linear model up to rounding), and a bootstrap particle filter that
//! resamples systematically whenever the effective sample size drops below
//! `τ·M_p`.
//!
//! Filters run in normalized units, after [`crate::preprocess::NormStats::apply`].

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMethod {
    #[default]
    None,
    Kf,
    Ukf,
    Pf,
}

impl std::str::FromStr for FilterMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "kf" => Ok(Self::Kf),
            "ukf" => Ok(Self::Ukf),
            "pf" => Ok(Self::Pf),
            other => Err(Error::Invalid(format!("unknown filter method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PfConfig {
    /// M_p.
    pub n_particles: usize,
    /// Resample when ESS < τ·M_p.
    pub ess_tau: f64,
    /// Std of the random-walk prediction noise.
    pub predict_sigma: f64,
    pub seed: u64,
}

impl Default for PfConfig {
    fn default() -> Self {
        Self {
            n_particles: 10_000,
            ess_tau: 0.3,
            predict_sigma: 1.0,
            seed: 123,
        }
    }
}

/// Scalar unscented-transform parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UkfParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for UkfParams {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            beta: 2.0,
            kappa: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub method: FilterMethod,
    /// Q_i = γ·R_i.
    pub q_gamma: f64,
    /// Measurement variance per channel.
    pub r: Vec<f64>,
    pub pf: PfConfig,
    pub ukf: UkfParams,
}

impl FilterConfig {
    pub fn new(method: FilterMethod, r: Vec<f64>) -> Self {
        Self {
            method,
            q_gamma: 0.25,
            r,
            pf: PfConfig::default(),
            ukf: UkfParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Invalid("measurement variances must be > 0".into()));
        }
        if !(self.q_gamma >= 0.0) {
            return Err(Error::Invalid("q_gamma must be >= 0".into()));
        }
        if self.method == FilterMethod::Pf {
            if self.pf.n_particles < 2 {
                return Err(Error::Invalid("particle filter needs M_p >= 2".into()));
            }
            if !(self.pf.ess_tau > 0.0 && self.pf.ess_tau < 1.0) {
                return Err(Error::Invalid("ESS threshold must lie in (0, 1)".into()));
            }
            if !(self.pf.predict_sigma >= 0.0) {
                return Err(Error::Invalid("predict sigma must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// Process variances Q_i.
    pub fn q(&self) -> Vec<f64> {
        self.r.iter().map(|r| self.q_gamma * r).collect()
    }
}

// ---------------------------------------------------------------------------
// Kalman

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KfState {
    pub x_hat: f64,
    pub p: f64,
}

/// One predict/update cycle of the scalar random-walk Kalman filter.
pub fn kf_step(state: KfState, z: f64, q: f64, r: f64) -> KfState {
    let p_pred = state.p + q;
    let k = p_pred / (p_pred + r);
    KfState {
        x_hat: state.x_hat + k * (z - state.x_hat),
        p: (1.0 - k) * p_pred,
    }
}

/// Scalar sigma points and weights `(points, mean weights, cov weights)`.
fn sigma_points(x: f64, p: f64, prm: &UkfParams) -> ([f64; 3], [f64; 3], [f64; 3]) {
    const N: f64 = 1.0;
    let lambda = prm.alpha * prm.alpha * (N + prm.kappa) - N;
    let spread = ((N + lambda) * p).sqrt();
    let wm0 = lambda / (N + lambda);
    let wi = 1.0 / (2.0 * (N + lambda));
    let wc0 = wm0 + (1.0 - prm.alpha * prm.alpha + prm.beta);
    ([x, x + spread, x - spread], [wm0, wi, wi], [wc0, wi, wi])
}

/// Weighted mean and variance of transformed sigma points, accumulated as
/// deviations from the central point.
fn unscented_moments(pts: &[f64; 3], wm: &[f64; 3], wc: &[f64; 3]) -> (f64, f64) {
    let center = pts[0];
    let mean = center + (0..3).map(|i| wm[i] * (pts[i] - center)).sum::<f64>();
    let var = (0..3).map(|i| wc[i] * (pts[i] - mean) * (pts[i] - mean)).sum();
    (mean, var)
}

/// One unscented predict/update cycle with identity process and measurement
/// models.
pub fn ukf_step(state: KfState, z: f64, q: f64, r: f64, prm: &UkfParams) -> Result<KfState> {
    // predict through f(x) = x
    let (pts, wm, wc) = sigma_points(state.x_hat, state.p, prm);
    let (x_pred, pv) = unscented_moments(&pts, &wm, &wc);
    let p_pred = pv + q;
    if !(p_pred > 0.0) || !p_pred.is_finite() {
        return Err(Error::Numerical(format!("predicted variance {p_pred}")));
    }
    // update through h(x) = x
    let (pts, wm, wc) = sigma_points(x_pred, p_pred, prm);
    let (z_pred, pzz0) = unscented_moments(&pts, &wm, &wc);
    let pzz = pzz0 + r;
    let pxz: f64 = (0..3).map(|i| wc[i] * (pts[i] - x_pred) * (pts[i] - z_pred)).sum();
    let k = pxz / pzz;
    let p = p_pred - k * k * pzz;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Numerical(format!("posterior variance {p}")));
    }
    Ok(KfState {
        x_hat: x_pred + k * (z - z_pred),
        p,
    })
}

// ---------------------------------------------------------------------------
// Particles

#[derive(Debug, Clone, PartialEq)]
pub struct PfState {
    pub particles: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Diagnostics of one particle-filter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfStep {
    pub estimate: f64,
    /// ESS after normalization, before any resampling.
    pub ess: f64,
    pub resampled: bool,
    /// All weights vanished and were reset to uniform.
    pub degenerate: bool,
}

impl PfState {
    /// `n` particles drawn from `N(center, spread²)` with uniform weights.
    pub fn gaussian(center: f64, spread: f64, n: usize, rng: &mut Rng) -> Self {
        let particles = (0..n)
            .map(|_| center + spread * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Self {
            particles,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// `1 / Σ w²`, clamped to `[1, M_p]`.
    pub fn ess(&self) -> f64 {
        effective_sample_size(&self.weights)
    }

    /// Weighted mean `Σ w·x`.
    pub fn estimate(&self) -> f64 {
        let reference = self.particles[0];
        reference
            + self
                .weights
                .iter()
                .zip(&self.particles)
                .map(|(w, x)| w * (x - reference))
                .sum::<f64>()
    }

    fn reset_uniform(&mut self) {
        let w = 1.0 / self.len() as f64;
        self.weights.iter_mut().for_each(|v| *v = w);
    }
}

pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().map(|w| w * w).sum();
    (1.0 / s).clamp(1.0, weights.len() as f64)
}

/// Systematic resampling: one offset `u ~ U[0, 1/M)`, then picks at
/// `u + m/M` along the cumulative weights. Returns the chosen indices.
pub fn systematic_resample_indices(weights: &[f64], rng: &mut Rng) -> Vec<usize> {
    let m = weights.len();
    let step = 1.0 / m as f64;
    let u0 = rng.random::<f64>() * step;
    let mut out = Vec::with_capacity(m);
    let mut cum = weights[0];
    let mut i = 0;
    for k in 0..m {
        let u = u0 + k as f64 * step;
        while u >= cum && i + 1 < m {
            i += 1;
            cum += weights[i];
        }
        out.push(i);
    }
    out
}

/// One particle-filter cycle: random-walk predict, Gaussian likelihood
/// update, normalization, ESS-triggered systematic resampling.
pub fn pf_step(state: &mut PfState, z: f64, r: f64, cfg: &PfConfig, rng: &mut Rng) -> PfStep {
    let sigma = cfg.predict_sigma;
    if sigma > 0.0 {
        for x in state.particles.iter_mut() {
            *x += sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }
    // log-likelihoods shifted by their maximum; the shift cancels on normalization
    let inv = 1.0 / (2.0 * r);
    let mut max_ll = f64::NEG_INFINITY;
    for x in &state.particles {
        max_ll = max_ll.max(-(x - z) * (x - z) * inv);
    }
    let mut total = 0.0;
    for (w, x) in state.weights.iter_mut().zip(&state.particles) {
        *w *= (-(x - z) * (x - z) * inv - max_ll).exp();
        total += *w;
    }
    let degenerate = !(total > 0.0) || !total.is_finite();
    if degenerate {
        state.reset_uniform();
    } else {
        state.weights.iter_mut().for_each(|w| *w /= total);
    }

    let ess = state.ess();
    let resampled = ess < cfg.ess_tau * state.len() as f64;
    if resampled {
        let idx = systematic_resample_indices(&state.weights, rng);
        state.particles = idx.iter().map(|&i| state.particles[i]).collect();
        state.reset_uniform();
    }
    PfStep {
        estimate: state.estimate(),
        ess,
        resampled,
        degenerate,
    }
}

// ---------------------------------------------------------------------------
// Streams

/// Filter state of one channel, initialized from its first observation.
#[derive(Debug, Clone)]
pub enum ChannelFilter {
    Identity,
    Kalman { state: KfState, q: f64, r: f64 },
    Unscented { state: KfState, q: f64, r: f64, params: UkfParams },
    Particle { state: PfState, r: f64, cfg: PfConfig, rng: Box<Rng> },
}

impl ChannelFilter {
    pub fn init(cfg: &FilterConfig, channel: usize, z0: f64, stream_id: u64) -> Self {
        let r = cfg.r[channel];
        let q = cfg.q_gamma * r;
        match cfg.method {
            FilterMethod::None => Self::Identity,
            FilterMethod::Kf => Self::Kalman {
                state: KfState { x_hat: z0, p: r },
                q,
                r,
            },
            FilterMethod::Ukf => Self::Unscented {
                state: KfState { x_hat: z0, p: r },
                q,
                r,
                params: cfg.ukf,
            },
            FilterMethod::Pf => {
                let mut rng = rng::rng_from(cfg.pf.seed, &[stream_id, channel as u64]);
                let state = PfState::gaussian(z0, cfg.pf.predict_sigma, cfg.pf.n_particles, &mut rng);
                Self::Particle {
                    state,
                    r,
                    cfg: cfg.pf,
                    rng: Box::new(rng),
                }
            }
        }
    }

    pub fn update(&mut self, z: f64) -> Result<f64> {
        match self {
            Self::Identity => Ok(z),
            Self::Kalman { state, q, r } => {
                *state = kf_step(*state, z, *q, *r);
                Ok(state.x_hat)
            }
            Self::Unscented { state, q, r, params } => {
                *state = ukf_step(*state, z, *q, *r, params)?;
                Ok(state.x_hat)
            }
            Self::Particle { state, r, cfg, rng } => Ok(pf_step(state, z, *r, cfg, rng).estimate),
        }
    }
}

/// Stateful multi-channel filter for online use.
#[derive(Debug, Clone)]
pub struct StreamFilter {
    cfg: FilterConfig,
    stream_id: u64,
    channels: Option<Vec<ChannelFilter>>,
}

impl StreamFilter {
    pub fn new(cfg: FilterConfig, stream_id: u64) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            stream_id,
            channels: None,
        })
    }

    pub fn config(&self) -> &FilterConfig {
        &self.cfg
    }

    /// Filters one observation vector; the first call initializes every
    /// channel at its observation.
    pub fn step(&mut self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cfg.r.len(), z.len())?;
        if self.cfg.method == FilterMethod::None {
            return Ok(z.to_vec());
        }
        let channels = self.channels.get_or_insert_with(|| {
            z.iter()
                .enumerate()
                .map(|(i, &z0)| ChannelFilter::init(&self.cfg, i, z0, self.stream_id))
                .collect()
        });
        channels
            .iter_mut()
            .zip(z)
            .map(|(c, &v)| c.update(v))
            .collect()
    }

    pub fn reset(&mut self) {
        self.channels = None;
    }
}

/// Filters a T × d series channel by channel.
pub fn filter_stream(series: &[Vec<f64>], cfg: &FilterConfig) -> Result<Vec<Vec<f64>>> {
    filter_stream_with_id(series, cfg, 0)
}

/// [`filter_stream`] with an explicit stream identifier; particle seeds are
/// derived from `(cfg.pf.seed, stream_id, channel)`.
pub fn filter_stream_with_id(
    series: &[Vec<f64>],
    cfg: &FilterConfig,
    stream_id: u64,
) -> Result<Vec<Vec<f64>>> {
    if series.is_empty() {
        return Err(Error::Invalid("filter stream needs at least one observation".into()));
    }
    cfg.validate()?;
    let d = cfg.r.len();
    for row in series {
        check_dim(d, row.len())?;
    }
    if cfg.method == FilterMethod::None {
        return Ok(series.to_vec());
    }
    let run_channel = |i: usize| -> Result<Vec<f64>> {
        let mut f = ChannelFilter::init(cfg, i, series[0][i], stream_id);
        series.iter().map(|row| f.update(row[i])).collect()
    };
    let columns: Vec<Vec<f64>> = if cfg.method == FilterMethod::Pf {
        (0..d).into_par_iter().map(run_channel).collect::<Result<_>>()?
    } else {
        (0..d).map(run_channel).collect::<Result<_>>()?
    };
    Ok((0..series.len())
        .map(|t| columns.iter().map(|c| c[t]).collect())
        .collect())
}
