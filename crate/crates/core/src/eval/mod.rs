//! Evaluation harness: noise models, metrics, statistics, cross-validation
//! and the ablation ladder.

pub mod ablation;
pub mod cv;
pub mod metrics;
pub mod noise;
pub mod stats;

pub use metrics::rmse_xy;
pub use noise::{NoiseKind, NoiseSpec};
