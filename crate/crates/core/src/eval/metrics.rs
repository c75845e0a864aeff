use crate::datamodel::Position;
use crate::error::{check_dim, Error, Result};

/// Per-sample Euclidean errors.
pub fn errors(pred: &[Position], truth: &[Position]) -> Result<Vec<f64>> {
    check_dim(truth.len(), pred.len())?;
    Ok(pred.iter().zip(truth).map(|(p, t)| p.dist(t)).collect())
}

/// `sqrt(mean ‖p − t‖²)` in meters.
pub fn rmse_xy(pred: &[Position], truth: &[Position]) -> Result<f64> {
    check_dim(truth.len(), pred.len())?;
    if pred.is_empty() {
        return Err(Error::Invalid("RMSE needs at least one sample".into()));
    }
    let s: f64 = pred.iter().zip(truth).map(|(p, t)| p.dist2(t)).sum();
    Ok((s / pred.len() as f64).sqrt())
}

/// RMSE from per-sample errors.
pub fn rmse_of(errors: &[f64]) -> f64 {
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}
