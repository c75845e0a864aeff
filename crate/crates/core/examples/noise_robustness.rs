//! Degradation of the full model under jitter and bursty outliers.

use fpfuse::datamodel::{stratified_split, synth_radio_map, Position, SplitSpec, SynthSpec};
use fpfuse::eval::noise::{bursty_grid, jitter_grid};
use fpfuse::eval::rmse_xy;
use fpfuse::pipeline::{ModelConfig, Pipeline};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = synth_radio_map(&SynthSpec::default())?;
    let (train, val, test) = stratified_split(&map, &SplitSpec::standard(123))?;
    let model = Pipeline::fit(&train, &val, &ModelConfig::default())?;
    let truth = test.positions();
    let rmse = |noise| -> Result<f64, fpfuse::error::Error> {
        let p: Vec<Position> = model.predict_map(&test, noise)?.iter().map(|e| e.position).collect();
        rmse_xy(&p, &truth)
    };
    let clean = rmse(None)?;
    println!("{:<28} {clean:.3} m", "clean");
    for spec in jitter_grid(123).iter().chain(&bursty_grid(123)) {
        let v = rmse(Some(spec))?;
        println!("{:<28} {v:.3} m ({:+.1}%)", spec.label(), 100.0 * (v - clean) / clean);
    }
    Ok(())
}
