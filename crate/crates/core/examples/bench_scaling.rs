//! Fits a model on a synthetic map and measures online latency per stage,
//! then how latency scales with forest size, particle count and grid size.

use fpfuse::bench::{run_bench, BenchConfig};
use fpfuse::datamodel::{stratified_split, synth_radio_map, SplitSpec, SynthSpec};
use fpfuse::pipeline::{ModelConfig, Pipeline};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = synth_radio_map(&SynthSpec::default())?;
    let (train, val, _) = stratified_split(&map, &SplitSpec::standard(1))?;
    let model = Pipeline::fit(&train, &val, &ModelConfig::default())?;
    let report = run_bench(&model, &BenchConfig::default())?;
    for s in &report.stages {
        println!("{:<10} {:>10.2} µs", s.stage, s.median_s * 1e6);
    }
    for s in &report.scaling {
        let us: Vec<String> = s.median_s.iter().map(|t| format!("{:.1}", t * 1e6)).collect();
        println!("{:<10} {:?} -> [{}] µs, slope {:.2}", s.parameter, s.values, us.join(", "), s.slope);
    }
    println!("PF/KF ratio {:.1}", report.pf_kf_ratio);
    println!("no filter   {:.3} µs", report.none_filter_median_s * 1e6);
    Ok(())
}
