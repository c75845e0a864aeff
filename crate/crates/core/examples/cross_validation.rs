//! Component-wise five-fold grid search on a small synthetic map.

use fpfuse::datamodel::{synth_radio_map, SynthSpec};
use fpfuse::eval::cv::{cv_grid_search, CvGrids};
use fpfuse::filters::FilterMethod;
use fpfuse::pipeline::ModelConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = synth_radio_map(&SynthSpec {
        n_rp: 10,
        samples_per_rp: 30,
        ..SynthSpec::default()
    })?;
    let mut base = ModelConfig::default();
    base.filter.method = FilterMethod::Kf;
    let grids = CvGrids {
        n_trees: vec![50, 100],
        max_depth: vec![Some(16), None],
        ..CvGrids::default()
    };
    let result = cv_grid_search(&map, &base, &grids, 5, 123)?;
    for t in &result.trials {
        println!("{:<7} {:<28} {:.4}", t.stage, t.candidate, t.mean_rmse);
    }
    let c = &result.config;
    println!(
        "selected gamma {} trees {} depth {:?} k {} h {} alpha {}",
        c.filter.q_gamma, c.rf.n_trees, c.rf.max_depth, c.k, c.fusion.h, c.fusion.alpha
    );
    Ok(())
}
