//! Persistent-homology descriptors of single fingerprints.

use fpfuse::datamodel::{synth_radio_map, SynthSpec};
use fpfuse::preprocess::{fit_norm_stats, NormMode};
use fpfuse::topo::{embed_curve, ph_features, vr_persistence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // four corners of a unit square carry one loop born at 1 and killed at √2
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let d = vr_persistence(&square)?;
    println!("square  H0 {:?}\n        H1 {:?}", d.h0, d.h1);

    let map = synth_radio_map(&SynthSpec::default())?;
    let norm = fit_norm_stats(&map, NormMode::DbmZscore)?;
    for row in map.rss_rows().iter().step_by(300) {
        let z = norm.apply(row)?;
        let diagram = vr_persistence(&embed_curve(&z)?)?;
        let f = ph_features(&diagram);
        println!(
            "NoP0 {:>2} PE0 {:.3}  NoP1 {} PE1 {:.3}",
            f.nop0, f.pe0, f.nop1, f.pe1
        );
    }
    Ok(())
}
