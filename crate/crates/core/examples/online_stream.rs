//! Saves a fitted model, reloads it and localizes a walk of scans one at a
//! time with filter state carried between scans.

use fpfuse::datamodel::{stratified_split, synth_radio_map, SplitSpec, SynthSpec};
use fpfuse::pipeline::{ModelConfig, Pipeline};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = synth_radio_map(&SynthSpec::default())?;
    let (train, val, test) = stratified_split(&map, &SplitSpec::standard(123))?;
    let model = Pipeline::fit(&train, &val, &ModelConfig::default())?;

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("model.json");
    model.save(&path)?;
    let model = Pipeline::load(&path)?;
    println!("artifact {} bytes", std::fs::metadata(&path)?.len());

    // a device standing at one RP for a dozen scans
    let rp = test.samples()[0].rp_id;
    let at_rp: Vec<_> = test.samples().iter().filter(|s| s.rp_id == rp).collect();
    let mut online = model.online(true)?;
    for (i, s) in at_rp.iter().enumerate() {
        let e = online.step(&s.fingerprint.rss)?;
        println!(
            "scan {i:>2}: ({:.2}, {:.2})  error {:.2} m",
            e.position.x,
            e.position.y,
            e.position.dist(&s.position)
        );
    }
    Ok(())
}
