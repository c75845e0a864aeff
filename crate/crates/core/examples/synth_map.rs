//! Generates a synthetic radio map, writes it as CSV and reads it back.

use fpfuse::datamodel::{load_radio_map, save_radio_map, synth_radio_map, CsvSchema, SynthSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SynthSpec {
        seed: 7,
        ..SynthSpec::default()
    };
    let map = synth_radio_map(&spec)?;
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("synth.csv");
    save_radio_map(&map, &path)?;

    let back = load_radio_map(&path, &CsvSchema::with_counts(spec.n_wifi, spec.n_ble))?;
    println!(
        "{} samples, {} RPs, {} channels ({} Wi-Fi + {} BLE)",
        back.len(),
        back.rp_groups().len(),
        back.dim(),
        back.layout().n_wifi,
        back.layout().n_ble
    );
    let first = &back.samples()[0];
    println!("RP {} at ({:.2}, {:.2}): {:.1?}", first.rp_id, first.position.x, first.position.y, first.fingerprint.rss);
    Ok(())
}
