//! Runs the four-variant ablation ladder on seeded synthetic maps, clean and
//! with 10% raw-dBm noise, and prints the per-variant table and paired tests.
//!
//! ```text
//! cargo run --release --example ablation_ladder -- [repeats]
//! ```

use fpfuse::datamodel::SynthSpec;
use fpfuse::eval::ablation::{run_ablation_ladder, AblationConfig, DataSource, TestLevel, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let repeats = std::env::args().nth(1).map_or(Ok(10), |s| s.parse())?;
    let cfg = AblationConfig {
        repeats,
        ..AblationConfig::default()
    };
    let t0 = std::time::Instant::now();
    let report = run_ablation_ladder(&DataSource::Synth(SynthSpec::default()), &cfg)?;
    print!("{}", report.table());
    for c in &report.conditions {
        for level in [TestLevel::Split, TestLevel::Sample] {
            if let Some(t) = report.test(Variant::Full, c, level) {
                println!(
                    "{c:<28} {level:?}: full vs PF+RF  wilcoxon p = {:.4}  holm p = {:.4}",
                    t.wilcoxon.p, t.holm_p
                );
            }
        }
    }
    for row in report.summary.iter().filter(|r| r.mean_rmse_argmax.is_some()) {
        println!(
            "{:<18} {:<28} peak-cell rmse {:.3}",
            row.variant.name(),
            row.condition,
            row.mean_rmse_argmax.unwrap()
        );
    }
    let clean = report.rmse_of(Variant::Full, "clean");
    let noisy = report.rmse_of(Variant::Full, &report.conditions[1]);
    println!("clean: {clean:.3?}\nnoisy: {noisy:.3?}");
    println!("elapsed {:.1} s", t0.elapsed().as_secs_f64());
    Ok(())
}
