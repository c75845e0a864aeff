//! Both normalization modes on the same training rows.

use fpfuse::datamodel::{synth_radio_map, SynthSpec};
use fpfuse::preprocess::{fit_channel_variances, fit_norm_stats, NormMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = synth_radio_map(&SynthSpec::default())?;
    for mode in [NormMode::DbmZscore, NormMode::MwZscore] {
        let stats = fit_norm_stats(&map, mode)?;
        let z = stats.apply_rows(&map.rss_rows())?;
        let var = fit_channel_variances(&z)?;
        println!("{mode:?}");
        let sci = |v: &[f64]| v[..3].iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ");
        println!("  mu    [{}]", sci(stats.mu()));
        println!("  sigma [{}]", sci(stats.sigma()));
        println!("  first row  {:.3?}", &z[0][..3]);
        println!("  variances  {:.4?}", &var.var()[..3]);
    }
    Ok(())
}
