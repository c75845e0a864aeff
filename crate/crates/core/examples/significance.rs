//! Paired tests, Holm correction and a t-based confidence interval.

use fpfuse::eval::stats::{holm_bonferroni, mean_ci, paired_t_test, wilcoxon_signed_rank};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let baseline = [5.1, 5.6, 5.3, 5.9, 5.0, 5.4, 5.8, 5.2, 5.5, 5.7];
    let full = [3.3, 3.9, 3.4, 3.6, 3.1, 3.8, 3.5, 3.2, 3.7, 3.6];

    let w = wilcoxon_signed_rank(&baseline, &full)?;
    let t = paired_t_test(&baseline, &full)?;
    println!("wilcoxon W+ {} p {:.5} (exact: {})", w.w_plus, w.p, w.exact);
    println!("paired t {:.3} df {} p {:.3e}", t.t, t.df, t.p);

    let holm = holm_bonferroni(&[0.01, 0.04, 0.03], 0.05)?;
    println!("holm adjusted {:?} reject {:?}", holm.adjusted, holm.reject);

    println!("baseline {} m", mean_ci(&baseline, 0.95)?.display());
    println!("full     {} m", mean_ci(&full, 0.95)?.display());
    Ok(())
}
