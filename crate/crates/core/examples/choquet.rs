//! Learns a two-source fuzzy measure from confidence pairs and uses it to
//! weight the RF and kNN estimates.

use fpfuse::datamodel::Position;
use fpfuse::fuse::{choquet, choquet_lambda, convex_combo, fit_choquet_measure, ChoquetMeasure};
use fpfuse::rng;
use rand::Rng as _;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = ChoquetMeasure { mu1: 0.7, mu2: 0.2 };
    let mut r = rng::rng(5);
    let scores: Vec<(f64, f64)> = (0..500).map(|_| (r.random::<f64>(), r.random::<f64>())).collect();
    let targets: Vec<f64> = scores.iter().map(|&(a, b)| choquet(a, b, &truth)).collect();
    let fit = fit_choquet_measure(&scores, &targets)?;
    println!("fitted mu1 {:.4} mu2 {:.4} sse {:.2e}", fit.measure.mu1, fit.measure.mu2, fit.sse);

    let (rf, knn) = (Position::new(3.0, 5.0), Position::new(3.4, 4.2));
    for (s_rf, s_knn) in [(0.9, 0.3), (0.5, 0.5), (0.2, 0.8)] {
        let l = choquet_lambda(s_rf, s_knn, &fit.measure);
        let p = convex_combo(&rf, &knn, l);
        println!("s = ({s_rf}, {s_knn})  lambda {l:.3}  -> ({:.3}, {:.3})", p.x, p.y);
    }
    Ok(())
}
