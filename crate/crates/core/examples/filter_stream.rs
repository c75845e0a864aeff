//! Smooths one noisy RSS stream with the Kalman, unscented Kalman and
//! particle filters and compares the residual error against the clean level.

use fpfuse::filters::{filter_stream, FilterConfig, FilterMethod};
use fpfuse::rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = 0.8;
    let noise = Normal::new(0.0, 0.5)?;
    let mut r = rng::rng(11);
    let series: Vec<Vec<f64>> = (0..200).map(|_| vec![truth + noise.sample(&mut r)]).collect();

    let rmse = |rows: &[Vec<f64>]| {
        (rows.iter().map(|v| (v[0] - truth).powi(2)).sum::<f64>() / rows.len() as f64).sqrt()
    };
    println!("raw      rmse {:.4}", rmse(&series));
    for method in [FilterMethod::Kf, FilterMethod::Ukf, FilterMethod::Pf] {
        let mut cfg = FilterConfig::new(method, vec![0.25]);
        cfg.q_gamma = 0.05;
        cfg.pf.predict_sigma = 0.1;
        let out = filter_stream(&series, &cfg)?;
        println!("{:<8} rmse {:.4}", format!("{method:?}"), rmse(&out));
    }
    Ok(())
}
