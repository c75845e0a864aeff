//! Trains the random forest and the weighted kNN regressor on normalized
//! fingerprints and reports each one's test RMSE.

use fpfuse::datamodel::{stratified_split, synth_radio_map, Position, SplitSpec, SynthSpec};
use fpfuse::eval::rmse_xy;
use fpfuse::preprocess::{fit_channel_variances, fit_norm_stats, NormMode};
use fpfuse::regress::{build_knn_index, predict_wknn, train_rf, RfConfig, DEFAULT_EPS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = synth_radio_map(&SynthSpec::default())?;
    let (train, _, test) = stratified_split(&map, &SplitSpec::standard(3))?;
    let norm = fit_norm_stats(&train, NormMode::DbmZscore)?;
    let x_train = norm.apply_rows(&train.rss_rows())?;
    let x_test = norm.apply_rows(&test.rss_rows())?;
    let truth = test.positions();

    let rf = train_rf(&x_train, &train.positions(), &RfConfig::default())?;
    let pred: Vec<Position> = x_test.iter().map(|x| rf.predict(x)).collect::<Result<_, _>>()?;
    println!("RF   ({} trees) rmse {:.3} m", rf.trees.len(), rmse_xy(&pred, &truth)?);

    let index = build_knn_index(&x_train, &train.positions(), &fit_channel_variances(&x_train)?)?;
    for k in [3, 5, 7, 9] {
        let pred: Vec<Position> = x_test
            .iter()
            .map(|x| predict_wknn(&index, x, k, DEFAULT_EPS))
            .collect::<Result<_, _>>()?;
        println!("wKNN (k = {k})     rmse {:.3} m", rmse_xy(&pred, &truth)?);
    }
    Ok(())
}
