//! Coordinate regressors: a multi-target random forest and a
//! variance-weighted kNN over a kd-tree.

pub mod forest;
pub mod kdtree;
pub mod knn;

pub use forest::{predict_rf, train_rf, RfConfig, RfModel};
pub use knn::{build_knn_index, predict_wknn, KnnIndex, DEFAULT_EPS};
