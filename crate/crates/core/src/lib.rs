pub mod bench;
pub mod cli;
pub mod datamodel;
pub mod error;
pub mod eval;
pub mod filters;
pub mod pipeline;
pub mod fuse;
pub mod preprocess;
pub mod regress;
pub mod rng;
pub mod topo;
