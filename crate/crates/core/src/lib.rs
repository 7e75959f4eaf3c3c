//! Adaptive boosting over two-layer graph convolutional networks for
//! imbalanced semi-supervised node classification.
//!
//! The crate is organized bottom-up:
//!
//! - [`graph`], [`dataset`], [`split`], [`sbm`]: sparse graphs, dataset I/O,
//!   imbalanced split construction, feature perturbation and SBM fixtures.
//! - [`gcn`]: forward pass, sample-weighted losses, hand-written backprop,
//!   Adam and the single-model training loop.
//! - [`boosting`]: sample-weight updates, classifier weights, sequential
//!   ensemble training with parameter transfer, and ensemble prediction.
//! - [`harness`]: seeded multi-trial experiments, sweeps and CSV reports.

pub mod boosting;
pub mod dataset;
pub mod error;
pub mod gcn;
pub mod graph;
pub mod harness;
pub mod matrix;
pub mod rng;
pub mod sbm;
pub mod split;

pub use boosting::{
    ensemble_predict, train_adagcn, BoostConfig, EnsembleMember, EnsembleModel, SampleWeights,
};
pub use dataset::{
    load_dataset, save_dataset, Dataset, FeatureFormat, FeatureMatrix, LabelArray, NodeSplit,
};
pub use error::{Error, Result};
pub use gcn::{predict, train_gcn, GcnParams, LossKind, PredictionMatrix, TrainConfig};
pub use graph::{normalize_adjacency, SparseGraph};
pub use matrix::Matrix;
pub use sbm::{generate_sbm, SbmSpec};
pub use split::{make_imbalanced_split, ImbalanceSpec};
