//! Shared workloads for the criterion benches.

use adagcn::harness::{split_for, trial_features, Preprocess, SplitProtocol};
use adagcn::rng::rng_from_seed;
use adagcn::{
    generate_sbm, normalize_adjacency, Dataset, GcnParams, Matrix, NodeSplit, SbmSpec, SparseGraph,
};

/// A preprocessed SBM graph with a drawn split and Glorot parameters.
pub struct Workload {
    pub dataset: Dataset,
    pub a_hat: SparseGraph,
    pub features: Matrix,
    pub split: NodeSplit,
    pub params: GcnParams,
}

impl Workload {
    /// Three equal blocks of `block` nodes with expected degree near 10.
    pub fn sbm(block: usize, feature_dim: usize, hidden_dim: usize) -> Self {
        let p_in = (8.0 / block as f64).min(1.0);
        let p_out = (1.0 / block as f64).min(1.0);
        let dataset =
            generate_sbm(&SbmSpec::new(vec![block; 3], p_in, p_out, feature_dim, 1)).expect("sbm");
        let a_hat = normalize_adjacency(&dataset.graph, true);
        let features = trial_features(&dataset, &Preprocess::default(), 0.0, 0).expect("features");
        let protocol = SplitProtocol {
            majority_class: Some(0),
            n_majority: 30,
            n_minority: 10,
            val_size: block / 4,
            test_size: block / 2,
            ..Default::default()
        };
        let (_, split) = split_for(&dataset, &protocol, 10, 0).expect("split");
        let params = GcnParams::glorot(feature_dim, hidden_dim, 3, &mut rng_from_seed(0));
        Self {
            dataset,
            a_hat,
            features,
            split,
            params,
        }
    }
}
