//! Stochastic-block-model fixtures.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LabelArray};
use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed};

const EDGE_STREAM: u64 = 0x4544_4745;
const FEATURE_STREAM: u64 = 0x4645_4154;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub feature_dim: usize,
    /// Standard deviation of the Gaussian noise around each class mean.
    #[serde(default = "default_feature_std")]
    pub feature_std: f64,
    pub seed: u64,
}

fn default_feature_std() -> f64 {
    1.0
}

impl SbmSpec {
    pub fn new(
        block_sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        feature_dim: usize,
        seed: u64,
    ) -> Self {
        Self {
            block_sizes,
            p_in,
            p_out,
            feature_dim,
            feature_std: default_feature_std(),
            seed,
        }
    }
}

/// Samples an SBM graph with class-separable features.
///
/// Every pair `i < j` is linked with probability `p_in` inside a block and
/// `p_out` across blocks. Class `k` has mean `1.0` on feature columns
/// `j ≡ k (mod C)` and `0.0` elsewhere; each node draws its features as
/// `max(0, mean + N(0, feature_std²))` so rows stay nonnegative. Labels are
/// block ids and every node is labeled. No fixed split is attached.
pub fn generate_sbm(spec: &SbmSpec) -> Result<Dataset> {
    if spec.block_sizes.is_empty() || spec.block_sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "every block must contain at least one node".into(),
        ));
    }
    for (name, p) in [("p_in", spec.p_in), ("p_out", spec.p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "{name}={p} outside [0, 1]"
            )));
        }
    }
    if spec.feature_dim == 0 {
        return Err(Error::InvalidParameter(
            "feature_dim must be at least 1".into(),
        ));
    }
    let noise = Normal::new(0.0, spec.feature_std)
        .map_err(|e| Error::InvalidParameter(format!("feature_std: {e}")))?;

    let num_classes = spec.block_sizes.len();
    let block: Vec<usize> = spec
        .block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let n = block.len();

    let mut edge_rng = rng_from_seed(derive_seed(spec.seed, EDGE_STREAM));
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block[i] == block[j] {
                spec.p_in
            } else {
                spec.p_out
            };
            if edge_rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let graph = SparseGraph::from_edges(n, edges)?;

    let mut feature_rng = rng_from_seed(derive_seed(spec.seed, FEATURE_STREAM));
    let mut features = Matrix::zeros(n, spec.feature_dim);
    for (i, &k) in block.iter().enumerate() {
        for (j, v) in features.row_mut(i).iter_mut().enumerate() {
            let mean = if j % num_classes == k { 1.0 } else { 0.0 };
            *v = (mean + noise.sample(&mut feature_rng)).max(0.0);
        }
    }

    let labels = LabelArray::new(block.into_iter().map(Some).collect(), num_classes)?;
    Dataset::new(graph, features, labels, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_classes() {
        let d = generate_sbm(&SbmSpec::new(vec![50, 50, 50], 0.3, 0.02, 8, 7)).unwrap();
        assert_eq!(d.num_nodes(), 150);
        assert_eq!(d.num_classes(), 3);
        assert_eq!(d.num_features(), 8);
        assert!(d.graph.is_symmetric());
        assert!(d.features.as_slice().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn disjoint_cliques() {
        let d = generate_sbm(&SbmSpec::new(vec![4, 5], 1.0, 0.0, 2, 1)).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                if i == j {
                    continue;
                }
                let same = (i < 4) == (j < 4);
                assert_eq!(d.graph.get(i, j), if same { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = SbmSpec::new(vec![20, 20], 0.2, 0.05, 4, 3);
        assert_eq!(generate_sbm(&spec).unwrap(), generate_sbm(&spec).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(generate_sbm(&SbmSpec::new(vec![3, 0], 0.5, 0.1, 2, 0)).is_err());
        assert!(generate_sbm(&SbmSpec::new(vec![], 0.5, 0.1, 2, 0)).is_err());
        assert!(generate_sbm(&SbmSpec::new(vec![3], 1.5, 0.1, 2, 0)).is_err());
        assert!(generate_sbm(&SbmSpec::new(vec![3], 0.5, -0.1, 2, 0)).is_err());
    }
}
