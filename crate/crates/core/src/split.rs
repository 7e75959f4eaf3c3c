//! Imbalanced training-set construction.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{LabelArray, NodeSplit};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, sample_without_replacement};

/// Per-class training counts and held-out sizes for one split draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImbalanceSpec {
    pub majority_class: usize,
    pub n_majority: usize,
    pub n_minority: usize,
    pub val_size: usize,
    pub test_size: usize,
}

/// Draws a training set with `n_majority` nodes of `majority_class` and
/// `n_minority` nodes of every other class.
///
/// With `fixed` present its validation and test sets are kept as-is and the
/// training set is drawn from labeled nodes outside them. Otherwise the
/// validation set and then the test set are drawn from the labeled nodes left
/// after the training draw. Classes are visited in index order from a single
/// seeded stream.
pub fn make_imbalanced_split(
    labels: &LabelArray,
    spec: &ImbalanceSpec,
    fixed: Option<&NodeSplit>,
    seed: u64,
) -> Result<NodeSplit> {
    let num_classes = labels.num_classes();
    if spec.majority_class >= num_classes {
        return Err(Error::InvalidParameter(format!(
            "majority class {} but only {num_classes} classes",
            spec.majority_class
        )));
    }
    let held_out: BTreeSet<usize> = fixed
        .map(|s| s.val.iter().chain(&s.test).copied().collect())
        .unwrap_or_default();

    let mut rng = rng_from_seed(seed);
    let mut train = Vec::new();
    for (class, nodes) in labels.nodes_by_class().into_iter().enumerate() {
        let pool: Vec<usize> = nodes
            .into_iter()
            .filter(|i| !held_out.contains(i))
            .collect();
        let needed = if class == spec.majority_class {
            spec.n_majority
        } else {
            spec.n_minority
        };
        if pool.len() < needed {
            return Err(Error::InsufficientNodes {
                class,
                needed,
                available: pool.len(),
            });
        }
        train.extend(sample_without_replacement(&pool, needed, &mut rng));
    }
    train.sort_unstable();

    let split = match fixed {
        Some(fixed) => NodeSplit {
            train,
            val: fixed.val.clone(),
            test: fixed.test.clone(),
        },
        None => {
            let in_train: BTreeSet<usize> = train.iter().copied().collect();
            let rest: Vec<usize> = (0..labels.len())
                .filter(|i| labels.get(*i).is_some() && !in_train.contains(i))
                .collect();
            let needed = spec.val_size + spec.test_size;
            if rest.len() < needed {
                return Err(Error::InvalidParameter(format!(
                    "{} labeled nodes remain after the training draw, need {needed} for val+test",
                    rest.len()
                )));
            }
            let val = sample_without_replacement(&rest, spec.val_size, &mut rng);
            let val_set: BTreeSet<usize> = val.iter().copied().collect();
            let rest: Vec<usize> = rest.into_iter().filter(|i| !val_set.contains(i)).collect();
            let test = sample_without_replacement(&rest, spec.test_size, &mut rng);
            NodeSplit { train, val, test }
        }
    };
    split.validate(labels)?;
    Ok(split)
}
