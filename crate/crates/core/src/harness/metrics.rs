use serde::{Deserialize, Serialize};

use crate::dataset::LabelArray;
use crate::error::{Error, Result};

/// Test-set scores. `confusion[t][p]` counts nodes of true class `t`
/// predicted as `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// NaN for classes absent from the evaluated nodes.
    pub per_class_recall: Vec<f64>,
    pub confusion: Vec<Vec<usize>>,
}

impl Metrics {
    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }
}

/// Scores `predicted` (indexed by node) on the nodes in `eval_idx`.
pub fn evaluate(predicted: &[usize], labels: &LabelArray, eval_idx: &[usize]) -> Result<Metrics> {
    if eval_idx.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let c = labels.num_classes();
    let truth = labels.gather(eval_idx)?;
    let mut confusion = vec![vec![0usize; c]; c];
    for (&i, &t) in eval_idx.iter().zip(&truth) {
        let p = *predicted.get(i).ok_or_else(|| Error::LengthMismatch {
            what: "predictions",
            got: predicted.len(),
            expected: labels.len(),
        })?;
        if p >= c {
            return Err(Error::InvalidParameter(format!(
                "predicted class {p} out of range"
            )));
        }
        confusion[t][p] += 1;
    }
    let correct: usize = (0..c).map(|k| confusion[k][k]).sum();
    let per_class_recall = confusion
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let n: usize = row.iter().sum();
            if n == 0 {
                f64::NAN
            } else {
                row[k] as f64 / n as f64
            }
        })
        .collect();
    Ok(Metrics {
        accuracy: correct as f64 / eval_idx.len() as f64,
        per_class_recall,
        confusion,
    })
}
