use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::boosting::BoostConfig;
use crate::error::{Error, Result};
use crate::gcn::{LossKind, TrainConfig};
use crate::sbm::SbmSpec;
use crate::split::ImbalanceSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Gcn,
    GcnFocal,
    GcnCbFocal,
    Adagcn,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Gcn => "gcn",
            Self::GcnFocal => "gcn_focal",
            Self::GcnCbFocal => "gcn_cb_focal",
            Self::Adagcn => "adagcn",
        }
    }

    pub fn is_ensemble(self) -> bool {
        self == Self::Adagcn
    }

    /// Loss forced by the single-model kinds. The ensemble keeps whatever
    /// `train.loss_kind` says.
    pub fn loss_kind(self) -> Option<LossKind> {
        match self {
            Self::Gcn => Some(LossKind::WeightedCe),
            Self::GcnFocal => Some(LossKind::Focal),
            Self::GcnCbFocal => Some(LossKind::CbFocal),
            Self::Adagcn => None,
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcn" => Ok(Self::Gcn),
            "gcn_focal" | "gcn-focal" => Ok(Self::GcnFocal),
            "gcn_cb_focal" | "gcn-cb-focal" => Ok(Self::GcnCbFocal),
            "adagcn" => Ok(Self::Adagcn),
            other => Err(Error::InvalidParameter(format!(
                "unknown model kind '{other}'"
            ))),
        }
    }
}

/// One model configuration on the experiment's model axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Display name used to group results; defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: ModelKind,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "defaults::num_estimators")]
    pub num_estimators: usize,
    #[serde(default = "defaults::shrinkage")]
    pub shrinkage: f64,
    #[serde(default = "defaults::yes")]
    pub transfer_learning: bool,
    #[serde(default)]
    pub use_alpha_in_prediction: bool,
}

mod defaults {
    pub fn num_estimators() -> usize {
        5
    }
    pub fn shrinkage() -> f64 {
        1.0
    }
    pub fn yes() -> bool {
        true
    }
    pub fn n_majority() -> usize {
        30
    }
    pub fn n_minority() -> usize {
        10
    }
    pub fn val_size() -> usize {
        500
    }
    pub fn test_size() -> usize {
        1000
    }
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        let boost = BoostConfig::default();
        Self {
            name: None,
            kind,
            train: TrainConfig::default(),
            num_estimators: boost.num_estimators,
            shrinkage: boost.shrinkage,
            transfer_learning: boost.transfer_learning,
            use_alpha_in_prediction: boost.use_alpha_in_prediction,
        }
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or(self.kind.as_str())
    }

    /// Ensemble size actually trained; single models count as one.
    pub fn effective_estimators(&self) -> usize {
        if self.kind.is_ensemble() {
            self.num_estimators
        } else {
            1
        }
    }

    /// Training config with the kind's loss applied and `seed` installed.
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        let mut config = self.train.clone();
        if let Some(loss) = self.kind.loss_kind() {
            config.loss_kind = loss;
        }
        config.seed = seed;
        config
    }

    pub fn boost_config(&self, seed: u64) -> BoostConfig {
        BoostConfig {
            num_estimators: self.num_estimators,
            shrinkage: self.shrinkage,
            transfer_learning: self.transfer_learning,
            use_alpha_in_prediction: self.use_alpha_in_prediction,
            base: self.train_config(seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.is_ensemble() {
            self.boost_config(0).validate()
        } else {
            self.train_config(0).validate()
        }
    }
}

/// Split protocol shared by every trial. Without `majority_class` each seed
/// picks one class uniformly at random.
///
/// `use_dataset_split` skips the imbalanced draw and uses the dataset's own
/// split file verbatim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitProtocol {
    #[serde(default)]
    pub use_dataset_split: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub majority_class: Option<usize>,
    #[serde(default = "defaults::n_majority")]
    pub n_majority: usize,
    #[serde(default = "defaults::n_minority")]
    pub n_minority: usize,
    #[serde(default = "defaults::val_size")]
    pub val_size: usize,
    #[serde(default = "defaults::test_size")]
    pub test_size: usize,
}

impl Default for SplitProtocol {
    fn default() -> Self {
        Self {
            use_dataset_split: false,
            majority_class: None,
            n_majority: defaults::n_majority(),
            n_minority: defaults::n_minority(),
            val_size: defaults::val_size(),
            test_size: defaults::test_size(),
        }
    }
}

impl SplitProtocol {
    pub fn imbalance(&self, majority_class: usize, n_minority: usize) -> ImbalanceSpec {
        ImbalanceSpec {
            majority_class,
            n_majority: self.n_majority,
            n_minority,
            val_size: self.val_size,
            test_size: self.test_size,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Preprocess {
    pub self_loops: bool,
    pub row_normalize: bool,
}

impl Default for Preprocess {
    fn default() -> Self {
        Self {
            self_loops: true,
            row_normalize: true,
        }
    }
}

/// Parameter grid swept by an experiment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSpec {
    #[default]
    None,
    MinorityCount {
        values: Vec<usize>,
    },
    /// Grid over ensemble size × epochs. Single-model kinds only follow the
    /// epochs axis.
    Estimators {
        m_values: Vec<usize>,
        epochs_values: Vec<usize>,
    },
    FeatureNoise {
        values: Vec<f64>,
    },
}

impl SweepSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::MinorityCount { .. } => "minority_count",
            Self::Estimators { .. } => "estimators",
            Self::FeatureNoise { .. } => "feature_noise",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| {
            Err(Error::InvalidParameter(format!(
                "{what} sweep has no values"
            )))
        };
        match self {
            Self::None => Ok(()),
            Self::MinorityCount { values } if values.is_empty() => empty("minority_count"),
            Self::Estimators { m_values, .. } if m_values.is_empty() => empty("estimators"),
            Self::Estimators { epochs_values, .. } if epochs_values.is_empty() => {
                empty("estimators")
            }
            Self::Estimators {
                m_values,
                epochs_values,
            } => {
                if m_values.contains(&0) || epochs_values.contains(&0) {
                    return Err(Error::InvalidParameter(
                        "estimator and epoch counts must be at least 1".into(),
                    ));
                }
                Ok(())
            }
            Self::FeatureNoise { values } if values.is_empty() => empty("feature_noise"),
            Self::FeatureNoise { values } => {
                match values.iter().find(|f| !(0.0..=1.0).contains(*f)) {
                    Some(f) => Err(Error::InvalidParameter(format!(
                        "noise fraction {f} outside [0, 1]"
                    ))),
                    None => Ok(()),
                }
            }
            Self::MinorityCount { .. } => Ok(()),
        }
    }
}

/// A complete, self-describing experiment.
///
/// Exactly one of `dataset_dir` and `fixture` names the data. `model` is
/// shorthand for a one-element `models` list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<SbmSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub split: SplitProtocol,
    #[serde(default)]
    pub noise_fraction: f64,
    #[serde(default)]
    pub preprocess: Preprocess,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            dataset_dir: None,
            fixture: None,
            model: None,
            models: Vec::new(),
            split: SplitProtocol::default(),
            noise_fraction: 0.0,
            preprocess: Preprocess::default(),
            sweep: SweepSpec::None,
            seeds: Vec::new(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The model axis: `model` (if set) followed by `models`.
    pub fn model_list(&self) -> Vec<ModelSpec> {
        self.model.iter().chain(&self.models).cloned().collect()
    }

    /// Folds `model` into `models` so the resolved form has one spelling.
    pub fn normalized(mut self) -> Self {
        self.models = self.model_list();
        self.model = None;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let models = self.model_list();
        if models.is_empty() {
            return Err(Error::InvalidParameter("experiment lists no models".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("experiment lists no seeds".into()));
        }
        let mut names: Vec<&str> = models.iter().map(ModelSpec::display_name).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "model name '{}' appears twice; set distinct names",
                w[0]
            )));
        }
        for m in &models {
            m.validate()?;
        }
        if !(0.0..=1.0).contains(&self.noise_fraction) {
            return Err(Error::InvalidParameter(format!(
                "noise_fraction {} outside [0, 1]",
                self.noise_fraction
            )));
        }
        self.sweep.validate()
    }
}
