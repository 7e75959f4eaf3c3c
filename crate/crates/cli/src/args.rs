use std::path::PathBuf;

use adagcn::harness::{ExperimentSpec, ModelKind, ModelSpec};
use adagcn::FeatureFormat;
use anyhow::{bail, Context};
use clap::{Args, ValueEnum};

/// Model overrides. Unset flags keep the value from the spec (or the
/// built-in default).
#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Model kind: gcn, gcn_focal, gcn_cb_focal or adagcn.
    #[arg(long, value_parser = parse_kind)]
    pub model: Option<ModelKind>,
    /// Number of boosting rounds (base classifiers).
    #[arg(long)]
    pub estimators: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// L2 regularization strength on both weight matrices.
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Shrinkage of the sample-weight update.
    #[arg(long)]
    pub shrinkage: Option<f64>,
    /// Focal-loss exponent.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Class-balanced loss β.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Train each round from a fresh initialization.
    #[arg(long)]
    pub no_transfer: bool,
    /// Weight each member's score by its α when predicting.
    #[arg(long)]
    pub alpha_in_prediction: bool,
    /// Keep the last epoch's parameters instead of the best-validation ones.
    #[arg(long)]
    pub last_epoch: bool,
}

impl ModelArgs {
    pub fn apply(&self, m: &mut ModelSpec) {
        if let Some(kind) = self.model {
            if kind != m.kind {
                m.kind = kind;
                m.name = None;
            }
        }
        let t = &mut m.train;
        set(&mut m.num_estimators, self.estimators);
        set(&mut m.shrinkage, self.shrinkage);
        set(&mut t.epochs, self.epochs);
        set(&mut t.learning_rate, self.lr);
        set(&mut t.l2_lambda, self.l2);
        set(&mut t.hidden_dim, self.hidden);
        set(&mut t.dropout_rate, self.dropout);
        set(&mut t.focal_gamma, self.gamma);
        set(&mut t.cb_beta, self.beta);
        if self.no_transfer {
            m.transfer_learning = false;
        }
        if self.alpha_in_prediction {
            m.use_alpha_in_prediction = true;
        }
        if self.last_epoch {
            t.best_epoch_selection = false;
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct SplitArgs {
    /// Class given the majority training count; drawn per seed when unset.
    #[arg(long)]
    pub majority_class: Option<usize>,
    #[arg(long)]
    pub n_majority: Option<usize>,
    #[arg(long)]
    pub n_minority: Option<usize>,
    #[arg(long)]
    pub val_size: Option<usize>,
    #[arg(long)]
    pub test_size: Option<usize>,
    /// Use the dataset's split.json as-is instead of drawing an imbalanced split.
    #[arg(long)]
    pub use_dataset_split: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct PrepArgs {
    /// Fraction of each node's nonzero features removed at random.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub no_self_loops: bool,
    #[arg(long)]
    pub no_row_normalize: bool,
}

impl SplitArgs {
    pub fn apply(&self, spec: &mut ExperimentSpec) {
        let s = &mut spec.split;
        if self.majority_class.is_some() {
            s.majority_class = self.majority_class;
        }
        set(&mut s.n_majority, self.n_majority);
        set(&mut s.n_minority, self.n_minority);
        set(&mut s.val_size, self.val_size);
        set(&mut s.test_size, self.test_size);
        if self.use_dataset_split {
            s.use_dataset_split = true;
        }
    }
}

impl PrepArgs {
    pub fn apply(&self, spec: &mut ExperimentSpec) {
        set(&mut spec.noise_fraction, self.noise);
        if self.no_self_loops {
            spec.preprocess.self_loops = false;
        }
        if self.no_row_normalize {
            spec.preprocess.row_normalize = false;
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Bin,
}

impl From<Format> for FeatureFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => FeatureFormat::Csv,
            Format::Bin => FeatureFormat::Bin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalSplit {
    Train,
    Val,
    Test,
}

impl EvalSplit {
    pub fn name(self) -> &'static str {
        match self {
            Self::Train => "train",
            Self::Val => "val",
            Self::Test => "test",
        }
    }
}

/// Output directory shared by every command: `--out`, then `ADAGCN_OUT_DIR`.
#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    #[arg(long, env = "ADAGCN_OUT_DIR", default_value = "adagcn-out")]
    pub out: PathBuf,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: adagcn::Error| e.to_string())
}

/// Parses `1,2,5` or a half-open range `0..10`.
pub fn parse_seeds(s: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().context("bad range start")?;
        let b: u64 = b.trim().parse().context("bad range end")?;
        if a >= b {
            bail!("empty seed range {s}");
        }
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .with_context(|| format!("bad seed {t:?}"))
        })
        .collect()
}
