//! CSV writers. Numbers use Rust's shortest round-trip formatting, so
//! identical results always produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::boosting::RoundDiagnostics;
use crate::error::{Error, Result};
use crate::gcn::EpochRecord;

use super::metrics::Metrics;
use super::spec::SweepSpec;
use super::trials::{
    ExperimentResult, SummaryRow, TraceRow, TrialFailure, TrialPoint, TrialReport,
};

pub const TRIALS_CSV: &str = "trials.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const PLOT_CSV: &str = "plot.csv";
pub const CONFUSIONS_CSV: &str = "confusions.csv";
pub const FAILURES_CSV: &str = "failures.csv";
pub const WEIGHT_TRACES_CSV: &str = "weight_traces.csv";

const POINT_HEADER: [&str; 4] = ["n_minority", "num_estimators", "epochs", "noise_fraction"];

fn num(v: f64) -> String {
    format!("{v}")
}

fn point_fields(p: &TrialPoint) -> [String; 4] {
    [
        p.n_minority.to_string(),
        p.num_estimators.to_string(),
        p.epochs.to_string(),
        num(p.noise_fraction),
    ]
}

type CsvWriter<W> = csv::Writer<W>;

fn csv_writer<W: Write>(out: W) -> CsvWriter<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn to_file(
    path: &Path,
    write: impl FnOnce(&mut CsvWriter<BufWriter<File>>) -> csv::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv_writer(BufWriter::new(file));
    write(&mut w).map_err(|e| Error::io(path, e.into()))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// `seed, model, kind, majority_class, n_majority, <point>, train_size,
/// test_size, accuracy, final_epoch_accuracy, recall_0 … recall_{C−1}`.
pub fn write_trials<W: Write>(w: &mut CsvWriter<W>, reports: &[&TrialReport]) -> csv::Result<()> {
    let classes = reports
        .first()
        .map_or(0, |r| r.metrics.per_class_recall.len());
    let mut header: Vec<String> = ["seed", "model", "kind", "majority_class", "n_majority"]
        .iter()
        .chain(&POINT_HEADER)
        .chain(&[
            "train_size",
            "test_size",
            "accuracy",
            "final_epoch_accuracy",
        ])
        .map(|s| s.to_string())
        .collect();
    header.extend((0..classes).map(|k| format!("recall_{k}")));
    w.write_record(&header)?;
    for r in reports {
        let mut row = vec![
            r.seed.to_string(),
            r.model.clone(),
            r.kind.as_str().to_owned(),
            r.majority_class.to_string(),
            r.n_majority.to_string(),
        ];
        row.extend(point_fields(&r.point));
        row.extend([
            r.train_size.to_string(),
            r.test_size.to_string(),
            num(r.metrics.accuracy),
            num(r.final_epoch_accuracy),
        ]);
        row.extend(r.metrics.per_class_recall.iter().map(|&v| num(v)));
        w.write_record(&row)?;
    }
    Ok(())
}

/// `model, <point>, mean_accuracy, std_accuracy, trials, single_trial`.
pub fn write_summary<W: Write>(w: &mut CsvWriter<W>, rows: &[SummaryRow]) -> csv::Result<()> {
    let header: Vec<&str> = ["model"]
        .iter()
        .chain(&POINT_HEADER)
        .chain(&["mean_accuracy", "std_accuracy", "trials", "single_trial"])
        .copied()
        .collect();
    w.write_record(&header)?;
    for r in rows {
        let mut row = vec![r.model.clone()];
        row.extend(point_fields(&r.point));
        row.extend([
            num(r.mean_accuracy),
            num(r.std_accuracy),
            r.trials.to_string(),
            r.single_trial.to_string(),
        ]);
        w.write_record(&row)?;
    }
    Ok(())
}

/// Plot-ready `series, x, y, yerr`: one series per model (and per epochs
/// value for estimator grids), `x` the swept variable.
pub fn write_plot<W: Write>(
    w: &mut CsvWriter<W>,
    sweep: &SweepSpec,
    rows: &[SummaryRow],
) -> csv::Result<()> {
    w.write_record(["series", "x", "y", "yerr"])?;
    for r in rows {
        let (series, x) = match sweep {
            SweepSpec::None | SweepSpec::MinorityCount { .. } => {
                (r.model.clone(), r.point.n_minority.to_string())
            }
            SweepSpec::FeatureNoise { .. } => (r.model.clone(), num(r.point.noise_fraction)),
            SweepSpec::Estimators { .. } => (
                format!("{} epochs={}", r.model, r.point.epochs),
                r.point.num_estimators.to_string(),
            ),
        };
        w.write_record([series, x, num(r.mean_accuracy), num(r.std_accuracy)])?;
    }
    Ok(())
}

/// Square confusion matrix: `true_class, pred_0 … pred_{C−1}`.
pub fn write_confusion<W: Write>(w: &mut CsvWriter<W>, metrics: &Metrics) -> csv::Result<()> {
    let c = metrics.confusion.len();
    let mut header = vec!["true_class".to_owned()];
    header.extend((0..c).map(|k| format!("pred_{k}")));
    w.write_record(&header)?;
    for (t, row) in metrics.confusion.iter().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(row.iter().map(usize::to_string));
        w.write_record(&rec)?;
    }
    Ok(())
}

/// Long-form confusion counts for every trial.
pub fn write_confusions<W: Write>(
    w: &mut CsvWriter<W>,
    reports: &[&TrialReport],
) -> csv::Result<()> {
    let header: Vec<&str> = ["seed", "model"]
        .iter()
        .chain(&POINT_HEADER)
        .chain(&["true_class", "predicted_class", "count"])
        .copied()
        .collect();
    w.write_record(&header)?;
    for r in reports {
        for (t, row) in r.metrics.confusion.iter().enumerate() {
            for (p, count) in row.iter().enumerate() {
                let mut rec = vec![r.seed.to_string(), r.model.clone()];
                rec.extend(point_fields(&r.point));
                rec.extend([t.to_string(), p.to_string(), count.to_string()]);
                w.write_record(&rec)?;
            }
        }
    }
    Ok(())
}

/// `seed, model, <point>, error`.
pub fn write_failures<W: Write>(
    w: &mut CsvWriter<W>,
    failures: &[TrialFailure],
) -> csv::Result<()> {
    let header: Vec<&str> = ["seed", "model"]
        .iter()
        .chain(&POINT_HEADER)
        .chain(&["error"])
        .copied()
        .collect();
    w.write_record(&header)?;
    for f in failures {
        let mut rec = vec![f.seed.to_string(), f.model.clone()];
        rec.extend(point_fields(&f.point));
        rec.push(f.message.clone());
        w.write_record(&rec)?;
    }
    Ok(())
}

/// `round, sample_index, weight`.
pub fn write_weight_trace<W: Write>(w: &mut CsvWriter<W>, rows: &[TraceRow]) -> csv::Result<()> {
    w.write_record(["round", "sample_index", "weight"])?;
    for r in rows {
        w.write_record([
            r.round.to_string(),
            r.sample_index.to_string(),
            num(r.weight),
        ])?;
    }
    Ok(())
}

/// `round, epsilon, alpha`.
pub fn write_round_diagnostics<W: Write>(
    w: &mut CsvWriter<W>,
    rounds: &[RoundDiagnostics],
) -> csv::Result<()> {
    w.write_record(["round", "epsilon", "alpha"])?;
    for r in rounds {
        w.write_record([r.round.to_string(), num(r.epsilon), num(r.alpha)])?;
    }
    Ok(())
}

/// `epoch, train_loss, val_acc`.
pub fn write_history<W: Write>(w: &mut CsvWriter<W>, history: &[EpochRecord]) -> csv::Result<()> {
    w.write_record(["epoch", "train_loss", "val_acc"])?;
    for r in history {
        w.write_record([r.epoch.to_string(), num(r.train_loss), num(r.val_acc)])?;
    }
    Ok(())
}

/// `round, epoch, train_loss, val_acc` across all boosting rounds.
pub fn write_round_history<W: Write>(
    w: &mut CsvWriter<W>,
    rounds: &[RoundDiagnostics],
) -> csv::Result<()> {
    w.write_record(["round", "epoch", "train_loss", "val_acc"])?;
    for r in rounds {
        for h in &r.history {
            w.write_record([
                r.round.to_string(),
                h.epoch.to_string(),
                num(h.train_loss),
                num(h.val_acc),
            ])?;
        }
    }
    Ok(())
}

pub fn save_round_history(path: &Path, rounds: &[RoundDiagnostics]) -> Result<()> {
    to_file(path, |w| write_round_history(w, rounds))
}

pub fn save_confusion(path: &Path, metrics: &Metrics) -> Result<()> {
    to_file(path, |w| write_confusion(w, metrics))
}

pub fn save_weight_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    to_file(path, |w| write_weight_trace(w, rows))
}

pub fn save_round_diagnostics(path: &Path, rounds: &[RoundDiagnostics]) -> Result<()> {
    to_file(path, |w| write_round_diagnostics(w, rounds))
}

pub fn save_history(path: &Path, history: &[EpochRecord]) -> Result<()> {
    to_file(path, |w| write_history(w, history))
}

/// Writes every experiment table into `dir` and returns the file names
/// written.
///
/// Always: trials, summary, plot, confusions, failures. Per-seed
/// `confusion_<seed>.csv` files when each seed ran exactly one trial.
/// `weight_traces.csv` (long form, keyed like the trials) when any ensemble
/// trial ran.
pub fn write_experiment(dir: &Path, result: &ExperimentResult) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let reports: Vec<&TrialReport> = result.reports().collect();
    let mut written = Vec::new();
    let mut emit = |name: String,
                    f: &dyn Fn(&mut CsvWriter<BufWriter<File>>) -> csv::Result<()>|
     -> Result<()> {
        to_file(&dir.join(&name), f)?;
        written.push(name);
        Ok(())
    };
    emit(TRIALS_CSV.into(), &|w| write_trials(w, &reports))?;
    emit(SUMMARY_CSV.into(), &|w| {
        write_summary(w, &result.summary.rows)
    })?;
    emit(PLOT_CSV.into(), &|w| {
        write_plot(w, &result.sweep, &result.summary.rows)
    })?;
    emit(CONFUSIONS_CSV.into(), &|w| write_confusions(w, &reports))?;
    emit(FAILURES_CSV.into(), &|w| {
        write_failures(w, &result.failures)
    })?;

    let mut seeds: Vec<u64> = reports.iter().map(|r| r.seed).collect();
    let total = seeds.len();
    seeds.dedup();
    if seeds.len() == total {
        for r in &reports {
            emit(format!("confusion_{}.csv", r.seed), &|w| {
                write_confusion(w, &r.metrics)
            })?;
        }
    }

    if result.outcomes.iter().any(|o| o.diagnostics.is_some()) {
        emit(WEIGHT_TRACES_CSV.into(), &|w| {
            let header: Vec<&str> = ["seed", "model"]
                .iter()
                .chain(&POINT_HEADER)
                .chain(&["round", "sample_index", "weight"])
                .copied()
                .collect();
            w.write_record(&header)?;
            for o in &result.outcomes {
                let Some(d) = &o.diagnostics else { continue };
                let rows = super::trials::export_weight_traces(d, None)
                    .expect("all training nodes are known");
                for t in rows {
                    let mut rec = vec![o.report.seed.to_string(), o.report.model.clone()];
                    rec.extend(point_fields(&o.report.point));
                    rec.extend([
                        t.round.to_string(),
                        t.sample_index.to_string(),
                        num(t.weight),
                    ]);
                    w.write_record(&rec)?;
                }
            }
            Ok(())
        })?;
    }
    Ok(written)
}
