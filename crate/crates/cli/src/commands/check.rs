use std::path::PathBuf;
use std::process::ExitCode;

use adagcn::dataset::dataset_checksum;
use adagcn::{load_dataset, save_dataset};
use anyhow::Context;
use clap::Args;

use crate::args::Format;

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Also write the dataset to this directory in `--format`.
    #[arg(long)]
    pub to: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

pub fn run(args: CheckArgs) -> anyhow::Result<ExitCode> {
    let ds = load_dataset(&args.dataset)
        .with_context(|| format!("invalid dataset {}", args.dataset.display()))?;
    let labeled = ds.labels.as_slice().iter().flatten().count();
    let all: Vec<usize> = (0..ds.num_nodes())
        .filter(|&i| ds.labels.get(i).is_some())
        .collect();
    println!("dataset   {}", args.dataset.display());
    println!("checksum  {}", dataset_checksum(&args.dataset)?);
    println!("nodes     {} ({labeled} labeled)", ds.num_nodes());
    println!(
        "edges     {} undirected from {} lines",
        ds.graph.num_undirected_edges(),
        ds.input_edge_lines
    );
    println!("features  {}", ds.num_features());
    println!(
        "classes   {} {:?}",
        ds.num_classes(),
        ds.labels.class_histogram(&all)
    );
    match &ds.split {
        Some(s) => println!(
            "split     train {} / val {} / test {}",
            s.train.len(),
            s.val.len(),
            s.test.len()
        ),
        None => println!("split     none"),
    }
    if let Some(to) = &args.to {
        std::fs::create_dir_all(to).with_context(|| format!("cannot create {}", to.display()))?;
        save_dataset(&ds, to, args.format.into())?;
        println!("converted to {}", to.display());
    }
    Ok(ExitCode::SUCCESS)
}
