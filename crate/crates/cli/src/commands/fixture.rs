use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use adagcn::{generate_sbm, save_dataset, SbmSpec};
use anyhow::Context;
use clap::Args;

use super::write_json;
use crate::args::{Format, OutArgs};

pub const FIXTURE_FILE: &str = "fixture.json";

#[derive(Args, Debug)]
pub struct FixtureArgs {
    /// Block sizes, e.g. `50,50,50`; one class per block.
    #[arg(long, value_delimiter = ',', required = true)]
    pub blocks: Vec<usize>,
    #[arg(long)]
    pub p_in: f64,
    #[arg(long)]
    pub p_out: f64,
    #[arg(long, default_value_t = 16)]
    pub features: usize,
    #[arg(long, default_value_t = 1.0)]
    pub feature_std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn run(args: FixtureArgs) -> anyhow::Result<ExitCode> {
    if args.p_in < args.p_out {
        eprintln!(
            "warning: p_in {} < p_out {}: the fixture is disassortative",
            args.p_in, args.p_out
        );
    }
    let spec = SbmSpec {
        feature_std: args.feature_std,
        ..SbmSpec::new(args.blocks, args.p_in, args.p_out, args.features, args.seed)
    };
    let dataset = generate_sbm(&spec)?;
    let out: &PathBuf = &args.out.out;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    save_dataset(&dataset, out, args.format.into())?;
    write_json(&out.join(FIXTURE_FILE), &spec)?;
    println!(
        "wrote {} nodes, {} edges, {} classes to {}",
        dataset.num_nodes(),
        dataset.graph.num_undirected_edges(),
        dataset.num_classes(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}
