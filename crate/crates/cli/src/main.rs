//! `xlap`: experiment driver writing plot-ready CSV.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::{Run, SolverFailure};
use config::{parse_file, parse_override, Config, ConfigError, Schema};
use output::HeaderStyle;

#[derive(Parser, Debug)]
#[command(name = "xlap", version, about = "Spectral inference with learned diagonal regularization")]
struct Cli {
    /// Plain-text file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base seed; overrides the `seed` key.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    jobs: usize,

    /// Output path (`-` for stdout; a file prefix for `gen`); overrides the `output` key.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Leave the timestamp out of output headers.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// `key=value` settings applied after the config file.
    #[arg(value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug, Default)]
struct NoiseFlags {
    /// Number of injected cliques (see `clique_size`).
    #[arg(long)]
    cliques: Option<usize>,

    /// Number of injected hubs (see `hub_degree`).
    #[arg(long)]
    hubs: Option<usize>,

    /// Number of nodes whose neighbourhoods are turned into cliques.
    #[arg(long)]
    perturb_neighbors: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a planted graph or completion instance.
    Gen(Overrides),
    /// Top eigenvalues and IPRs of an operator.
    Spectrum(Overrides),
    /// Learn the diagonal regularization and dump its trajectory.
    Learn(Overrides),
    /// Overlap sweep over epsilon on planted-partition graphs.
    Detect {
        #[command(flatten)]
        noise: NoiseFlags,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Overlap sweep over mean degree for Gaussian pairwise similarities.
    ClusterPairwise {
        #[command(flatten)]
        noise: NoiseFlags,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Rank estimation and completion success rates.
    Complete(Overrides),
    /// Misclassification counts on a labelled real network.
    Blogs(Overrides),
}

type Handler = fn(&Run) -> Result<()>;

impl Command {
    fn parts(&self) -> (&'static str, Schema, Handler, &Overrides, Option<&NoiseFlags>) {
        match self {
            Command::Gen(o) => ("gen", commands::GEN, commands::gen, o, None),
            Command::Spectrum(o) => ("spectrum", commands::SPECTRUM, commands::spectrum, o, None),
            Command::Learn(o) => ("learn", commands::LEARN, commands::learn, o, None),
            Command::Detect { noise, overrides } => ("detect", commands::DETECT, commands::detect_sweep, overrides, Some(noise)),
            Command::ClusterPairwise { noise, overrides } => ("cluster-pairwise", commands::PAIRWISE, commands::cluster_pairwise, overrides, Some(noise)),
            Command::Complete(o) => ("complete", commands::COMPLETE, commands::complete_sweep, o, None),
            Command::Blogs(o) => ("blogs", commands::BLOGS, commands::blogs, o, None),
        }
    }
}

fn resolve(cli: &Cli) -> Result<(Config, Handler)> {
    let (name, schema, handler, overrides, noise) = cli.command.parts();
    let mut assignments = Vec::new();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("reading {}: {e}", path.display())))?;
        assignments.extend(parse_file(&text)?);
    }
    for arg in &overrides.set {
        assignments.push(parse_override(arg)?);
    }
    if let Some(noise) = noise {
        let flags = [("cliques", noise.cliques), ("hubs", noise.hubs), ("perturb_neighbors", noise.perturb_neighbors)];
        assignments.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v.to_string()))));
    }
    if let Some(seed) = cli.seed {
        assignments.push(("seed".into(), seed.to_string()));
    }
    if let Some(out) = &cli.output {
        assignments.push(("output".into(), out.display().to_string()));
    }
    Ok((Config::resolve(name, schema, assignments)?, handler))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<SolverFailure>().is_some() {
        return 3;
    }
    match err.downcast_ref::<xlap::Error>() {
        Some(xlap::Error::NotConverged { .. } | xlap::Error::DegenerateSpectrum { .. } | xlap::Error::Learning { .. } | xlap::Error::Numerical(_)) => 3,
        Some(xlap::Error::Contract(_) | xlap::Error::Infeasible(_) | xlap::Error::Parse { .. }) => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<()> {
    let (cfg, handler) = resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build().context("starting worker threads")?;
    let style = HeaderStyle { timestamp: !cli.no_timestamp };
    handler(&Run { cfg, style, pool })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
