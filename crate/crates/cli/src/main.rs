mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use delaunay_density::diagnostic::{aggregate, Diagnostic, Schedule, Trial, TrialAggregate};
use delaunay_density::report::{read_trials_csv, write_aggregate_csv, write_trials_csv};
use delaunay_density::sampling::{
    box_from_qpdf, build_lattice, dedup_cluster, percentile_lattice, read_static_csv, StaticDataset,
};
use delaunay_density::testbed::by_name;
use delaunay_density::Error;
use rayon::prelude::*;
use serde::Serialize;

use config::{RunArgs, RunConfig, Source};

#[derive(Parser)]
#[command(
    name = "ddiag",
    version,
    about = "Delaunay sampling-density diagnostic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the diagnostic over several seeds and write trials.csv,
    /// aggregate.csv and manifest.json.
    Run {
        /// JSON file with default values for the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        args: Box<RunArgs>,
    },
    /// Merge trials.csv files that share one schedule into an aggregate CSV.
    Aggregate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        nk_floor: usize,
    },
    /// Run a small bundled Griewank configuration.
    Demo {
        #[arg(long, default_value = "ddiag-demo")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct Manifest<'a> {
    version: &'a str,
    config: &'a RunConfig,
    completed_seeds: Vec<u64>,
    failed_seeds: Vec<u64>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, args } => {
            load_config(config.as_deref(), *args).and_then(|c| cmd_run(&c))
        }
        Command::Aggregate {
            inputs,
            out,
            nk_floor,
        } => cmd_aggregate(&inputs, &out, nk_floor),
        Command::Demo { out, jobs } => cmd_demo(out, jobs),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn load_config(path: Option<&Path>, flags: RunArgs) -> Result<RunConfig> {
    let base = match path {
        Some(p) => RunArgs::from_file(p)?,
        None => RunArgs::default(),
    };
    base.overlay(flags).resolve()
}

fn read_dataset(
    path: &Path,
    inputs: &Option<Vec<String>>,
    value_column: &Option<String>,
    delta: f64,
) -> Result<StaticDataset> {
    let open = || File::open(path).with_context(|| format!("opening {}", path.display()));
    let headers: Vec<String> = csv::Reader::from_reader(open()?)
        .headers()
        .with_context(|| format!("reading header of {}", path.display()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let value = match value_column {
        Some(v) => v.clone(),
        None => headers.last().cloned().context("dataset has no columns")?,
    };
    let inputs = match inputs {
        Some(cols) => cols.clone(),
        None => headers.iter().filter(|h| **h != value).cloned().collect(),
    };
    let rows = read_static_csv(open()?, &inputs, &value)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(dedup_cluster(rows, delta)?.with_columns(inputs))
}

type TrialOutcome = (
    u64,
    delaunay_density::Result<Vec<delaunay_density::diagnostic::RateRecord>>,
);

fn run_trials(cfg: &RunConfig) -> Result<Vec<TrialOutcome>> {
    let schedule_for = |d: usize| {
        Schedule::new(
            cfg.b,
            cfg.n0.unwrap_or(9.max(d + 1)),
            cfg.max_samples,
            cfg.max_iterations,
        )
    };
    let seeds = cfg.seeds();
    match &cfg.source {
        Source::Function {
            name,
            dim,
            lattice_extent,
            qpdf,
        } => {
            by_name(name, *dim, 0)?;
            let center = vec![0.0; *dim];
            let queries = build_lattice(&center, *lattice_extent, cfg.lattice_points)?;
            let bbox = box_from_qpdf(*lattice_extent, *qpdf, &center)?;
            let diag = Diagnostic::new(schedule_for(*dim)?)?;
            diag.schedule().validate_for_dim(*dim)?;
            Ok(seeds
                .par_iter()
                .map(|&seed| {
                    let f = by_name(name, *dim, seed).expect("checked above");
                    (seed, diag.run_dynamic(|x| f.eval(x), &bbox, &queries, seed))
                })
                .collect())
        }
        Source::Dataset {
            path,
            inputs,
            value_column,
            delta,
            percentiles,
        } => {
            let ds = read_dataset(path, inputs, value_column, *delta)?;
            log::info!(
                "dataset: {} rows in d={} after merging duplicates",
                ds.len(),
                ds.dim()
            );
            let queries =
                percentile_lattice(&ds, cfg.lattice_points, percentiles[0], percentiles[1])?;
            let diag = Diagnostic::new(schedule_for(ds.dim())?)?;
            diag.schedule().validate_for_dim(ds.dim())?;
            Ok(seeds
                .par_iter()
                .map(|&seed| (seed, diag.run_static(&ds, &queries, seed)))
                .collect())
        }
    }
}

fn floored(mut agg: TrialAggregate, nk_floor: usize) -> TrialAggregate {
    agg.rows.retain(|r| r.n_k >= nk_floor);
    agg
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn cmd_run(cfg: &RunConfig) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()?;
    let outcomes = pool.install(|| run_trials(cfg))?;

    let mut trials = Vec::new();
    let mut failed = Vec::new();
    for (seed, outcome) in outcomes {
        match outcome {
            Ok(records) => trials.push(Trial { seed, records }),
            Err(e) => {
                log::error!("trial with seed {seed} aborted: {e}");
                failed.push(seed);
            }
        }
    }
    if trials.is_empty() {
        bail!("every trial failed");
    }

    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    write_trials_csv(create(&cfg.out.join("trials.csv"))?, &trials)?;
    let records: Vec<_> = trials.iter().map(|t| t.records.clone()).collect();
    let agg = floored(aggregate(&records)?, cfg.nk_floor);
    write_aggregate_csv(create(&cfg.out.join("aggregate.csv"))?, &agg)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        completed_seeds: trials.iter().map(|t| t.seed).collect(),
        failed_seeds: failed,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(cfg.out.join("manifest.json"), text)?;
    log::info!(
        "{} trials, {} aggregate rows written to {}",
        trials.len(),
        agg.rows.len(),
        cfg.out.display()
    );
    Ok(())
}

fn cmd_aggregate(inputs: &[PathBuf], out: &Path, nk_floor: usize) -> Result<()> {
    if inputs.is_empty() {
        bail!("no input files");
    }
    let mut schedule: BTreeMap<usize, usize> = BTreeMap::new();
    let mut records = Vec::new();
    for path in inputs {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let trials =
            read_trials_csv(file).with_context(|| format!("reading {}", path.display()))?;
        for t in trials {
            for r in &t.records {
                let expected = *schedule.entry(r.k).or_insert(r.n_k);
                if expected != r.n_k {
                    return Err(Error::ScheduleMismatch {
                        k: r.k,
                        expected,
                        found: r.n_k,
                        source_name: Some(path.display().to_string()),
                    }
                    .into());
                }
            }
            records.push(t.records);
        }
    }
    if records.is_empty() {
        bail!("input files contain no trials");
    }
    let agg = floored(aggregate(&records)?, nk_floor);
    write_aggregate_csv(create(out)?, &agg)?;
    Ok(())
}

fn cmd_demo(out: PathBuf, jobs: Option<usize>) -> Result<()> {
    let cfg = RunConfig::demo(out, jobs);
    cmd_run(&cfg)?;
    println!("wrote {}", cfg.out.display());
    Ok(())
}
