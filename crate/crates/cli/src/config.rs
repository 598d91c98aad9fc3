use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dynamic,
    Static,
}

/// Run parameters. Every field can come from the JSON file given with
/// `--config` (kebab-case keys, as below) and be overridden on the command
/// line.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Test function for dynamic mode.
    #[arg(long)]
    pub function: Option<String>,
    /// CSV file for static mode.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Input columns of the dataset (default: every column but the value column).
    #[arg(long, value_delimiter = ',')]
    pub inputs: Option<Vec<String>>,
    /// Value column of the dataset (default: the last column).
    #[arg(long)]
    pub value_column: Option<String>,
    /// Near-duplicate merge radius for dataset inputs.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Query lattice points per coordinate.
    #[arg(long)]
    pub lattice_points: Option<usize>,
    /// Side of the query lattice, centred at the origin (dynamic mode).
    #[arg(long)]
    pub lattice_extent: Option<f64>,
    /// Percentile interval spanned by the query lattice (static mode).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub lattice_percentiles: Option<Vec<f64>>,
    /// Ratio of lattice extent to sampling-box extent.
    #[arg(long)]
    pub qpdf: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long)]
    pub max_samples: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rows of aggregate.csv with n_k below this are omitted.
    #[arg(long)]
    pub nk_floor: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl RunArgs {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: RunArgs) -> Self {
        overlay!(
            self,
            flags,
            mode,
            function,
            dataset,
            inputs,
            value_column,
            delta,
            dim,
            lattice_points,
            lattice_extent,
            lattice_percentiles,
            qpdf,
            b,
            n0,
            max_samples,
            max_iterations,
            trials,
            base_seed,
            jobs,
            out,
            nk_floor
        );
        self
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let mode = self.mode.unwrap_or(if self.dataset.is_some() {
            Mode::Static
        } else {
            Mode::Dynamic
        });
        let source = match mode {
            Mode::Dynamic => {
                let function = self.function.context("dynamic mode needs --function")?;
                let dim = self.dim.context("dynamic mode needs --dim")?;
                Source::Function {
                    name: function,
                    dim,
                    lattice_extent: self.lattice_extent.unwrap_or(20.0),
                    qpdf: self.qpdf.unwrap_or(0.8),
                }
            }
            Mode::Static => {
                let dataset = self.dataset.context("static mode needs --dataset")?;
                let (lo, hi) = match self.lattice_percentiles.as_deref() {
                    None => (10.0, 90.0),
                    Some([lo, hi]) => (*lo, *hi),
                    Some(other) => bail!("--lattice-percentiles takes two values, got {other:?}"),
                };
                Source::Dataset {
                    path: dataset,
                    inputs: self.inputs,
                    value_column: self.value_column,
                    delta: self.delta.unwrap_or(0.0),
                    percentiles: [lo, hi],
                }
            }
        };
        let trials = self.trials.unwrap_or(1);
        if trials == 0 {
            bail!("--trials must be at least 1");
        }
        if self.max_samples.is_none() && self.max_iterations.is_none() {
            bail!("a stop rule is required: --max-samples or --max-iterations");
        }
        Ok(RunConfig {
            source,
            lattice_points: self.lattice_points.unwrap_or(20),
            b: self.b.unwrap_or(1.4641),
            n0: self.n0,
            max_samples: self.max_samples,
            max_iterations: self.max_iterations,
            trials,
            base_seed: self.base_seed.unwrap_or(0),
            nk_floor: self.nk_floor.unwrap_or(0),
            jobs: self.jobs,
            out: self.out.unwrap_or_else(|| PathBuf::from("ddiag-out")),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all_fields = "kebab-case", tag = "mode")]
pub enum Source {
    #[serde(rename = "dynamic")]
    Function {
        #[serde(rename = "function")]
        name: String,
        dim: usize,
        lattice_extent: f64,
        qpdf: f64,
    },
    #[serde(rename = "static")]
    Dataset {
        path: PathBuf,
        inputs: Option<Vec<String>>,
        value_column: Option<String>,
        delta: f64,
        percentiles: [f64; 2],
    },
}

/// Fully resolved configuration, echoed into `manifest.json`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    #[serde(flatten)]
    pub source: Source,
    pub lattice_points: usize,
    pub b: f64,
    /// Defaults to `max(9, d + 1)` once the dimension is known.
    pub n0: Option<usize>,
    pub max_samples: Option<usize>,
    pub max_iterations: Option<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub nk_floor: usize,
    #[serde(skip)]
    pub jobs: Option<usize>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl RunConfig {
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.trials as u64)
            .map(|i| self.base_seed + i)
            .collect()
    }

    /// Small two-dimensional Griewank run whose finest spacings resolve the
    /// function's oscillations.
    pub fn demo(out: PathBuf, jobs: Option<usize>) -> Self {
        RunConfig {
            source: Source::Function {
                name: "griewank".into(),
                dim: 2,
                lattice_extent: 20.0,
                qpdf: 0.8,
            },
            lattice_points: 20,
            b: 1.4641,
            n0: Some(9),
            max_samples: Some(40_000),
            max_iterations: None,
            trials: 10,
            base_seed: 0,
            nk_floor: 0,
            jobs,
            out,
        }
    }
}
