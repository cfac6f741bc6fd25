//! Flags, the configuration file and their merge.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use regenstat::models::dist::{StepDist, TailDist};
use regenstat::models::iid_block::ClusterLaw;
use regenstat::models::prescribed::MRule;
use regenstat::{BetaSource, GridSpec, ModelSpec};

pub const OUT_DIR_ENV: &str = "REGENSTAT_OUT_DIR";

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<regenstat::Error> for CliError {
    fn from(e: regenstat::Error) -> Self {
        if e.is_config_error() {
            CliError::config(e.to_string())
        } else {
            CliError::runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(format!("i/o: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "regenstat",
    version,
    about = "Extremes of regenerative processes: simulation and compound approximation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate cycles (default) or, with --n, length-n trajectories.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Number of cycles.
        #[arg(long)]
        cycles: Option<u64>,
        /// Top values kept per cycle.
        #[arg(long)]
        r: Option<usize>,
        /// Trajectory length; switches to order-statistic output.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        q_max: Option<usize>,
        #[arg(long)]
        replicas: Option<u64>,
    },
    /// Estimate mean cycle length, cycle-maximum tail and cluster sizes.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        cycles: Option<u64>,
        /// Largest cluster size estimated.
        #[arg(long)]
        r: Option<usize>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Compare empirical order-statistic laws with the approximation.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        q_max: Option<usize>,
        #[arg(long)]
        replicas: Option<u64>,
        /// `auto`, `int:LO:HI` or `x1,x2,...`.
        #[arg(long)]
        grid: Option<String>,
        /// One or more of closed_form, estimated, threshold_dependent.
        #[arg(long, value_delimiter = ',')]
        beta_source: Vec<String>,
        /// Cycles for anything that has to be estimated.
        #[arg(long)]
        estimate_cycles: Option<u64>,
    },
    /// Print gamma_{q,k} for the given cluster probabilities and the index set.
    Gamma { q: usize, k: usize, beta: Vec<f64> },
    /// Ratio of the cycle-maximum tail to the reference law.
    Tailcheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        cycles: Option<u64>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML or JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; required for every simulation.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Abort when a single cycle exceeds this many steps.
    #[arg(long)]
    pub cycle_cap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// geometric_jump, reflected_walk, lindley, prescribed_beta or iid_block.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Lindley step law, e.g. `pareto:1.5:shift=-4`, `const:-1`, `twopoint:0.3`.
    #[arg(long)]
    pub step: Option<String>,
    /// Cluster probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Level law of the prescribed-beta chain, e.g. `pareto:2`.
    #[arg(long)]
    pub tail: Option<String>,
    /// `log2`, `const:M` or `prop:C`.
    #[arg(long)]
    pub m_rule: Option<String>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Vec<f64>,
    /// Quantile levels of the cycle maximum, used instead of thresholds.
    #[arg(long, value_delimiter = ',')]
    pub quantiles: Vec<f64>,
}

/// Contents of a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelSpec>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub cycle_cap: Option<u64>,
    pub cycles: Option<u64>,
    pub r: Option<usize>,
    pub n: Option<u64>,
    pub q_max: Option<usize>,
    pub replicas: Option<u64>,
    pub thresholds: Option<Vec<f64>>,
    pub quantiles: Option<Vec<f64>>,
    pub grid: Option<GridSpec>,
    pub beta_source: Option<Vec<BetaSource>>,
    pub estimate_cycles: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
        }
    }
}

/// Fully resolved settings of one run, echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub format: Format,
    pub cycle_cap: u64,
}

fn parse_field<T: std::str::FromStr<Err = regenstat::Error>>(s: &str) -> Result<T, CliError> {
    s.parse().map_err(CliError::from)
}

impl ModelArgs {
    fn any_parameter(&self) -> bool {
        self.p.is_some()
            || self.step.is_some()
            || !self.beta.is_empty()
            || self.tail.is_some()
            || self.m_rule.is_some()
    }

    fn require_p(&self, name: &str) -> Result<f64, CliError> {
        self.p
            .ok_or_else(|| CliError::config(format!("model {name} needs --p")))
    }

    fn build_from_flags(&self, name: &str) -> Result<ModelSpec, CliError> {
        let name = name.replace('-', "_");
        Ok(match name.as_str() {
            "geometric_jump" => ModelSpec::GeometricJump {
                p: self.require_p(&name)?,
            },
            "reflected_walk" => ModelSpec::ReflectedWalk {
                p: self.require_p(&name)?,
            },
            "lindley" => ModelSpec::Lindley {
                step: parse_field::<StepDist>(
                    self.step
                        .as_deref()
                        .ok_or_else(|| CliError::config("model lindley needs --step"))?,
                )?,
            },
            "prescribed_beta" => {
                if self.beta.is_empty() {
                    return Err(CliError::config("model prescribed_beta needs --beta"));
                }
                ModelSpec::PrescribedBeta {
                    beta: self.beta.clone(),
                    tail: parse_field::<TailDist>(self.tail.as_deref().unwrap_or("pareto:2"))?,
                    m_rule: parse_field::<MRule>(self.m_rule.as_deref().unwrap_or("log2"))?,
                }
            }
            "iid_block" => {
                if self.beta.is_empty() {
                    return Err(CliError::config("model iid_block needs --beta"));
                }
                ModelSpec::IidBlock {
                    cluster_law: ClusterLaw::uniform(self.beta.clone()),
                }
            }
            other => return Err(CliError::config(format!("unknown model `{other}`"))),
        })
    }

    /// Flags given without `--model` override fields of the file's model.
    fn override_fields(&self, mut spec: ModelSpec) -> Result<ModelSpec, CliError> {
        match &mut spec {
            ModelSpec::GeometricJump { p } | ModelSpec::ReflectedWalk { p } => {
                if let Some(v) = self.p {
                    *p = v;
                }
            }
            ModelSpec::Lindley { step } => {
                if let Some(s) = &self.step {
                    *step = parse_field(s)?;
                }
            }
            ModelSpec::PrescribedBeta { beta, tail, m_rule } => {
                if !self.beta.is_empty() {
                    *beta = self.beta.clone();
                }
                if let Some(t) = &self.tail {
                    *tail = parse_field(t)?;
                }
                if let Some(m) = &self.m_rule {
                    *m_rule = parse_field(m)?;
                }
            }
            ModelSpec::IidBlock { cluster_law } => {
                if !self.beta.is_empty() {
                    *cluster_law = ClusterLaw::uniform(self.beta.clone());
                }
            }
        }
        Ok(spec)
    }

    pub fn resolve(&self, file: Option<&ModelSpec>) -> Result<ModelSpec, CliError> {
        let spec = match (&self.model, file) {
            (Some(name), _) => self.build_from_flags(name)?,
            (None, Some(spec)) if self.any_parameter() => self.override_fields(spec.clone())?,
            (None, Some(spec)) => spec.clone(),
            (None, None) => {
                return Err(CliError::config(
                    "no model given (use --model or a config file with a `model` table)",
                ))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Common {
    pub fn load_file(&self) -> Result<FileConfig, CliError> {
        match &self.config {
            Some(path) => FileConfig::load(path),
            None => Ok(FileConfig::default()),
        }
    }

    pub fn resolve(&self, file: &FileConfig, model: ModelSpec) -> Result<RunConfig, CliError> {
        let seed = self.seed.or(file.seed).ok_or_else(|| {
            CliError::config("a seed is required (--seed or `seed` in the config file)")
        })?;
        Ok(RunConfig {
            model,
            seed,
            workers: self.workers.or(file.workers).unwrap_or(0),
            out_dir: self
                .out_dir
                .clone()
                .or_else(|| file.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
            format: self.format.or(file.format).unwrap_or(Format::Csv),
            cycle_cap: self
                .cycle_cap
                .or(file.cycle_cap)
                .unwrap_or(regenstat::DEFAULT_CYCLE_CAP),
        })
    }
}

/// Thresholds from flags, else from the file.
pub fn resolve_thresholds(
    args: &ThresholdArgs,
    file: &FileConfig,
    default: Vec<f64>,
) -> Result<regenstat::Thresholds, CliError> {
    use regenstat::Thresholds;
    if !args.thresholds.is_empty() && !args.quantiles.is_empty() {
        return Err(CliError::config(
            "give either --thresholds or --quantiles, not both",
        ));
    }
    if !args.thresholds.is_empty() {
        return Ok(Thresholds::Explicit(args.thresholds.clone()));
    }
    if !args.quantiles.is_empty() {
        return Ok(Thresholds::Quantiles(args.quantiles.clone()));
    }
    if let Some(t) = &file.thresholds {
        return Ok(Thresholds::Explicit(t.clone()));
    }
    if let Some(q) = &file.quantiles {
        return Ok(Thresholds::Quantiles(q.clone()));
    }
    Ok(Thresholds::Quantiles(default))
}

pub fn resolve_sources(flags: &[String], file: &FileConfig) -> Result<Vec<BetaSource>, CliError> {
    if !flags.is_empty() {
        return flags.iter().map(|s| parse_field(s)).collect();
    }
    Ok(file
        .beta_source
        .clone()
        .unwrap_or_else(|| vec![BetaSource::ClosedForm]))
}

pub fn resolve_grid(flag: Option<&str>, file: &FileConfig) -> Result<GridSpec, CliError> {
    match flag {
        Some(s) => parse_field(s),
        None => Ok(file.grid.clone().unwrap_or(GridSpec::Auto)),
    }
}
