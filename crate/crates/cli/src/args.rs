//! Command-line grammar and the optional TOML config file.
//!
//! Every tuning flag is optional on the command line so that a value from
//! `--config` can fill it in; command-line values win. Anything left unset
//! falls back to the library defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mixep::{Case, FitConfig, PPolicy};
use serde::Deserialize;

use crate::error::CliError;

/// Grid of λ values tried by BIC when no single `--lambda` is given.
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [0.0, 0.005, 0.01, 0.02, 0.05];
pub const DEFAULT_N: usize = 400;
pub const DEFAULT_REPS: usize = 50;
/// Share of bench replicates that must succeed for exit code 0.
pub const BENCH_SUCCESS_SHARE: f64 = 0.8;

#[derive(Debug, Parser)]
#[command(
    name = "mixep",
    version,
    about = "Robust mixtures of linear regressions with exponential power errors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one benchmark data set and write data.csv and truth.json.
    Simulate(Flags),
    /// Fit a mixture to --data and write model.json, responsibilities.csv and trace.csv.
    Fit(Flags),
    /// Run seeded replicates (simulate, fit, align) and write the MSE/bias report.
    Bench(Flags),
}

impl Command {
    pub fn flags(&self) -> &Flags {
        match self {
            Command::Simulate(f) | Command::Fit(f) | Command::Bench(f) => f,
        }
    }
}

/// Flags shared by all subcommands. The same keys (with `-` or `_`) are
/// accepted in the config file.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Flags {
    /// Benchmark scenario: I, II, III or IV.
    #[arg(long, value_parser = parse_case)]
    #[serde(default, deserialize_with = "de_case")]
    pub case: Option<Case>,
    /// Observations per data set.
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    /// Seed of the data and initialization streams (master seed for bench).
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Number of components the fit starts from.
    #[arg(long)]
    #[serde(default, alias = "k_max")]
    pub k_max: Option<usize>,
    /// Single penalty weight λ; disables the BIC search over --lambda-grid.
    #[arg(long, conflicts_with = "lambda_grid")]
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Comma-separated λ candidates, chosen by BIC.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(default, alias = "lambda_grid")]
    pub lambda_grid: Option<Vec<f64>>,
    /// Penalty offset ε.
    #[arg(long)]
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Fixed EP shape shared by all components.
    #[arg(long, conflicts_with = "p_grid")]
    #[serde(default)]
    pub p: Option<f64>,
    /// Comma-separated EP shape candidates, chosen by penalized objective.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(default, alias = "p_grid")]
    pub p_grid: Option<Vec<f64>>,
    /// Maximum GEM iterations.
    #[arg(long)]
    #[serde(default, alias = "max_iter")]
    pub max_iter: Option<usize>,
    /// Relative objective change that counts as converged.
    #[arg(long)]
    #[serde(default)]
    pub tol: Option<f64>,
    /// Random initializations.
    #[arg(long)]
    #[serde(default)]
    pub starts: Option<usize>,
    /// Bench replicates.
    #[arg(long)]
    #[serde(default)]
    pub reps: Option<usize>,
    /// Input CSV with a `y` column (fit).
    #[arg(long)]
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short = 'o')]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// TOML file supplying any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Prepend a column of ones to the regressors (default).
    #[arg(long, overrides_with = "no_intercept")]
    #[serde(skip)]
    pub intercept: bool,
    /// Use the CSV regressors as they are.
    #[arg(long, overrides_with = "intercept")]
    #[serde(skip)]
    pub no_intercept: bool,
    #[arg(skip)]
    #[serde(default, rename = "intercept")]
    pub intercept_setting: Option<bool>,
}

fn parse_case(s: &str) -> Result<Case, String> {
    s.parse::<Case>().map_err(|e| e.to_string())
}

fn de_case<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Case>, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    s.map(|s| parse_case(&s).map_err(serde::de::Error::custom)).transpose()
}

impl Flags {
    /// Fills unset values from the file named by `--config`, if any.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        if self.intercept {
            self.intercept_setting = Some(true);
        } else if self.no_intercept {
            self.intercept_setting = Some(false);
        }
        match self.config.clone() {
            Some(path) => Ok(self.or(Self::from_file(&path)?)),
            None => Ok(self),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// `self` where set, otherwise `other`.
    pub fn or(self, other: Self) -> Self {
        Self {
            case: self.case.or(other.case),
            n: self.n.or(other.n),
            seed: self.seed.or(other.seed),
            k_max: self.k_max.or(other.k_max),
            lambda: self.lambda.or(other.lambda),
            lambda_grid: self.lambda_grid.or(other.lambda_grid),
            epsilon: self.epsilon.or(other.epsilon),
            p: self.p.or(other.p),
            p_grid: self.p_grid.or(other.p_grid),
            max_iter: self.max_iter.or(other.max_iter),
            tol: self.tol.or(other.tol),
            starts: self.starts.or(other.starts),
            reps: self.reps.or(other.reps),
            data: self.data.or(other.data),
            out: self.out.or(other.out),
            config: self.config,
            intercept: self.intercept,
            no_intercept: self.no_intercept,
            intercept_setting: self.intercept_setting.or(other.intercept_setting),
        }
    }

    pub fn use_intercept(&self) -> bool {
        self.intercept_setting.unwrap_or(true)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn case(&self) -> Result<Case, CliError> {
        match self.case {
            Some(Case::Custom) => Err(CliError::Usage("--case must be one of I, II, III, IV".into())),
            Some(case) => Ok(case),
            None => Err(CliError::Usage("--case is required".into())),
        }
    }

    /// The fit settings these flags describe; `seed` is the fit seed.
    pub fn fit_settings(&self, seed: u64) -> Result<FitSettings, CliError> {
        let defaults = FitConfig::<f64>::default();
        if self.lambda.is_some() && self.lambda_grid.is_some() {
            return Err(CliError::Usage(
                "--lambda and --lambda-grid are mutually exclusive".into(),
            ));
        }
        if self.p.is_some() && self.p_grid.is_some() {
            return Err(CliError::Usage("--p and --p-grid are mutually exclusive".into()));
        }
        let p_policy = match (self.p, &self.p_grid) {
            (Some(p), _) => PPolicy::Fixed(p),
            (None, Some(grid)) => PPolicy::Grid(grid.clone()),
            (None, None) => defaults.p_policy.clone(),
        };
        let lambdas = match (self.lambda, &self.lambda_grid) {
            (Some(l), _) => LambdaChoice::Fixed(l),
            (None, Some(grid)) if grid.is_empty() => {
                return Err(CliError::Usage("--lambda-grid is empty".into()));
            }
            (None, Some(grid)) => LambdaChoice::Grid(grid.clone()),
            (None, None) => LambdaChoice::Grid(DEFAULT_LAMBDA_GRID.to_vec()),
        };
        let config = FitConfig {
            k_max: self.k_max.unwrap_or(defaults.k_max),
            lambda: match lambdas {
                LambdaChoice::Fixed(l) => l,
                LambdaChoice::Grid(_) => defaults.lambda,
            },
            epsilon: self.epsilon.unwrap_or(defaults.epsilon),
            p_policy,
            max_iter: self.max_iter.unwrap_or(defaults.max_iter),
            tol: self.tol.unwrap_or(defaults.tol),
            n_starts: self.starts.unwrap_or(defaults.n_starts),
            seed,
            ..defaults
        };
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(FitSettings { config, lambdas })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LambdaChoice {
    Fixed(f64),
    /// Fit every candidate and keep the lowest BIC.
    Grid(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitSettings {
    pub config: FitConfig<f64>,
    pub lambdas: LambdaChoice,
}
