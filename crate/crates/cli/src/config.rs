use std::fs;
use std::path::{Path, PathBuf};

use absorder::generators::families::{Fault, MapFamilySpec};
use absorder::matrix_order::DEFAULT_LEVELS;
use absorder::{SpaceModel, ToleranceConfig};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAP_COUNT: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "absorder",
    version,
    about = "Verify absolutely ordered spaces and maps between them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Model descriptor such as `hermitian:3`, `hermitian:1+2` or `lattice:5`.
    /// Repeatable.
    #[arg(long, global = true, value_name = "DESCRIPTOR")]
    pub model: Vec<String>,

    /// Map file for `classify-map`.
    #[arg(long, global = true, value_name = "FILE")]
    pub map: Option<PathBuf>,

    /// Map family for `theorem-suite`, e.g. `transpose:k=2`. Repeatable;
    /// replaces the generated matrix.
    #[arg(long, global = true, value_name = "SPEC")]
    pub family: Vec<String>,

    /// Size of the generated map matrix for `theorem-suite`.
    #[arg(long, global = true, value_name = "N")]
    pub map_count: Option<usize>,

    /// Highest matrix level checked.
    #[arg(long, global = true, value_name = "N")]
    pub levels: Option<usize>,

    #[arg(long, global = true)]
    pub samples: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_name = "EPS")]
    pub eps_abs: Option<f64>,

    #[arg(long, global = true, value_name = "EPS")]
    pub eps_rel: Option<f64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// TOML file with defaults for any of the flags above.
    #[arg(long, global = true, env = "ABSORDER_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, hide = true, value_name = "FAULT")]
    pub inject_fault: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Axiom and order-unit suites on each model.
    VerifyAxioms,
    /// Per-level classification of a map read from `--map`.
    ClassifyMap,
    /// Every theorem suite across a matrix of generated maps.
    TheoremSuite,
    /// Look for the witnesses that bound the theorems' hypotheses.
    CounterexampleSearch,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Machine,
}

/// Keys accepted in the TOML config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub models: Option<Vec<String>>,
    pub map: Option<PathBuf>,
    pub maps: Option<Vec<String>>,
    pub map_count: Option<usize>,
    pub levels: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub eps_abs: Option<f64>,
    pub eps_rel: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Everything that determines a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub models: Vec<SpaceModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<PathBuf>,
    /// Explicit family list; `None` means the generated matrix.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maps: Option<Vec<MapFamilySpec>>,
    pub map_count: usize,
    pub levels: usize,
    pub tolerance: ToleranceConfig,
    #[serde(skip_serializing_if = "is_no_fault")]
    pub fault: Fault,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn is_no_fault(f: &Fault) -> bool {
    *f == Fault::None
}

impl RunConfig {
    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(cli: Cli) -> Result<Self, String> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };

        let model_strs = if cli.model.is_empty() {
            file.models.unwrap_or_default()
        } else {
            cli.model
        };
        let models = model_strs
            .iter()
            .map(|s| s.parse::<SpaceModel>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;

        let family_strs = if cli.family.is_empty() {
            file.maps
        } else {
            Some(cli.family)
        };
        let maps = family_strs
            .map(|list| {
                list.iter()
                    .map(|s| s.parse::<MapFamilySpec>().map_err(|e| e.to_string()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;

        let defaults = ToleranceConfig::default();
        let tolerance = ToleranceConfig {
            eps_abs: cli.eps_abs.or(file.eps_abs).unwrap_or(defaults.eps_abs),
            eps_rel: cli.eps_rel.or(file.eps_rel).unwrap_or(defaults.eps_rel),
            samples: cli.samples.or(file.samples).unwrap_or(defaults.samples),
            seed: cli.seed.or(file.seed).unwrap_or(defaults.seed),
        };
        tolerance.validate().map_err(|e| e.to_string())?;

        let levels = cli.levels.or(file.levels).unwrap_or(DEFAULT_LEVELS);
        if levels == 0 {
            return Err("--levels must be at least 1".into());
        }
        let fault = match &cli.inject_fault {
            Some(s) => s.parse::<Fault>().map_err(|e| e.to_string())?,
            None => Fault::None,
        };

        Ok(Self {
            command: cli.command,
            models,
            map: cli.map.or(file.map),
            maps,
            map_count: cli
                .map_count
                .or(file.map_count)
                .unwrap_or(DEFAULT_MAP_COUNT),
            levels,
            tolerance,
            fault,
            format: cli.format.or(file.format).unwrap_or_default(),
            out: cli.out.or(file.out),
        })
    }
}
