//! Batch front end: load a spec, scan a grid, report.
//!
//! Every command returns an [`Outcome`] holding the exit status and the
//! report text, so the binary only has to route output.

mod analyze;
mod examples;
mod export;
mod verify;

use std::path::{Path, PathBuf};

use statcurv::metric::load_spec;
use statcurv::stationary::{conformal_normalize, StationaryStructure};
use statcurv::tolerance::Tolerances;
use statcurv::topology::Grid;

pub use analyze::{cmd_analyze, render_analysis};
pub use examples::{cmd_examples, ExamplesConfig};
pub use export::{cmd_export, ExportLine};
pub use verify::cmd_verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Grid points per coordinate when `--grid` is absent.
pub const DEFAULT_GRID: usize = 8;

pub const NORMALIZATION_NOTICE: &str = "notice: Killing field is not unit length; analysing the \
     conformally normalized metric g_L/(-g_L(T,T)), whose curvature differs from the input's";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(statcurv::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Errors raised while scanning: configuration mistakes are input errors,
/// everything else is a numerical failure at some point.
impl From<statcurv::Error> for CliError {
    fn from(e: statcurv::Error) -> Self {
        use statcurv::Error as E;
        match e {
            E::Grid(_)
            | E::POutOfRange { .. }
            | E::KOutOfRange { .. }
            | E::DimensionMismatch(_) => CliError::Input(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Analyze,
    Export,
}

/// Which `p` to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PChoice {
    One(usize),
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub command: Command,
    /// One entry broadcasts to every coordinate; otherwise one per coordinate.
    pub grid: Vec<usize>,
    pub p: PChoice,
    pub tol_scale: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, spec_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            spec_path: spec_path.into(),
            command,
            grid: vec![DEFAULT_GRID],
            p: PChoice::One(1),
            tol_scale: 1.0,
            format: Format::Text,
            out: None,
        }
    }

    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        if !(Tolerances::MIN_SCALE..=Tolerances::MAX_SCALE).contains(&self.tol_scale) {
            return Err(CliError::Input(format!(
                "tolerance scale {} outside [{}, {}]",
                self.tol_scale,
                Tolerances::MIN_SCALE,
                Tolerances::MAX_SCALE
            )));
        }
        Ok(Tolerances::scaled(self.tol_scale))
    }

    pub fn grid_for(&self, n: usize) -> Result<Grid, CliError> {
        let sizes = match self.grid.as_slice() {
            [s] => vec![*s; n],
            sizes if sizes.len() == n => sizes.to_vec(),
            sizes => {
                return Err(CliError::Input(format!(
                    "--grid has {} sizes, spec has {n} coordinates",
                    sizes.len()
                )))
            }
        };
        if sizes.contains(&1) {
            return Err(CliError::Input("grid sizes must be 0 or at least 2".into()));
        }
        Ok(Grid { sizes })
    }
}

/// Parse `--grid` values such as `16` or `20,20,8`.
pub fn parse_grid(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid grid size '{}'", s.trim()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    /// Report body, written to `--out` or stdout.
    pub report: String,
    /// Diagnostics for stderr.
    pub notices: Vec<String>,
}

pub fn load_structure(path: &Path) -> Result<StationaryStructure, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let spec =
        load_spec(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    StationaryStructure::from_spec(spec)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// The structure itself when its Killing field is declared unit, otherwise
/// its conformal normalization together with a notice.
pub fn unit_structure(
    s: &StationaryStructure,
) -> Result<(StationaryStructure, Option<String>), CliError> {
    if s.unit_flag() {
        return Ok((s.clone(), None));
    }
    let normalized = conformal_normalize(s).map_err(|e| CliError::Input(e.to_string()))?;
    Ok((normalized, Some(NORMALIZATION_NOTICE.to_string())))
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        Command::Verify => cmd_verify(config),
        Command::Analyze => cmd_analyze(config),
        Command::Export => cmd_export(config),
    }
}

pub(crate) fn grid_label(grid: &Grid) -> String {
    let sizes: Vec<String> = grid.sizes.iter().map(|s| s.to_string()).collect();
    format!("{} ({} points)", sizes.join("x"), grid.len())
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub(crate) fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}
