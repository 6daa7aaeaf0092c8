use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use statcurv_cli::{
    cmd_examples, parse_grid, run, CliError, Command, ExamplesConfig, Format, Outcome, PChoice,
    RunConfig, DEFAULT_GRID, EXIT_INPUT,
};

/// Curvature operators and Betti-number obstructions for stationary
/// Lorentzian metrics.
#[derive(Parser)]
#[command(name = "statcurv", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone)]
struct GridSizes(Vec<usize>);

fn grid_sizes(text: &str) -> Result<GridSizes, String> {
    parse_grid(text).map(GridSizes)
}

#[derive(Args)]
struct Common {
    /// Spec file (TOML).
    spec: PathBuf,
    /// Points per coordinate: one size for all, or a comma-separated list.
    #[arg(long, value_parser = grid_sizes)]
    grid: Option<GridSizes>,
    /// Multiplier applied to every tolerance, within [0.01, 100].
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every pointwise identity over a grid.
    Verify(Common),
    /// Test (n-p)-positivity of the curvature operator and report Betti numbers.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Test (n-p)-positivity for this p; defaults to 1.
        #[arg(long, conflicts_with = "all_p")]
        p: Option<usize>,
        /// Scan every admissible p and report the strongest verdict.
        #[arg(long)]
        all_p: bool,
    },
    /// Write per-point operator matrices as JSON lines.
    Export(Common),
    /// Print a generated stationary spec.
    Examples {
        /// Draw family and dimension from the seed.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, conflicts_with = "random")]
        family: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        squash: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn config(command: Command, c: Common, p: PChoice) -> RunConfig {
    RunConfig {
        spec_path: c.spec,
        command,
        grid: c.grid.map_or_else(|| vec![DEFAULT_GRID], |g| g.0),
        p,
        tol_scale: c.tol_scale,
        format: match c.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        out: c.out,
    }
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> Result<(), CliError> {
    for n in &outcome.notices {
        eprintln!("{n}");
    }
    match out {
        Some(path) => std::fs::write(path, &outcome.report).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.report.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Verify(c) => {
            let cfg = config(Command::Verify, c, PChoice::One(1));
            run(&cfg).map(|o| (o, cfg.out))
        }
        Cmd::Analyze { common, p, all_p } => {
            let choice = if all_p {
                PChoice::All
            } else {
                PChoice::One(p.unwrap_or(1))
            };
            let cfg = config(Command::Analyze, common, choice);
            run(&cfg).map(|o| (o, cfg.out))
        }
        Cmd::Export(c) => {
            let cfg = config(Command::Export, c, PChoice::One(1));
            run(&cfg).map(|o| (o, cfg.out))
        }
        Cmd::Examples {
            random: _,
            seed,
            family,
            dim,
            squash,
            out,
        } => {
            let cfg = ExamplesConfig {
                seed,
                family,
                dimension: dim,
                squash,
                unit: true,
            };
            cmd_examples(&cfg).map(|o| (o, out))
        }
    };
    let code = match result.and_then(|(o, out)| emit(&o, out.as_ref()).map(|_| o.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_INPUT as u8))
}
