use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dcg_cli::check::run_checks;
use dcg_cli::compare::{compare, CsvTable};
use dcg_cli::{parse_config, run_scenario, CliError, Preset, RunOptions, EXIT_NUMERICAL, EXIT_VALIDATION};
use dcg_core::QuadratureConfig;

#[derive(Parser)]
#[command(name = "dcg", version, about = "Dynamical coarse-graining scenario runner")]
struct Cli {
    /// Directory for CSV output (overrides the config's `output`).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Gauss–Legendre nodes per panel axis for two-time integrals.
    #[arg(long = "quad-nodes-2d", global = true)]
    nodes_2d: Option<usize>,
    /// Nodes per panel axis for three-time integrals.
    #[arg(long = "quad-nodes-3d", global = true)]
    nodes_3d: Option<usize>,
    /// Nodes per panel axis for four-time integrals.
    #[arg(long = "quad-nodes-4d", global = true)]
    nodes_4d: Option<usize>,
    /// Absolute tolerance of adaptive integrals.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Run the methods of a scenario on separate threads.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config (or a preset name).
    Run { config: String },
    /// Per-column maximum deviation between two trajectory files.
    Compare { a: PathBuf, b: PathBuf },
    /// List the figure presets with their configs.
    Presets,
    /// Run the invariant suite on default parameters.
    Check,
}

fn quadrature(cli: &Cli) -> QuadratureConfig {
    let mut q = QuadratureConfig::default();
    if let Some(n) = cli.nodes_2d {
        q.nodes_2d = n;
    }
    if let Some(n) = cli.nodes_3d {
        q.nodes_3d = n;
    }
    if let Some(n) = cli.nodes_4d {
        q.nodes_4d = n;
    }
    if let Some(t) = cli.tol {
        q.tol = t;
    }
    q
}

// a closed pipe (`dcg presets | head`) is not an error
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        Err(e) => eprintln!("error: writing to stdout: {e}"),
        Ok(()) => {}
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let q = quadrature(cli);
    q.validate()?;
    match &cli.command {
        Command::Run { config } => {
            let scenario = match config.parse::<Preset>() {
                Ok(p) if !std::path::Path::new(config).exists() => p.scenario(),
                _ => {
                    let text = std::fs::read_to_string(config).map_err(|e| CliError::Io {
                        path: config.into(),
                        source: e,
                    })?;
                    parse_config(&text)?
                }
            };
            let opts = RunOptions {
                out_dir: cli.out_dir.clone(),
                quadrature: q,
                parallel: cli.parallel,
            };
            let report = run_scenario(&scenario, &opts)?;
            emit(&report.to_string());
            Ok(if report.any_failed() { EXIT_NUMERICAL } else { 0 })
        }
        Command::Compare { a, b } => {
            let table = compare(&CsvTable::read(a)?, &CsvTable::read(b)?)?;
            emit(&table.to_string());
            Ok(0)
        }
        Command::Presets => {
            let mut text = String::new();
            for p in Preset::ALL {
                let _ = writeln!(text, "# {}: {}\n{}", p.name(), p.description(), p.scenario().to_config());
            }
            emit(&text);
            Ok(0)
        }
        Command::Check => {
            let results = run_checks(&q);
            let mut text = String::new();
            for r in &results {
                let _ = writeln!(text, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            emit(&text);
            Ok(if results.iter().all(|r| r.passed) { 0 } else { EXIT_NUMERICAL })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Core(dcg_core::DcgError::Numerical(_)) => EXIT_NUMERICAL,
                _ => EXIT_VALIDATION,
            })
        }
    }
}
