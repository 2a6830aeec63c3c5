use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polar_wiretap::transforms::Family;
use polar_wiretap::wiretap::Variant;
use polarsec::config::{ExperimentConfig, FamilySpec};
use polarsec::validate::OracleConfig;
use polarsec::{design, kernel, sweep, validate, CliError};
use serde::Serialize;

/// Exit code of a run that completed but found no feasible design, or an
/// oracle run with failing invariants.
const EXIT_NEGATIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "polarsec",
    version,
    about = "Wiretap code design over erasure channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design one code and print a JSON report.
    Design(PointArgs),
    /// Sweep blocklengths and families, writing one CSV per scenario.
    Sweep(PointArgs),
    /// Check the bounds against exact enumeration on random partitions.
    Oracle(OracleArgs),
    /// Print the erasure polynomials of a kernel file.
    Kernel(KernelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

#[derive(Args)]
struct PointArgs {
    /// JSON experiment configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (design) or directory (sweep); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, value_enum)]
    bound: Option<BoundArg>,
    /// Code family; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    family: Vec<Family>,
    #[arg(long)]
    pb: Option<f64>,
    /// Eve's erasure probability; repeat for several sweep scenarios.
    #[arg(long, value_delimiter = ',')]
    pe: Vec<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Blocklength; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Kernel file for the mk family (outermost first); repeatable.
    #[arg(long)]
    kernel: Vec<PathBuf>,
    /// Shift Monte-Carlo estimates by this many standard errors before thresholding.
    #[arg(long)]
    conservative_z: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    /// JSON oracle configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of random configurations.
    #[arg(long)]
    configs: Option<usize>,
    #[arg(long)]
    pb: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pe: Vec<f64>,
    #[arg(long)]
    family: Option<Family>,
}

#[derive(Args)]
struct KernelArgs {
    /// Kernel file: the size on the first line, then one row of 0/1 per line.
    kernel: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn experiment_config(args: &PointArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let mut cfg = ExperimentConfig::load(path)?;
            cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
            cfg
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(b) = args.bound {
        cfg.bounds = match b {
            BoundArg::One => vec![Variant::Bound1],
            BoundArg::Two => vec![Variant::Bound2],
            BoundArg::Both => vec![Variant::Bound1, Variant::Bound2],
        };
    }
    if !args.family.is_empty() {
        cfg.families = args.family.iter().map(|&f| FamilySpec::plain(f)).collect();
    }
    if !args.kernel.is_empty() {
        for f in cfg.families.iter_mut().filter(|f| f.family == Family::Mk) {
            f.kernels = args.kernel.clone();
        }
    }
    if let Some(v) = args.pb {
        cfg.p_b = v;
    }
    if !args.pe.is_empty() {
        cfg.p_e = args.pe.clone();
    }
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    if let Some(v) = args.delta {
        cfg.delta = v;
    }
    if !args.n.is_empty() {
        cfg.blocklengths = args.n.clone();
    }
    if let Some(v) = args.conservative_z {
        cfg.conservative_z = v;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    Ok(cfg)
}

fn oracle_config(args: &OracleArgs) -> Result<OracleConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => OracleConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.configs {
        cfg.configs = v;
    }
    if let Some(v) = args.pb {
        cfg.p_b = v;
    }
    if !args.pe.is_empty() {
        cfg.p_e = args.pe.clone();
    }
    if let Some(v) = args.family {
        cfg.family = v;
    }
    Ok(cfg)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Design(args) => {
            let cfg = experiment_config(&args)?;
            let report = design::run_design(&cfg)?;
            emit_json(&report, cfg.out.as_deref())?;
            Ok(if report.feasible() { 0 } else { EXIT_NEGATIVE })
        }
        Command::Sweep(args) => {
            let cfg = experiment_config(&args)?;
            let scenarios = sweep::run_sweep(&cfg)?;
            match &cfg.out {
                Some(dir) => {
                    for path in sweep::write_scenarios(&scenarios, dir)? {
                        eprintln!("wrote {}", path.display());
                    }
                }
                None => {
                    let rows: Vec<_> = scenarios.into_iter().flat_map(|s| s.rows).collect();
                    sweep::write_csv(&rows, std::io::stdout().lock())?;
                }
            }
            Ok(0)
        }
        Command::Oracle(args) => {
            let cfg = oracle_config(&args)?;
            let report = validate::run_oracle(&cfg)?;
            emit_json(&report, args.out.as_deref())?;
            Ok(if report.pass { 0 } else { EXIT_NEGATIVE })
        }
        Command::Kernel(args) => {
            let report = kernel::analyze_file(&args.kernel)?;
            emit_json(&report, args.out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
