use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ancf14_bench::{acceptance, run_to_dir, BenchmarkConfig, BenchmarkName, Result};
use ancf14_core::DeformationMode;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ancf14", version, about = "Benchmarks for the torsion-deformable ANCF14 beam element")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset benchmark or a JSON config and write CSV series plus summary.json.
    Run(RunArgs),
    /// Run every acceptance criterion and print one line per criterion.
    Acceptance,
}

#[derive(clap::Args)]
struct RunArgs {
    /// spring, princeton, shaft, buckling, or a path to a config file.
    target: String,
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long, value_enum)]
    deformation: Option<Deformation>,
    /// Time step in seconds for dynamic benchmarks.
    #[arg(long)]
    dt: Option<f64>,
    /// Output directory (default: results/<benchmark>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lock the twist of the beam (buckling ablation).
    #[arg(long)]
    no_torsion: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Deformation {
    Small,
    Large,
}

fn load_config(args: &RunArgs) -> Result<BenchmarkConfig> {
    let path = Path::new(&args.target);
    let mut cfg = match args.target.parse::<BenchmarkName>() {
        Ok(name) if !path.is_file() => BenchmarkConfig::preset(name),
        _ => BenchmarkConfig::from_file(path)?,
    };
    if let Some(n) = args.elements {
        cfg.n_elements = Some(n);
    }
    if let Some(d) = args.deformation {
        cfg.deformation_mode = match d {
            Deformation::Small => DeformationMode::Small,
            Deformation::Large => DeformationMode::Large,
        };
    }
    if let Some(dt) = args.dt {
        cfg.dt_s = Some(dt);
    }
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.no_torsion |= args.no_torsion;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &RunArgs) -> Result<bool> {
    let cfg = load_config(args)?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("results").join(cfg.name.as_str()));
    let summary = run_to_dir(&cfg, &dir)?;
    for c in &summary.checks {
        println!("{}", c.line());
    }
    println!("{} in {:.1} s, results in {}", cfg.name, summary.runtime_s, dir.display());
    Ok(summary.passed)
}

fn run_acceptance() -> Result<bool> {
    let criteria = acceptance::run_all()?;
    for c in &criteria {
        println!("{}", c.line());
    }
    Ok(criteria.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the error code; help and version exit cleanly.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Acceptance => run_acceptance(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
