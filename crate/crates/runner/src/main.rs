use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fda_runner::experiment::{self, run_experiment, verify};
use fda_runner::reference::{read_reference, render_reference, REFERENCE_FILE};
use fda_runner::ExperimentPlan;

#[derive(Parser)]
#[command(
    name = "fda",
    version,
    about = "Fractal decomposition optimizer benchmark runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a plan and write logs, report tables and the manifest.
    Run(Box<RunArgs>),
    /// Rebuild the report tables from the logs of an output directory.
    Report {
        #[arg(long)]
        out: PathBuf,
        /// Reference table to compare against; writes comparison.tsv.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Recompute every table from the logs and diff against the files on disk.
    Verify {
        #[arg(long)]
        out: PathBuf,
    },
    /// Render ECDF and scaling plots as SVG.
    Plot {
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a reference table; with --out, store its canonical form there.
    ImportRef {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file of `key = value` lines, applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dimensions, e.g. `2,3,5`.
    #[arg(long)]
    dims: Option<String>,
    /// Function ids, e.g. `1,3,8` or `1-24`, or `implemented`.
    #[arg(long)]
    functions: Option<String>,
    /// Instance ids, e.g. `1-15`.
    #[arg(long)]
    instances: Option<String>,
    /// Evaluation budget per dimension.
    #[arg(long)]
    budget_multiplier: Option<String>,
    /// Maximum decomposition depth.
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    inflation: Option<String>,
    #[arg(long)]
    ratio: Option<String>,
    #[arg(long)]
    omega_min: Option<String>,
    /// Frontier order: descending or ascending quality.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recorded in the manifest; runs are deterministic either way.
    #[arg(long)]
    seedless: bool,
}

fn build_plan(args: &RunArgs) -> Result<ExperimentPlan> {
    let mut plan = ExperimentPlan::default();
    if let Some(path) = &args.config {
        plan.load(path)?;
    }
    let flags = [
        ("dims", &args.dims),
        ("functions", &args.functions),
        ("instances", &args.instances),
        ("budget_multiplier", &args.budget_multiplier),
        ("depth", &args.depth),
        ("alpha", &args.alpha),
        ("inflation", &args.inflation),
        ("ratio", &args.ratio),
        ("omega_min", &args.omega_min),
        ("order", &args.order),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            plan.set(key, v)?;
        }
    }
    if let Some(out) = &args.out {
        plan.output = out.clone();
    }
    plan.seedless |= args.seedless;
    plan.normalize()?;
    Ok(plan)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => {
            let plan = build_plan(&args)?;
            let outcome = run_experiment(&plan)?;
            let failed = outcome.failures();
            println!(
                "{} runs, {} failed, manifest {} in {}",
                outcome.manifest.runs.len(),
                failed,
                outcome.manifest.manifest_hash,
                outcome.dir.display()
            );
            for r in outcome.manifest.runs.iter().filter(|r| r.error.is_some()) {
                eprintln!("{}: {}", r.problem, r.error.as_deref().unwrap_or(""));
            }
            Ok(if failed > 0 {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Report { out, reference } => {
            let manifest = experiment::report(&out, reference.as_deref())?;
            println!(
                "{} output files, manifest {}",
                manifest.outputs.len(),
                manifest.manifest_hash
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { out } => {
            let report = verify(&out)?;
            for d in &report.discrepancies {
                println!("DIFF {d}");
            }
            println!(
                "{} files checked, {} discrepancies",
                report.files_checked,
                report.discrepancies.len()
            );
            Ok(if report.is_clean() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Plot { out } => {
            for p in experiment::plot(&out)? {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ImportRef { file, out } => {
            let rows = read_reference(&file)?;
            println!("{}: {} rows", file.display(), rows.len());
            if let Some(dir) = out {
                let dest = dir.join(REFERENCE_FILE);
                experiment::write_atomic(&dest, render_reference(&rows).as_bytes())
                    .with_context(|| format!("storing {}", dest.display()))?;
                println!("wrote {}", dest.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
