use std::path::PathBuf;
use std::process::ExitCode;

use anosov_lab::{parse_config, run, selftest, Kind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "anosov-lab",
    version,
    about = "Cat-map laboratory experiment driver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Pressure(RunArgs),
    Rate(RunArgs),
    Deviation(RunArgs),
    Variance(RunArgs),
    Egorov(RunArgs),
    Uncertainty(RunArgs),
    NormDecay(RunArgs),
    Subadditivity(RunArgs),
    Observability(RunArgs),
    Survivor(RunArgs),
    Entropy(RunArgs),
    /// Run the built-in example checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "ANOSOV_LAB_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Selftest => return run_selftest(),
        Command::Pressure(a) => (Kind::Pressure, a),
        Command::Rate(a) => (Kind::Rate, a),
        Command::Deviation(a) => (Kind::Deviation, a),
        Command::Variance(a) => (Kind::Variance, a),
        Command::Egorov(a) => (Kind::Egorov, a),
        Command::Uncertainty(a) => (Kind::Uncertainty, a),
        Command::NormDecay(a) => (Kind::NormDecay, a),
        Command::Subadditivity(a) => (Kind::Subadditivity, a),
        Command::Observability(a) => (Kind::Observability, a),
        Command::Survivor(a) => (Kind::Survivor, a),
        Command::Entropy(a) => (Kind::Entropy, a),
    };
    let mut cfg = match parse_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    if cfg.kind != kind {
        eprintln!(
            "config {} describes a `{}` experiment, not `{kind}`",
            args.config.display(),
            cfg.kind
        );
        return ExitCode::from(2);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = args.out {
        cfg.out = o;
    }
    let threads = args.threads.or(cfg.threads).unwrap_or(1);
    match run(&cfg, threads) {
        Ok(m) => {
            for t in &m.tasks {
                match &t.error {
                    None => println!(
                        "{:<14} ok       {:>8.2}s  {} rows",
                        t.cell, t.seconds, t.rows
                    ),
                    Some(e) => println!("{:<14} skipped  {e}", t.cell),
                }
            }
            println!(
                "outputs in {} (config hash {})",
                cfg.out.display(),
                &m.config_hash[..12]
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn run_selftest() -> ExitCode {
    let checks = selftest();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!(
            "[{}] {:<48} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
