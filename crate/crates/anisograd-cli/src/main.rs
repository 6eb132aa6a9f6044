use std::path::PathBuf;
use std::process::ExitCode;

use anisograd::campaign::{self, ExperimentConfig, Outcome, RunContext, EXIT_CONFIG};
use clap::{Parser, Subcommand};
use log::info;

#[derive(Parser, Debug)]
#[command(name = "anisograd", version, about = "Part-map analysis, viscosity solves and estimate campaigns")]
struct Cli {
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Part map name (preset or custom_operators entry).
    #[arg(long, global = true)]
    operator: Option<String>,
    /// Concurrent campaign instances.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: config output_dir, else ./anisograd-out).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ellipticity, decomposition, factorization and kernel of a part map.
    Analyze,
    /// One regularised Dirichlet solve.
    Solve,
    /// Viscosity sweep over j.
    Sweep,
    /// Estimate-verification campaign.
    Verify,
    /// Korn/Poincaré ratios on random fields and Ornstein probes.
    KornProbe,
}

fn run(cli: Cli) -> anisograd::Result<Outcome> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut config = ExperimentConfig::parse(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let output = cli
        .output
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("anisograd-out"));
    let ctx = RunContext::new(config, text, output, cli.jobs);
    info!("config sha256 {}", ctx.config.hash());
    match cli.command {
        Command::Analyze => {
            let name = cli
                .operator
                .or_else(|| ctx.config.analyze.as_ref().map(|a| a.operator.clone()))
                .ok_or_else(|| anisograd::Error::Config("analyze needs --operator or [analyze] operator".into()))?;
            campaign::run_analyze(&ctx, &name)
        }
        Command::Solve => campaign::run_solve(&with_operator(ctx, cli.operator, |c, op| {
            if let Some(s) = c.solve.as_mut() {
                s.operator = op;
            }
        })),
        Command::Sweep => campaign::run_sweep(&with_operator(ctx, cli.operator, |c, op| {
            if let Some(s) = c.sweep.as_mut() {
                s.operator = op;
            }
        })),
        Command::Verify => campaign::run_verify(&ctx),
        Command::KornProbe => campaign::run_korn_probe(&ctx),
    }
}

fn with_operator(mut ctx: RunContext, op: Option<String>, set: impl Fn(&mut ExperimentConfig, String)) -> RunContext {
    if let Some(op) = op {
        set(&mut ctx.config, op);
    }
    ctx
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ANISOGRAD_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            println!("{}", out.summary);
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(campaign::exit_code_for(&e) as u8)
        }
    }
}
