//! bubblelab: construct, reduce, correct and check multi-bubble solutions.

mod commands;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use params::{Overrides, Params};

#[derive(Parser, Debug)]
#[command(name = "bubblelab", version, about = "Multi-bubble solutions of -Δu + Q(y)u = u^((N+2)/(N-2)) in R^N")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// TOML file with run parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Lattice spacing.
    #[arg(long = "L", global = true)]
    l: Option<f64>,
    /// Sites 0..=m.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Dimension, N >= 5.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Amplitude of Q.
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Contraction tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Q at the lattice points, for `nonexist`.
    #[arg(long, global = true)]
    q0: Option<f64>,
    /// Print the merged parameters as JSON and exit.
    #[arg(long, global = true)]
    print_params: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Balanced lattice solution at the requested height.
    Construct,
    /// Reduced height balance over the spacings and the μ ~ L^slope fit.
    Reduce,
    /// One contraction for the correction at fixed heights.
    Correct,
    /// Pohozaev identities on a constructed solution.
    Pohozaev,
    /// Periodicity, uniqueness pair, kernel projections and inequality checks.
    Diagnose,
    /// Projected identity when Q does not vanish on the lattice.
    Nonexist,
    /// Feasibility and scaling over the configured (N, β) cases.
    Sweep,
}

fn run(cli: &Cli) -> commands::Res<()> {
    let o = Overrides { n: cli.n, beta: cli.beta, a: cli.a, mu: cli.mu, l: cli.l, m: cli.m, tol: cli.tol, seed: cli.seed, q0: cli.q0 };
    let p = Params::load(cli.config.as_deref(), &o)?;
    if cli.print_params {
        println!("{}", serde_json::to_string_pretty(&p)?);
        return Ok(());
    }
    std::fs::create_dir_all(&cli.out)?;
    std::fs::write(cli.out.join("params.json"), serde_json::to_string_pretty(&p)?)?;
    let out = cli.out.as_path();
    match cli.cmd {
        Cmd::Construct => commands::construct_cmd(&p, out),
        Cmd::Reduce => commands::reduce_cmd(&p, out),
        Cmd::Correct => commands::correct_cmd(&p, out),
        Cmd::Pohozaev => commands::pohozaev_cmd(&p, out),
        Cmd::Diagnose => commands::diagnose_cmd(&p, out),
        Cmd::Nonexist => commands::nonexist_cmd(&p, out),
        Cmd::Sweep => commands::sweep_cmd(&p, out),
    }?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
