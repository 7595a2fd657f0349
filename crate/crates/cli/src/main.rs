//! `plasticwalk`: run walks, convergence sweeps, dispersion tables and QCA checks.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{preset_profile, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "plasticwalk",
    version,
    about = "Plastic quantum walk laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for the sweep rows.
    #[arg(long, global = true, env = "PLASTICWALK_THREADS")]
    threads: Option<usize>,

    /// Seed for randomized helpers (the main paths are deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// One walk trajectory with spinor snapshots.
    Simulate,
    /// Convergence sweep over the epsilon list.
    Sweep,
    /// Walk eigenphases against the lattice and continuum dispersions.
    Dispersion,
    /// One-particle encoding and number-conservation checks of the QCA.
    Qca,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Mass.
    #[arg(long, global = true)]
    m: Option<f64>,
    /// Named profile: flat, sine-bump or gaussian-well.
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Constant speed for the flat profile.
    #[arg(long, global = true)]
    c: Option<f64>,
    #[arg(long, global = true)]
    length: Option<f64>,
    #[arg(long, global = true)]
    time: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Comma separated, strictly decreasing.
    #[arg(long, global = true, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long, global = true)]
    stride: Option<usize>,
    #[arg(long, global = true)]
    k_count: Option<usize>,
    #[arg(long, global = true)]
    min_order: Option<f64>,
    #[arg(long, global = true)]
    cells: Option<usize>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    zeta: Option<f64>,
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => match &cli.overrides.profile {
            Some(name) => RunConfig::preset(name)?,
            None => RunConfig::default(),
        },
    };
    let o = &cli.overrides;
    macro_rules! set {
        ($($field:ident).+ <- $value:expr) => {
            if let Some(v) = $value.clone() {
                cfg.$($field).+ = v;
            }
        };
    }
    set!(alpha <- o.alpha);
    set!(m <- o.m);
    set!(length <- o.length);
    set!(time <- o.time);
    set!(epsilon <- o.epsilon);
    set!(epsilons <- o.epsilons);
    set!(stride <- o.stride);
    set!(k_count <- o.k_count);
    set!(qca.cells <- o.cells);
    set!(qca.theta <- o.theta);
    set!(qca.zeta <- o.zeta);
    if let Some(v) = o.min_order {
        cfg.min_order = Some(v);
    }
    if let Some(name) = &o.profile {
        cfg.profile = preset_profile(name, cfg.length)?;
    }
    if let Some(c) = o.c {
        cfg.profile = plasticwalk::CProfile::flat(c);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    if cli.print_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config(
                "threads",
                "threads=0 is out of range, must be >= 1",
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    std::fs::create_dir_all(&cli.out)?;
    match cli.command {
        Command::Simulate => commands::simulate(&cfg, &cli.out),
        Command::Sweep => commands::sweep(&cfg, &cli.out),
        Command::Dispersion => commands::dispersion(&cfg, &cli.out),
        Command::Qca => commands::qca(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
