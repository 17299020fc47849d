use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::{Format, RunConfig};

/// Bad arguments or configuration; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(
    name = "isrgame",
    version,
    about = "Equilibria of the FDM / full-spread spectrum sharing game under fading"
)]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format (default: json for `equilibrium`, csv otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for Monte Carlo and solver scans.
    #[arg(long, global = true, env = "ISRGAME_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy, Default)]
pub struct SolverFlags {
    /// Uniform scan nodes on (0, 1].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Bisection tolerance on the fixed-point defect.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Copy, Default)]
pub struct McFlags {
    /// Monte Carlo trials (default 100000)
    #[arg(long)]
    pub trials: Option<usize>,
    /// Stream seed (default 42)
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct PointFlags {
    /// Index into the list of fixed points (0 is pure FS); defaults to the
    /// first interior point.
    #[arg(long)]
    pub point: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the threshold ISR q(a).
    QTable {
        #[arg(long, default_value_t = 0.01)]
        a_min: f64,
        #[arg(long, default_value_t = 1.0)]
        a_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// List all fixed points of the threshold response map.
    Equilibrium {
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Play the game at a fixed point and report per-player statistics.
    Simulate {
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        mc: McFlags,
        #[command(flatten)]
        point: PointFlags,
        /// Strategy each player uses at the chosen point.
        #[arg(long, value_enum, default_value_t = commands::Profile::Exact)]
        profile: commands::Profile,
    },
    /// Conditional gain over pure FS along an ISR grid.
    GainCurve {
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        point: PointFlags,
        /// ISR grid in dB as start:stop:step.
        #[arg(long, default_value = "-3:12:1", allow_hyphen_values = true)]
        isr_db: String,
        /// Reference SNR in dB (default: each player's mean SNR).
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
    },
    /// Disagreement between the exact best response and the threshold rule.
    Disagreement {
        #[command(flatten)]
        mc: McFlags,
        /// Player whose channel statistics are used.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        player: u8,
        /// Opponent FDM probability.
        #[arg(long, default_value_t = 0.5)]
        a_other: f64,
        /// Power scales in dB, increasing.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "20,40,60,80",
            allow_hyphen_values = true
        )]
        scales: Vec<f64>,
    },
    /// Re-solve the fixed points while one model field varies.
    Sweep {
        #[command(flatten)]
        solver: SolverFlags,
        /// Field as <p1|p2|both>.<direct.shape|cross.shape|direct.mean|cross.mean|isr|power_scale>.
        #[arg(long)]
        param: String,
        /// Values; means, isr and power_scale in dB, shapes linear.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        values: Vec<f64>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<isrgame_core::Error>() {
            return match e {
                isrgame_core::Error::Numeric(_) => 1,
                isrgame_core::Error::Domain(_) | isrgame_core::Error::InvalidParameter(_) => 2,
            };
        }
    }
    1
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(UsageError("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.format.is_some() {
        cfg.output.format = cli.format;
    }
    if cli.output.is_some() {
        cfg.output.path = cli.output.clone();
    }
    let (report, default_format) = match cli.command {
        Command::QTable {
            a_min,
            a_max,
            steps,
        } => (commands::q_table(a_min, a_max, steps)?, Format::Csv),
        Command::Equilibrium { solver } => (commands::equilibrium(&mut cfg, solver)?, Format::Json),
        Command::Simulate {
            solver,
            mc,
            point,
            profile,
        } => (
            commands::simulate(&mut cfg, solver, mc, point, profile)?,
            Format::Csv,
        ),
        Command::GainCurve {
            solver,
            point,
            isr_db,
            snr_db,
        } => (
            commands::gain_curve(&mut cfg, solver, point, &isr_db, snr_db)?,
            Format::Csv,
        ),
        Command::Disagreement {
            mc,
            player,
            a_other,
            scales,
        } => (
            commands::disagreement(&mut cfg, mc, player, a_other, &scales)?,
            Format::Csv,
        ),
        Command::Sweep {
            solver,
            param,
            values,
        } => (
            commands::sweep(&mut cfg, solver, &param, &values)?,
            Format::Csv,
        ),
    };
    report.write(
        cfg.output.format.unwrap_or(default_format),
        cfg.output.path.as_deref(),
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
