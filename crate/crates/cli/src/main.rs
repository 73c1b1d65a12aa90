//! `decaylab` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or an I/O or
//! numerical error, 2 when checks are only inconclusive, 3 on usage or
//! configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use decaylab::suite::ToleranceProfile;
use decaylab::verify::Verdict;

mod commands;
mod config;
mod report;

/// Invalid command line or configuration.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Profile {
    Default,
    Strict,
}

#[derive(Parser, Debug)]
#[command(name = "decaylab", version, about = "Decay laws of convex gradient flows and their discretizations")]
struct Cli {
    /// TOML configuration for the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "DECAYLAB_OUT", default_value = "out", value_name = "DIR")]
    out: PathBuf,
    /// Overrides the seed of stochastic runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "default")]
    tolerance_profile: Profile,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Synthesize a 1-D objective from a decay curve.
    Construct,
    /// Gradient flow with Lyapunov and integrability checks.
    Flow,
    /// Gradient descent and its summability bound.
    Gd,
    /// SGD replicas with multiplicative noise.
    Sgd,
    /// Heavy ball with friction α/t, scheme or ODE.
    Heavyball,
    /// Heavy ball on μx²/2 with transition markers.
    Oscillator,
    /// Spectral profile of a slow-decay curve in L².
    Hilbert,
    /// Exact averaging map for a tail-dominated pair.
    Majorize,
    /// Square-root integral comparison, fuzzing and the g_α barrier.
    Sqrtcmp,
    /// The eight oscillator panels and their markers.
    #[command(name = "reproduce-fig1")]
    ReproduceFig1,
    /// Every acceptance criterion with a summary table.
    VerifyAll,
}

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(UsageError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = commands::Ctx {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        profile: match cli.tolerance_profile {
            Profile::Default => ToleranceProfile::Default,
            Profile::Strict => ToleranceProfile::Strict,
        },
    };
    match cli.command {
        Command::Construct => commands::construct(&ctx),
        Command::Flow => commands::flow(&ctx),
        Command::Gd => commands::gd(&ctx),
        Command::Sgd => commands::sgd(&ctx),
        Command::Heavyball => commands::heavyball(&ctx),
        Command::Oscillator => commands::oscillator(&ctx),
        Command::Hilbert => commands::hilbert(&ctx),
        Command::Majorize => commands::majorize(&ctx),
        Command::Sqrtcmp => commands::sqrtcmp(&ctx),
        Command::ReproduceFig1 => commands::reproduce_fig1(&ctx),
        Command::VerifyAll => commands::verify_all(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(v) => ExitCode::from(exit_code(v)),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<UsageError>().is_some() { 3 } else { 1 })
        }
    }
}
