//! `qst`: spin-chain state-transfer toolkit.
//!
//! All quantities are in units where the bulk coupling J = 1 (energies in J,
//! times in 1/J). Output is deterministic: identical configuration produces
//! byte-identical CSV/JSON.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{EvolveArgs, FitArgs, SpectrumArgs, SweepArgs, VerifyArgs};
use config::ConfigMap;
use output::Sink;
use qst_core::chain::ProtocolKind;

/// Failure modes mapped to exit codes: 2 for configuration/usage problems,
/// 3 for numerical failures.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => m,
        }
    }
}

/// Classify core-library errors: solver breakdowns are numerical (exit 3),
/// everything else stems from an invalid configuration (exit 2).
pub fn core_err(e: qst_core::Error) -> CliError {
    match e {
        qst_core::Error::ConvergenceFailure
        | qst_core::Error::LocalizationNotFound
        | qst_core::Error::SextetMismatch { .. } => CliError::numerical(e.to_string()),
        other => CliError::usage(other.to_string()),
    }
}

fn protocol_value(s: &str) -> Result<ProtocolKind, String> {
    commands::parse_protocol(s)
}

#[derive(Parser)]
#[command(
    name = "qst",
    version,
    about = "Quantum state transfer in XX spin chains: spectra, fidelity traces, \
             transfer-time sweeps and scaling fits.",
    long_about = "Quantum state transfer in XX spin chains.\n\n\
                  All numeric input and output is in units where the bulk coupling J = 1.\n\
                  Options may also be supplied via --config FILE (UTF-8 key=value lines,\n\
                  '#' starts a comment); command-line flags override file values.\n\n\
                  Exit codes: 0 success, 1 verification mismatch, 2 invalid usage or\n\
                  configuration, 3 numerical failure."
)]
struct Cli {
    /// Configuration file with key=value lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the primary artifact to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Worker threads for sweep grids.
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ChainFlags {
    /// Protocol: uniform, weak-edge-1q, barrier-edge-1q, barrier-nn-1q,
    /// weak-block-2q, barrier-block-2q.
    #[arg(long, value_parser = protocol_value)]
    protocol: Option<ProtocolKind>,

    /// Chain length.
    #[arg(long)]
    n: Option<usize>,

    /// Perturbation strength: the weak coupling J0 for weak-* protocols, the
    /// barrier field h for barrier-* protocols. Ignored by uniform.
    #[arg(long)]
    xi: Option<f64>,
}

#[derive(Args)]
struct GridFlags {
    /// Protocol (as for spectrum).
    #[arg(long, value_parser = protocol_value)]
    protocol: Option<ProtocolKind>,

    /// Comma-separated chain lengths, e.g. 12,18,24.
    #[arg(long, value_name = "LIST")]
    n_list: Option<String>,

    /// Comma-separated perturbation strengths, e.g. 0.01,0.005.
    #[arg(long, value_name = "LIST")]
    xi_list: Option<String>,

    /// Fidelity threshold defining the transfer time [default: 0.97].
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues with localization weights (CSV) and the spectral-class
    /// report (JSON).
    Spectrum {
        #[command(flatten)]
        chain: ChainFlags,
    },
    /// Average-fidelity trace over a time grid (CSV).
    Evolve {
        #[command(flatten)]
        chain: ChainFlags,
        /// Scan horizon [default: 20 Rabi periods when a gap exists].
        #[arg(long)]
        t_max: Option<f64>,
        /// Grid step [default: pi / (10 eps_max)].
        #[arg(long)]
        t_step: Option<f64>,
        /// Sender sites (1-based, comma-separated) [default: protocol edge block].
        #[arg(long, value_name = "LIST")]
        senders: Option<String>,
        /// Receiver sites (1-based, comma-separated).
        #[arg(long, value_name = "LIST")]
        receivers: Option<String>,
    },
    /// Transfer times over an (N, xi) grid (CSV).
    Sweep {
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Sweep, then fit a power law tau ~ x^exponent (JSON).
    Fit {
        #[command(flatten)]
        grid: GridFlags,
        /// Fit variable: xi or n [default: xi].
        #[arg(long)]
        vs: Option<String>,
    },
    /// Cross-check the spectral fast path against the exact-diagonalization
    /// oracle on small chains.
    Verify {
        /// Largest chain length to check [default: 10].
        #[arg(long)]
        n_max: Option<usize>,
        /// Random evaluation times per chain [default: 20].
        #[arg(long)]
        times: Option<usize>,
        /// RNG seed for the evaluation times [default: 7].
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::default(),
    };
    let out = match cli.out {
        Some(p) => Some(p),
        None => cfg.get("out").map(PathBuf::from),
    };
    let sink = Sink::from_path(out);
    let jobs = config::resolve(cli.jobs, &cfg, "jobs", config::parse_usize, Some(1))?;

    match cli.command {
        Command::Spectrum { chain } => commands::cmd_spectrum(
            SpectrumArgs { protocol: chain.protocol, n: chain.n, xi: chain.xi },
            &cfg,
            &sink,
        ),
        Command::Evolve { chain, t_max, t_step, senders, receivers } => commands::cmd_evolve(
            EvolveArgs {
                protocol: chain.protocol,
                n: chain.n,
                xi: chain.xi,
                t_max,
                t_step,
                senders,
                receivers,
            },
            &cfg,
            &sink,
        ),
        Command::Sweep { grid } => commands::cmd_sweep(
            SweepArgs {
                protocol: grid.protocol,
                n_list: grid.n_list,
                xi_list: grid.xi_list,
                threshold: grid.threshold,
            },
            &cfg,
            jobs,
            &sink,
        ),
        Command::Fit { grid, vs } => commands::cmd_fit(
            FitArgs {
                sweep: SweepArgs {
                    protocol: grid.protocol,
                    n_list: grid.n_list,
                    xi_list: grid.xi_list,
                    threshold: grid.threshold,
                },
                vs,
            },
            &cfg,
            jobs,
            &sink,
        ),
        Command::Verify { n_max, times, seed } => {
            commands::cmd_verify(VerifyArgs { n_max, times, seed }, &cfg, &sink)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
