//! `superbroadcast`: single runs, sweeps, bound tables, amplifier checks and
//! Fock-oracle runs of optimal covariant broadcasting.

mod commands;
mod format;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use superbroadcast::circuits::{BroadcastMode, BroadcastSpec};
use superbroadcast::Complex64;

use commands::Rendered;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Standard,
    Exact,
    Conj,
}

impl From<Mode> for BroadcastMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Standard => BroadcastMode::Standard,
            Mode::Exact => BroadcastMode::Exact,
            Mode::Conj => BroadcastMode::PhaseConjugate,
        }
    }
}

/// Parsed `start:stop[:step]` range.
#[derive(Debug, Clone)]
struct Grid<T>(Vec<T>);

#[derive(Debug, Parser)]
#[command(name = "superbroadcast", version, about = "Optimal N -> M broadcasting of displaced thermal states")]
struct Cli {
    /// Seed recorded in every report and used by Monte-Carlo runs.
    #[arg(long, global = true, env = "SUPERBROADCAST_SEED", default_value_t = 0)]
    seed: u64,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one broadcasting circuit and report the clones.
    Broadcast {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        nbar: f64,
        /// Signal amplitude, e.g. `0.5`, `1-2i`.
        #[arg(long, default_value = "0", value_parser = parse::complex, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, value_enum, default_value_t = Mode::Standard)]
        mode: Mode,
    },
    /// Standard broadcasting over a grid of M and nbar.
    Sweep {
        #[arg(long)]
        n: usize,
        /// `start:stop[:step]`
        #[arg(long, value_parser = |s: &str| parse::int_range(s).map(Grid))]
        m_range: Grid<usize>,
        /// `start:stop[:step]`
        #[arg(long, value_parser = |s: &str| parse::float_range(s).map(Grid))]
        nbar_range: Grid<f64>,
    },
    /// Noise bounds next to the values the circuits reach.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Input noise `Δx² + Δy²` per mode (at least 0.5).
        #[arg(long)]
        gamma: f64,
    },
    /// Check the heterodyne feed-forward amplifier against the ideal one.
    AmpVerify {
        #[arg(long)]
        gain: f64,
        #[arg(long, default_value_t = 100_000)]
        shots: usize,
    },
    /// Run the circuit in a truncated Fock basis and compare.
    Oracle {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long)]
        nbar: f64,
        #[arg(long, default_value = "0", value_parser = parse::complex, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, default_value_t = 14)]
        cutoff: usize,
    },
}

fn check_format(format: Option<Format>, default: Format, allowed: &[Format]) -> Result<Format, String> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(format!("format {f:?} is not available for this command").to_lowercase())
    }
}

fn run(cli: &Cli) -> Result<Rendered, (i32, String)> {
    use Format::*;
    let usage = |msg: String| (1, format!("error: {msg}"));
    let lib = |e: superbroadcast::Error| commands::failure(&e);
    let seed = cli.seed;
    match &cli.command {
        Command::Broadcast { n, m, nbar, alpha, mode } => {
            let f = check_format(cli.format, Json, &[Json, Text]).map_err(usage)?;
            let spec = BroadcastSpec::new(*n, *m, *nbar, *alpha, (*mode).into());
            commands::broadcast(spec, seed, f).map_err(lib)
        }
        Command::Sweep { n, m_range, nbar_range } => {
            let f = check_format(cli.format, Csv, &[Csv, Json]).map_err(usage)?;
            commands::sweep_grid(*n, &m_range.0, &nbar_range.0, seed, f).map_err(lib)
        }
        Command::Bounds { n, m, gamma } => {
            let f = check_format(cli.format, Text, &[Text, Json]).map_err(usage)?;
            commands::bounds(*n, *m, *gamma, seed, f).map_err(lib)
        }
        Command::AmpVerify { gain, shots } => {
            let f = check_format(cli.format, Text, &[Text, Json]).map_err(usage)?;
            commands::amp_verify(*gain, *shots, seed, f).map_err(lib)
        }
        Command::Oracle { n, m, nbar, alpha, cutoff } => {
            let f = check_format(cli.format, Text, &[Text, Json]).map_err(usage)?;
            commands::oracle(*n, *m, *nbar, *alpha, *cutoff, seed, f).map_err(lib)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Rendered { body, code }) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{body}");
            }
            ExitCode::from(code as u8)
        }
        Err((code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code as u8)
        }
    }
}
