use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dfsctl::commands::{self, DemoCase, DemoOptions, OutputFormat};

/// Analyse control channels that force states into a decoherence-free subspace.
#[derive(Debug, Parser)]
#[command(name = "dfsctl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check trace preservation and the range condition.
    Verify {
        path: PathBuf,
        /// Absolute tolerance (default: the file's, else 1e-9).
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Run every check and report the DFS certificate if one exists.
    Analyze {
        path: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Write the equivalent measure-then-correct protocol as a channel file.
    Decompose {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Output purity statistics over random pure input states.
    Sample {
        path: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Print a built-in channel as a channel file.
    Demo {
        #[arg(long, value_enum)]
        case: DemoCase,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim_a: usize,
        #[arg(long, default_value_t = 2)]
        dim_abar: usize,
        #[arg(long, default_value_t = 3)]
        n_kraus: usize,
        /// Target basis index for `--case reset`.
        #[arg(long, default_value_t = 0)]
        target: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let code = match cli.command {
        Command::Verify {
            path,
            tolerance,
            format,
        } => commands::verify(&path, tolerance, format, &mut out, &mut err),
        Command::Analyze {
            path,
            tolerance,
            format,
        } => commands::analyze(&path, tolerance, format, &mut out, &mut err),
        Command::Decompose {
            path,
            out: out_path,
            tolerance,
        } => commands::decompose(&path, tolerance, out_path.as_deref(), &mut out, &mut err),
        Command::Sample {
            path,
            n,
            seed,
            tolerance,
            format,
        } => commands::sample(&path, n, seed, tolerance, format, &mut out, &mut err),
        Command::Demo {
            case,
            seed,
            dim_a,
            dim_abar,
            n_kraus,
            target,
        } => commands::demo(
            DemoOptions {
                case,
                seed,
                dim_a,
                dim_abar,
                n_kraus,
                target,
            },
            &mut out,
            &mut err,
        ),
    };
    ExitCode::from(code)
}
