//! `irs-oob`: runs one experiment file and writes its CSV output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use irs_oob::experiment::{load_spec, Runner};
use irs_oob::Error;

/// Run an irs-oob experiment (se-vs-snr, se-vs-n, ccdf or validate).
///
/// Exit status: 0 success, 1 validation failure, 2 spec error, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "irs-oob", version)]
struct Args {
    /// Experiment file (`key = value` lines; an empty file uses all defaults).
    #[arg(long, value_name = "PATH")]
    spec: PathBuf,

    /// Master seed; overrides `sim.seed` from the file.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory; overrides `output_dir` from the file.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads. Results do not depend on this.
    #[arg(long, env = "IRS_SIM_THREADS")]
    threads: Option<usize>,

    /// Also evaluate Y under X's actual phases and test that it matches random phases.
    #[arg(long)]
    debug_phase_identity: bool,

    /// Write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut spec = match load_spec(&args.spec) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("irs-oob: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Some(seed) = args.seed {
        spec.sim.seed = seed;
    }
    if let Some(out) = args.out {
        spec.output_dir = out;
    }
    let runner = Runner {
        threads: args.threads,
        debug_phase_identity: args.debug_phase_identity,
        gnuplot: args.gnuplot,
    };
    match runner.run(&spec) {
        Ok((report, written)) => {
            print!("{}", report.summary);
            for path in written {
                println!("wrote {}", path.display());
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("irs-oob: {} reported failures", spec.kind);
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("irs-oob: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
