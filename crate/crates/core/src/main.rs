use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hyperrigid::cli::{self, AnalyzeOptions};
use hyperrigid::matcore::Tol;
use hyperrigid::selftest;

/// Decide hyperrigidity of finite-dimensional C*-correspondences and graphs.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a correspondence or graph document and print a JSON report.
    Analyze {
        file: PathBuf,
        /// Absolute tolerance for numerical zero tests.
        #[arg(long, default_value_t = Tol::DEFAULT.value())]
        tol: f64,
        /// Compute the shift-dilation certificate and cross-check it.
        #[arg(long)]
        certify: bool,
        /// Report frame residuals for the module's basis generators.
        #[arg(long)]
        frame: bool,
        /// Fock space depth N.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Shift dimension M.
        #[arg(long, default_value_t = 4)]
        shift: usize,
        /// Replace infinite edge multiplicities by this cap before certifying.
        #[arg(long)]
        truncate: Option<u64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in quick acceptance corpus.
    Selftest,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match args.command {
        Command::Analyze { file, tol, certify, frame, depth, shift, truncate, out } => {
            let tol = match Tol::new(tol) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: --tol: {e}");
                    return ExitCode::from(1);
                }
            };
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(1);
                }
            };
            let doc = match cli::parse(&text) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(1);
                }
            };
            let opts = AnalyzeOptions { tol, depth, shift, certify, frame, truncate };
            let report = match cli::run_analyze(&doc, &opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code() as u8);
                }
            };
            let json = report.to_json();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &json) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{json}"),
            }
            if report.cross_check_failed() {
                eprintln!("error: structural verdict and certificate disagree");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Command::Selftest => {
            let checks = selftest::run();
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
    }
}
