use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sparseprep::qasm::QasmOptions;
use sparseprep::TreeStrategy;
use sparseprep_cli::{compile, parse_state_file, self_test, Verified};

const EXIT_INPUT: u8 = 1;
const EXIT_VERIFY: u8 = 2;

/// Compile a sparse state into an OpenQASM 2.0 preparation circuit.
#[derive(Parser, Debug)]
#[command(name = "sparseprep", version)]
struct Args {
    /// State file (`BITS RE [IM]` or `BITS polar RHO PHI` per line).
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Write QASM here instead of stdout.
    #[arg(long)]
    qasm: Option<PathBuf>,
    /// Write the key=value report here instead of stderr.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    report_json: Option<PathBuf>,
    /// Simulate the circuit and fail on mismatch (up to 20 qubits).
    #[arg(long)]
    verify: bool,
    /// W-tree construction: complete, sorted, greedy or exhaustive.
    #[arg(long, default_value = "complete")]
    tree: TreeStrategy,
    /// Measure ancillas at the end of the circuit.
    #[arg(long)]
    with_measurements: bool,
    /// Expand cry into ry/cx so only qelib1 gates appear.
    #[arg(long)]
    qelib_only: bool,
    /// Without --input: run the random self-test from this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of self-test states.
    #[arg(long, default_value_t = 32)]
    self_test_count: usize,
}

fn write_or(path: &Option<PathBuf>, text: &str, fallback: impl FnOnce(&str)) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            fallback(text);
            Ok(())
        }
    }
}

fn run_self_test(args: &Args, seed: u64) -> ExitCode {
    let lines = match self_test(seed, args.self_test_count, args.tree) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let failed = lines
        .iter()
        .filter(|l| l.report.verified != Verified::Passed)
        .count();
    for l in &lines {
        println!("{l}");
    }
    println!("self-test seed={seed} trials={} failed={failed}", lines.len());
    if failed > 0 {
        ExitCode::from(EXIT_VERIFY)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(input) = &args.input else {
        if let Some(seed) = args.seed {
            return run_self_test(&args, seed);
        }
        eprintln!("error: need --input PATH or --seed N");
        return ExitCode::from(EXIT_INPUT);
    };

    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", input.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let state = match parse_state_file(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", input.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let opts = QasmOptions {
        qelib_only: args.qelib_only,
        measure_ancillas: args.with_measurements,
    };
    let compiled = match compile(&state, args.tree, args.verify, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };

    let report = compiled.report.to_text();
    let written = write_or(&args.qasm, &compiled.qasm, |t| print!("{t}"))
        .and_then(|_| write_or(&args.report, &report, |t| eprint!("{t}")))
        .and_then(|_| match &args.report_json {
            Some(_) => write_or(&args.report_json, &compiled.report.to_json(), |_| {}),
            None => Ok(()),
        });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }

    match compiled.report.verified {
        Verified::Failed => {
            eprintln!(
                "error: verification failed (max amplitude error {:.3e})",
                compiled.report.max_amplitude_error.unwrap_or(f64::NAN)
            );
            ExitCode::from(EXIT_VERIFY)
        }
        Verified::Skipped => {
            eprintln!("warning: {} qubits is too many to verify", compiled.report.m);
            ExitCode::SUCCESS
        }
        _ => ExitCode::SUCCESS,
    }
}
