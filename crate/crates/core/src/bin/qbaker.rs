use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qbaker::experiments::{
    dump_operator, run_timescale_sweep, run_trajectory, run_verify, write_operator_csv, write_operator_json,
    write_sweep_csv, write_sweep_json, write_trajectory_csv, write_trajectory_json, write_verify_csv,
    write_verify_json, DumpTarget, ExperimentConfig, ExperimentError, ExperimentResult, OutputFormat, StringSpec,
    Suite, Tail, VerifyHooks,
};
use qbaker::BitString;

/// Quantum baker's map experiments: quantum vs classical trajectories,
/// divergence timescales, self-checks and operator dumps.
#[derive(Parser)]
#[command(name = "qbaker", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum and classical positions for m = 0..=m-max.
    Trajectory {
        #[arg(long)]
        n_qubits: usize,
        #[command(flatten)]
        string: StringArgs,
        /// Defaults to n-qubits.
        #[arg(long)]
        m_max: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Divergence against its bound for every (N, m).
    Timescale {
        /// Qubit counts, e.g. `4-10` or `3,5,8`. Empty for none.
        #[arg(long, value_parser = parse_range, default_value = "")]
        n_qubits: QubitRange,
        #[command(flatten)]
        string: StringArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run self-check suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Check against half the true bound.
        #[arg(long, hide = true)]
        corrupt_bound: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write a dense operator matrix.
    MatrixDump {
        #[arg(long)]
        n_qubits: usize,
        #[arg(long, value_enum)]
        operator: DumpTarget,
        /// Power of the propagator.
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct StringArgs {
    /// Initial string as 0/1 characters.
    #[arg(long, conflicts_with = "random_bits", required_unless_present = "random_bits")]
    bits: Option<String>,
    /// Length of a random initial string.
    #[arg(long)]
    random_bits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Tail::Zero)]
    tail: Tail,
}

impl StringArgs {
    fn spec(&self) -> ExperimentResult<StringSpec> {
        let spec = match (&self.bits, self.random_bits) {
            (Some(bits), _) => StringSpec::explicit(
                bits.parse::<BitString>().map_err(|e| ExperimentError::config("bits", e.to_string()))?,
            ),
            (None, Some(len)) => StringSpec::random(len, self.seed),
            (None, None) => return Err(ExperimentError::config("bits", "give --bits or --random-bits")),
        };
        Ok(spec.with_tail(self.tail))
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Defaults to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn open(&self) -> ExperimentResult<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Clone, Debug)]
struct QubitRange(Vec<usize>);

fn parse_range(s: &str) -> Result<QubitRange, String> {
    let mut ns = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
        match part.split_once('-') {
            Some((lo, hi)) => ns.extend(num(lo)?..=num(hi)?),
            None => ns.push(num(part)?),
        }
    }
    Ok(QubitRange(ns))
}

fn run(cli: Cli) -> ExperimentResult<()> {
    match cli.command {
        Command::Trajectory { n_qubits, string, m_max, out } => {
            let cfg = ExperimentConfig { n_qubits, string: string.spec()?, m_max, format: out.format };
            let records = run_trajectory(&cfg)?;
            let mut w = out.open()?;
            match out.format {
                OutputFormat::Csv => write_trajectory_csv(&mut w, &records)?,
                OutputFormat::Json => write_trajectory_json(&mut w, &cfg, &records)?,
            }
            w.flush()?;
        }
        Command::Timescale { n_qubits, string, out } => {
            let spec = string.spec()?;
            let rows = run_timescale_sweep(&n_qubits.0, &spec)?;
            let mut w = out.open()?;
            match out.format {
                OutputFormat::Csv => write_sweep_csv(&mut w, &rows)?,
                OutputFormat::Json => write_sweep_json(&mut w, &n_qubits.0, &spec, &rows)?,
            }
            w.flush()?;
        }
        Command::Verify { suite, n_max, corrupt_bound, out } => {
            let report = run_verify(suite, n_max, VerifyHooks { corrupt_bound })?;
            let mut w = out.open()?;
            match out.format {
                OutputFormat::Csv => write_verify_csv(&mut w, &report)?,
                OutputFormat::Json => write_verify_json(&mut w, &report)?,
            }
            w.flush()?;
            for s in &report.suites {
                if let Some(failure) = &s.failure {
                    eprintln!("qbaker: {} failed: {failure}", s.suite);
                }
            }
            if !report.passed() {
                return Err(ExperimentError::Verification(String::from("one or more suites failed")));
            }
        }
        Command::MatrixDump { n_qubits, operator, m, out } => {
            let op = dump_operator(operator, n_qubits, m)?;
            let mut w = out.open()?;
            match out.format {
                OutputFormat::Csv => write_operator_csv(&mut w, &op)?,
                OutputFormat::Json => write_operator_json(&mut w, operator, n_qubits, m, &op)?,
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbaker: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
