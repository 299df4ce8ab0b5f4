//! `maxcert`: certified MaxSAT preprocessing from the command line.
//!
//! Exit codes: 0 success or verified, 1 rejected, 2 usage or I/O error,
//! 3 resource limit.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use preprocessor::{preprocess_with_writer, ConfigError, PreError, TechniqueConfig};
use proof_checker::{check_proof_reader, Verdict};
use proof_log::ProofWriter;
use thiserror::Error;
use wcnf_frontend::{
    encode_to_pb, opt_cost_bruteforce_bounded, parse_wcnf, write_wcnf, WcnfError, WcnfInstance,
    DEFAULT_BRUTE_FORCE_BOUND,
};

#[derive(Parser)]
#[command(name = "maxcert", version, about = "Certified MaxSAT preprocessing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess a WCNF instance, writing the result and its proof.
    Preprocess(PreprocessArgs),
    /// Check that a proof certifies OUTPUT as equioptimal to INPUT.
    Check { input: PathBuf, proof: PathBuf, output: PathBuf },
    /// Print the optimum of an instance by exhaustive enumeration.
    Opt {
        input: PathBuf,
        /// Largest number of variables to enumerate.
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_BOUND)]
        bound: usize,
    },
}

#[derive(Args)]
struct PreprocessArgs {
    input: PathBuf,
    /// Output WCNF file.
    #[arg(short, long)]
    output: PathBuf,
    /// Proof file.
    #[arg(short, long)]
    proof: PathBuf,
    /// Comma-separated technique names; empty disables all of them.
    #[arg(long)]
    techniques: Option<String>,
    /// Round cap for the fixpoint loops.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop after this many technique applications and finalize.
    #[arg(long)]
    step_limit: Option<u64>,
    /// Wall-clock budget in seconds. Output then depends on machine speed.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: WcnfError },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Preprocess(#[from] PreError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Limit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Limit(_) => 3,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn read_instance(path: &Path) -> Result<WcnfInstance, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_wcnf(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

fn preprocess(args: &PreprocessArgs) -> Result<u8, CliError> {
    let (input, output, proof) = (&args.input, &args.output, &args.proof);
    let inst = read_instance(input)?;
    let mut cfg = match &args.techniques {
        Some(list) => TechniqueConfig::with_techniques(list)?,
        None => TechniqueConfig::default(),
    };
    if let Some(r) = args.rounds {
        cfg.rounds = r;
    }
    cfg.seed = args.seed;
    cfg.step_limit = args.step_limit;
    cfg.time_limit = match args.time_limit {
        Some(t) => Some(Duration::try_from_secs_f64(t).map_err(|e| CliError::Usage(format!("--time-limit: {e}")))?),
        None => None,
    };
    let file = File::create(proof).map_err(io_err(proof))?;
    let writer = ProofWriter::streaming(Box::new(BufWriter::new(file)));
    let outcome = preprocess_with_writer(&inst, &cfg, writer)?;
    let mut writer = outcome.writer;
    writer.flush().map_err(PreError::from)?;
    fs::write(output, write_wcnf(&outcome.output)).map_err(io_err(output))?;
    let stats = &outcome.stats;
    if stats.step_limit_hit {
        eprintln!("warning: step limit reached, finalized early");
    }
    if stats.time_limit_hit {
        eprintln!("warning: time limit reached, finalized early");
    }
    println!("c input: {} clauses, {} variables", inst.clauses.len(), inst.occurring_vars().len());
    println!("c output: {} clauses, {} variables", outcome.output.clauses.len(), outcome.output.occurring_vars().len());
    println!("c proof: {} lines", stats.proof_lines);
    for (op, n) in &stats.applied {
        println!("c {op}: {n}");
    }
    Ok(0)
}

fn check(input: &Path, proof: &Path, output: &Path) -> Result<u8, CliError> {
    let a = encode_to_pb(&read_instance(input)?);
    let b = encode_to_pb(&read_instance(output)?);
    let file = File::open(proof).map_err(io_err(proof))?;
    let verdict = check_proof_reader(&a.constraints, &a.objective, BufReader::new(file), &b.constraints, &b.objective);
    println!("{verdict}");
    Ok(if verdict == Verdict::Equioptimal { 0 } else { 1 })
}

fn opt(input: &Path, bound: usize) -> Result<u8, CliError> {
    let inst = read_instance(input)?;
    match opt_cost_bruteforce_bounded(&inst, bound) {
        Ok(Some(c)) => println!("o {c}"),
        Ok(None) => println!("s INFEASIBLE"),
        Err(e @ WcnfError::BoundExceeded { .. }) => return Err(CliError::Limit(e.to_string())),
        Err(source) => return Err(CliError::Parse { path: input.to_path_buf(), source }),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Preprocess(args) => preprocess(args),
        Command::Check { input, proof, output } => check(input, proof, output),
        Command::Opt { input, bound } => opt(input, *bound),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
