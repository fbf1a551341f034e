//! `bandset`: build, query and benchmark band-system retrieval structures,
//! and run the placement and queue simulations.
//!
//! Exit status: 0 success, 1 construction failure, 2 input error, 3 format error.

mod input;
mod report;
mod simulate;

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bandset::format::{deserialize, serialize};
use bandset::{synth, ChunkedParams, ChunkedRetrieval, ConstructError, FormatError};
use clap::{Args, Parser, Subcommand};

use report::BenchReport;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Output(String),
    Construct(ConstructError),
    Format(FormatError),
    /// Built structure returned wrong values for this many input keys.
    Verify(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Construct(_) | CliError::Verify(_) => 1,
            CliError::Input(_) | CliError::Output(_) => 2,
            CliError::Format(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
            CliError::Construct(e) => write!(f, "construction failed: {e}"),
            CliError::Format(e) => write!(f, "format error: {e}"),
            CliError::Verify(n) => write!(f, "verification failed for {n} keys"),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::InvalidParams(m) => CliError::Input(m),
            ConstructError::DuplicateKey { key } => CliError::Input(format!(
                "duplicate key {:?} with conflicting values",
                String::from_utf8_lossy(&key)
            )),
            other => CliError::Construct(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bandset", version, about = "Band-system retrieval structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a structure from `key<TAB>hex` lines and write it to a file.
    Build {
        /// Input file, or `-` for stdin.
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        /// Read length-prefixed binary records instead of TSV.
        #[arg(long)]
        binary_keys: bool,
        #[command(flatten)]
        params: BuildParams,
    },
    /// Print the stored value (hex) for every key read from stdin.
    Query {
        #[arg(long, short)]
        file: PathBuf,
        /// Keys on stdin are length-prefixed binary instead of one per line.
        #[arg(long)]
        binary_keys: bool,
    },
    /// Build from synthetic 80-byte keys and report sizes and timings.
    Bench {
        #[arg(long, default_value_t = 1_000_000)]
        m: usize,
        #[command(flatten)]
        params: BuildParams,
    },
    /// Print the report of a stored structure.
    Info {
        #[arg(long, short)]
        file: PathBuf,
    },
    /// Run a simulation and write CSV to stdout.
    Simulate {
        #[command(flatten)]
        args: simulate::SimulateArgs,
        #[arg(long, env = "BANDSET_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct BuildParams {
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 64)]
    block_len: usize,
    #[arg(long, default_value_t = 10_000)]
    chunk_size: usize,
    #[arg(long, default_value_t = 1)]
    value_bits: usize,
    #[arg(long, env = "BANDSET_SEED", default_value_t = 0)]
    seed: u64,
    /// Maximum retries per chunk.
    #[arg(long, default_value_t = 64)]
    retries: u32,
    /// Worker threads for construction (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    force_leading_one: bool,
}

impl BuildParams {
    fn to_params(&self) -> ChunkedParams {
        ChunkedParams {
            epsilon: self.eps,
            block_len: self.block_len,
            value_bits: self.value_bits,
            chunk_size: self.chunk_size,
            max_retries: self.retries,
            base_seed: self.seed,
            force_leading_one: self.force_leading_one,
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))
    }
}

fn open_input(path: &PathBuf) -> Result<Box<dyn BufRead>, CliError> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(BufReader::new(io::stdin().lock())));
    }
    let f = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(f)))
}

fn print_json(report: &BenchReport) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Output(e.to_string()))
}

/// Constructs with timing (hashing included, I/O excluded), then times a
/// full query pass that also checks every stored value.
fn build_and_measure(
    pairs: &[(Vec<u8>, u64)],
    params: &BuildParams,
) -> Result<(ChunkedRetrieval, BenchReport), CliError> {
    let pool = params.pool()?;
    let t = Instant::now();
    let ds = pool.install(|| ChunkedRetrieval::construct(pairs, params.to_params()))?;
    let construct = t.elapsed();
    let (query_ns, wrong) = report::query_pass(&ds, pairs);
    if wrong > 0 {
        return Err(CliError::Verify(wrong));
    }
    let mut rep = BenchReport::describe(&ds);
    if !pairs.is_empty() {
        rep.construct_ns_per_key = Some(construct.as_nanos() as f64 / pairs.len() as f64);
    }
    rep.query_ns_per_key = query_ns;
    Ok((ds, rep))
}

fn cmd_build(
    input: &PathBuf,
    output: &PathBuf,
    binary: bool,
    params: &BuildParams,
) -> Result<(), CliError> {
    let reader = open_input(input)?;
    let pairs = if binary {
        input::read_binary(reader, params.value_bits)?
    } else {
        input::read_tsv(reader, params.value_bits)?
    };
    let (ds, rep) = build_and_measure(&pairs, params)?;
    std::fs::write(output, serialize(&ds))
        .map_err(|e| CliError::Output(format!("{}: {e}", output.display())))?;
    print_json(&rep)
}

fn load(path: &PathBuf) -> Result<ChunkedRetrieval, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    deserialize(&bytes).map_err(CliError::Format)
}

fn cmd_query(file: &PathBuf, binary: bool) -> Result<(), CliError> {
    let ds = load(file)?;
    let bits = ds.params().value_bits;
    let stdin = io::stdin();
    let mut reader = BufReader::new(stdin.lock());
    let mut out = BufWriter::new(io::stdout().lock());
    let mut emit = |key: &[u8]| {
        writeln!(out, "{}", input::format_hex(ds.query(key), bits))
            .map_err(|e| CliError::Output(e.to_string()))
    };
    if binary {
        while let Some(key) = input::read_binary_key(&mut reader)? {
            emit(&key)?;
        }
    } else {
        let mut line = Vec::new();
        loop {
            line.clear();
            let got = reader
                .read_until(b'\n', &mut line)
                .map_err(|e| CliError::Input(e.to_string()))?;
            if got == 0 {
                break;
            }
            if line.last() == Some(&b'\n') {
                line.pop();
            }
            if line.last() == Some(&b'\r') {
                line.pop();
            }
            emit(&line)?;
        }
    }
    out.flush().map_err(|e| CliError::Output(e.to_string()))
}

fn cmd_bench(m: usize, params: &BuildParams) -> Result<(), CliError> {
    let pairs = synth::pairs(m, params.value_bits, params.seed);
    let (_, rep) = build_and_measure(&pairs, params)?;
    print_json(&rep)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Build {
            input,
            output,
            binary_keys,
            params,
        } => cmd_build(input, output, *binary_keys, params),
        Command::Query { file, binary_keys } => cmd_query(file, *binary_keys),
        Command::Bench { m, params } => cmd_bench(*m, params),
        Command::Info { file } => print_json(&BenchReport::describe(&load(file)?)),
        Command::Simulate { args, seed } => {
            let mut out = BufWriter::new(io::stdout().lock());
            simulate::run(args, *seed, &mut out)?;
            out.flush().map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bandset: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
