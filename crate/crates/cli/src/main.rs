use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use localelim::oracle::DEFAULT_CAP;
use localelim::ordering::Heuristic;
use localelim::Status;
use localelim_cli::commands::{self, DotTarget, Method, SequenceSource, SolveOptions, TdOptions};
use localelim_cli::error::{EXIT_INFEASIBLE, EXIT_INPUT, EXIT_INVALID_TD};
use localelim_cli::{load_problem, read_file, td_file, CliError, Result};

/// Exact solver for sparse discrete optimization problems by local
/// elimination.
///
/// Exit status: 0 optimal (or success), 1 invalid tree decomposition
/// (verify-td), 2 infeasible, 3 input error, 4 brute-force cap exceeded.
#[derive(Parser)]
#[command(name = "localelim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and print a JSON run report.
    Solve {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "nsdp")]
        method: Method,
        #[command(flatten)]
        seq: SeqArgs,
        #[command(flatten)]
        td: TdArgs,
        /// Largest search space the brute-force method will enumerate.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        /// Add the elapsed wall time to the report (makes output vary between runs).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Print an elimination sequence with its induced width and fill.
    Order {
        problem: PathBuf,
        #[command(flatten)]
        seq: SeqArgs,
        /// Group indistinguishable variables into blocks before ordering.
        #[arg(long)]
        blocks: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Render the interaction graph, filled graph, elimination tree or tree decomposition as DOT.
    ExportDot {
        problem: PathBuf,
        #[arg(value_enum)]
        what: DotTarget,
        #[command(flatten)]
        seq: SeqArgs,
        #[command(flatten)]
        td: TdArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Build a tree decomposition and print it as a JSON document.
    Treedec {
        problem: PathBuf,
        #[command(flatten)]
        seq: SeqArgs,
        #[command(flatten)]
        td: TdArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a tree decomposition document against a problem's interaction graph.
    VerifyTd { problem: PathBuf, td: PathBuf },
    /// Print structural statistics of a problem.
    Stats {
        problem: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct SeqArgs {
    /// Ordering heuristic used when no sequence file is given.
    #[arg(long, default_value = "min-fill", value_parser = parse_heuristic)]
    order: Heuristic,
    /// Elimination order, one variable per line.
    #[arg(long, conflicts_with = "partition_file")]
    order_file: Option<PathBuf>,
    /// Ordered partition into blocks, one comma-separated block per line.
    #[arg(long)]
    partition_file: Option<PathBuf>,
}

#[derive(Args)]
struct TdArgs {
    /// Keep the per-step bags instead of absorbing them into a clique tree.
    #[arg(long)]
    no_absorb: bool,
    /// Root bag index (default: the bag of the last eliminated block).
    #[arg(long)]
    root: Option<usize>,
}

#[derive(Args)]
struct OutArg {
    /// Write the output to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_heuristic(s: &str) -> std::result::Result<Heuristic, String> {
    s.parse().map_err(|e: localelim::Error| e.to_string())
}

impl SeqArgs {
    fn source(&self) -> Result<SequenceSource> {
        let load = |path: &Path| -> Result<(String, String)> { Ok((read_file(path)?, path.display().to_string())) };
        Ok(match (&self.order_file, &self.partition_file) {
            (Some(path), _) => {
                let (text, origin) = load(path)?;
                SequenceSource::OrderFile { text, origin }
            }
            (None, Some(path)) => {
                let (text, origin) = load(path)?;
                SequenceSource::PartitionFile { text, origin }
            }
            (None, None) => SequenceSource::Heuristic(self.order),
        })
    }
}

impl TdArgs {
    fn options(&self) -> TdOptions {
        TdOptions {
            absorb: !self.no_absorb,
            root: self.root,
        }
    }
}

fn emit(out: &OutArg, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            problem,
            method,
            seq,
            td,
            cap,
            timing,
            out,
        } => {
            let p = load_problem(&problem)?;
            let report = commands::solve(
                &p,
                &SolveOptions {
                    method,
                    source: seq.source()?,
                    cap,
                    td: td.options(),
                    timing,
                },
            )?;
            emit(&out, &report.to_json())?;
            Ok(match report.status() {
                Status::Optimal => 0,
                Status::Infeasible => EXIT_INFEASIBLE,
            })
        }
        Command::Order { problem, seq, blocks, out } => {
            let p = load_problem(&problem)?;
            emit(&out, &commands::order(&p, &seq.source()?, blocks)?)?;
            Ok(0)
        }
        Command::ExportDot {
            problem,
            what,
            seq,
            td,
            out,
        } => {
            let p = load_problem(&problem)?;
            emit(&out, &commands::export_dot(&p, what, &seq.source()?, &td.options())?)?;
            Ok(0)
        }
        Command::Treedec { problem, seq, td, out } => {
            let p = load_problem(&problem)?;
            emit(&out, &commands::treedec(&p, &seq.source()?, &td.options())?)?;
            Ok(0)
        }
        Command::VerifyTd { problem, td } => {
            let p = load_problem(&problem)?;
            let doc = td_file::parse_td(&read_file(&td)?, &td.display().to_string(), &p)?;
            let findings = commands::verify(&p, &doc);
            if findings.is_empty() {
                println!("valid: {} bags", doc.len());
                Ok(0)
            } else {
                println!("invalid:");
                for f in &findings {
                    println!("  {f}");
                }
                Ok(EXIT_INVALID_TD)
            }
        }
        Command::Stats { problem, out } => {
            let p = load_problem(&problem)?;
            emit(&out, &commands::stats(&p)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
