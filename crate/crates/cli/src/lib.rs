//! Command-line front end for boson sculpting: scheme generation,
//! verification, matching listings, circuit compilation and simulation,
//! and Graphviz export.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on
//! malformed input or arguments.

pub mod dot;
pub mod formats;
pub mod report;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sculpt_core::circuit::compile_bigraph;
use sculpt_core::sculpt::{enumerate_matchings, Scheme};

use formats::{bigraph_json, circuit_json, parse_bigraph, parse_circuit, to_canonical_json, CircuitBundle};
use report::{simulate_bundle, SimulateOptions};
use verify::{infer_scheme, verify, BasisChoice, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Core(#[from] sculpt_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Singlet,
    Dicke,
    Symvariant,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Singlet => Scheme::Singlet,
            SchemeArg::Dicke => Scheme::Dicke,
            SchemeArg::Symvariant => Scheme::SymmetricVariant,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sculpt", version, about = "Boson sculpting of qudit singlet and Dicke states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a built-in sculpting bigraph.
    Scheme {
        #[arg(long = "type", value_enum)]
        kind: SchemeArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sculpt a bigraph and check the result against its target state.
    Verify {
        graph: PathBuf,
        /// Target scheme; inferred from the graph when omitted.
        #[arg(long, value_enum)]
        target: Option<SchemeArg>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value = "fourier")]
        basis: BasisChoice,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the (d-1)-to-one matchings of a bigraph.
    Matchings {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a bigraph into a heralded linear-optical circuit.
    Compile {
        graph: PathBuf,
        #[arg(long)]
        reflectivity: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a compiled circuit, optionally sweeping the reflectivity.
    Simulate {
        circuit: PathBuf,
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        /// Also enumerate every herald pattern.
        #[arg(long)]
        outcomes: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a bigraph as Graphviz DOT.
    ExportDot {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command produced: text to emit and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
    /// Names of failing checks, reported on stderr.
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            code: EXIT_OK,
            failures: Vec::new(),
        }
    }

    fn verdict(text: String, failures: Vec<String>) -> Self {
        Outcome {
            text,
            code: if failures.is_empty() { EXIT_OK } else { EXIT_FAIL },
            failures,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    to_canonical_json(value)
}

#[derive(Serialize)]
struct MatchingEntry {
    /// `[mode, edge]` per dot.
    picks: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct MatchingListing {
    count: usize,
    matchings: Vec<MatchingEntry>,
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::Malformed(format!("tolerance {tol} must be positive")))
    }
}

/// Runs one command without touching the process state; `run` writes the result.
pub fn execute(command: &Command) -> Result<(Outcome, Option<PathBuf>), CliError> {
    Ok(match command {
        Command::Scheme { kind, n, out } => {
            let graph = Scheme::from(*kind).build(*n)?;
            (Outcome::ok(bigraph_json(&graph)?), out.clone())
        }
        Command::Verify {
            graph,
            target,
            tol,
            basis,
            seed,
            out,
        } => {
            check_tol(*tol)?;
            let graph = parse_bigraph(&read(graph)?)?;
            let scheme = match target {
                Some(t) => Scheme::from(*t),
                None => infer_scheme(&graph).ok_or_else(|| {
                    CliError::Malformed("cannot infer a target scheme; pass --target".into())
                })?,
            };
            let opts = VerifyOptions {
                scheme,
                tol: *tol,
                basis: *basis,
                seed: *seed,
            };
            let report = verify(&graph, &opts)?;
            let failures = report.failing().into_iter().map(String::from).collect();
            (Outcome::verdict(json(&report)?, failures), out.clone())
        }
        Command::Matchings { graph, out } => {
            let graph = parse_bigraph(&read(graph)?)?;
            let matchings = enumerate_matchings(&graph);
            let listing = MatchingListing {
                count: matchings.len(),
                matchings: matchings
                    .iter()
                    .map(|m| MatchingEntry {
                        picks: m.picks.iter().map(|&(mode, edge)| [mode, edge]).collect(),
                    })
                    .collect(),
            };
            (Outcome::ok(json(&listing)?), out.clone())
        }
        Command::Compile {
            graph,
            reflectivity,
            out,
        } => {
            let graph = parse_bigraph(&read(graph)?)?;
            let circuit = compile_bigraph(&graph, *reflectivity)?;
            let bundle = CircuitBundle {
                circuit,
                reflectivity: Some(*reflectivity),
                graph: Some(graph),
            };
            (Outcome::ok(circuit_json(&bundle)?), out.clone())
        }
        Command::Simulate {
            circuit,
            sweep,
            outcomes,
            out,
        } => {
            if let Some(rs) = sweep {
                if rs.is_empty() || rs.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                    return Err(CliError::Malformed(format!(
                        "sweep reflectivities must lie in (0, 1): {rs:?}"
                    )));
                }
            }
            let bundle = parse_circuit(&read(circuit)?)?;
            let report = simulate_bundle(
                &bundle,
                &SimulateOptions {
                    sweep: sweep.clone(),
                    outcomes: *outcomes,
                },
            )?;
            let failures = report
                .checks
                .iter()
                .filter(|c| !c.evaluate())
                .map(|c| c.name.clone())
                .collect();
            (Outcome::verdict(json(&report)?, failures), out.clone())
        }
        Command::ExportDot { graph, out } => {
            let graph = parse_bigraph(&read(graph)?)?;
            (Outcome::ok(dot::to_dot(&graph)), out.clone())
        }
    })
}

/// Sets up the thread pool from `SCULPT_THREADS`.
pub fn configure_threads() -> Result<(), CliError> {
    match std::env::var("SCULPT_THREADS") {
        Ok(value) => {
            let threads: usize = value
                .trim()
                .parse()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| CliError::Malformed(format!("SCULPT_THREADS={value}")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Internal(e.to_string()))
        }
        Err(_) => Ok(()),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("sculpt: {e}");
        return EXIT_USAGE;
    }
    let result = execute(&cli.command).and_then(|(outcome, out)| {
        emit(&outcome.text, out.as_deref())?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for name in &outcome.failures {
                eprintln!("sculpt: check failed: {name}");
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("sculpt: {e}");
            EXIT_USAGE
        }
    }
}
