use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gkm::cartan::Rational;
use gkm::qmodules::ModuleKind;
use gkm_cli::config::{parse_matrix, parse_vector};
use gkm_cli::{parse_config, run, Command, ConfigError, SessionConfig};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "gkm", about = "Pairings, relations, modules and braidings for generalized Kac-Moody data")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Symmetrizers and realization of the matrix.
    Symmetrize(Options),
    /// Gram ranks, kernels and Serre elements per degree.
    Relations(Options),
    /// Quotient dimensions against the classical side.
    Dims(Options),
    /// Character of a quantum module.
    Character(Options),
    /// Quantum and classical characters side by side.
    CompareCharacters(Options),
    /// Braid relation for the braiding on a module.
    Ybe(Options),
    /// KZ monodromy against the quantum braiding.
    Dk(Options),
}

#[derive(Args, Clone)]
struct Options {
    /// Session file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix rows separated by semicolons, e.g. "2 -1; -1 2".
    #[arg(long)]
    matrix: Option<String>,
    /// Symmetrizers, e.g. "1 2".
    #[arg(long)]
    symmetrizers: Option<String>,
    #[arg(long = "max-degree")]
    max_degree: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// Highest weight as values on the simple coroots; repeat for several weights.
    #[arg(long = "hw")]
    highest_weights: Vec<String>,
    /// Real number or "re im".
    #[arg(long)]
    hbar: Option<String>,
    #[arg(long = "tol")]
    tolerance: Option<f64>,
    #[arg(long = "wordlen")]
    word_length: Option<usize>,
    #[arg(long)]
    strands: Option<usize>,
    #[arg(long, conflicts_with = "irr")]
    verma: bool,
    #[arg(long)]
    irr: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Computation(gkm::Error),
    Io(String),
}

impl Sub {
    fn split(self) -> (Command, Options) {
        match self {
            Sub::Symmetrize(o) => (Command::Symmetrize, o),
            Sub::Relations(o) => (Command::Relations, o),
            Sub::Dims(o) => (Command::Dims, o),
            Sub::Character(o) => (Command::Character, o),
            Sub::CompareCharacters(o) => (Command::CompareCharacters, o),
            Sub::Ybe(o) => (Command::Ybe, o),
            Sub::Dk(o) => (Command::Dk, o),
        }
    }
}

fn parse_hbar(text: &str) -> Result<Complex64, String> {
    let parts: Vec<f64> = text
        .split_whitespace()
        .map(|p| p.parse::<f64>().map_err(|e| format!("hbar: {}", e)))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err("hbar: expected one or two numbers".into()),
    }
}

fn build_config(opts: &Options) -> Result<SessionConfig, Failure> {
    let usage = |e: ConfigError| Failure::Usage(e.to_string());
    let base = match (&opts.config, &opts.matrix) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {}", path.display(), e)))?;
            let mut cfg = parse_config(&text).map_err(usage)?;
            if let Some(m) = &opts.matrix {
                let sym = opts.symmetrizers.as_deref().map(parse_vector).transpose().map_err(usage)?;
                let fresh = SessionConfig::new(parse_matrix(m).map_err(usage)?, sym).map_err(usage)?;
                cfg.matrix = fresh.matrix;
                cfg.symmetrizers = fresh.symmetrizers;
            }
            cfg
        }
        (None, Some(m)) => {
            let sym = opts.symmetrizers.as_deref().map(parse_vector).transpose().map_err(usage)?;
            SessionConfig::new(parse_matrix(m).map_err(usage)?, sym).map_err(usage)?
        }
        (None, None) => return Err(Failure::Usage("give --config or --matrix".into())),
    };
    let weights: Vec<Vec<Rational>> = opts
        .highest_weights
        .iter()
        .map(|w| parse_vector(w))
        .collect::<Result<_, _>>()
        .map_err(usage)?;
    let hbar = opts.hbar.as_deref().map(parse_hbar).transpose().map_err(Failure::Usage)?;
    let opts = opts.clone();
    base.with_overrides(move |c| {
        if let Some(v) = opts.max_degree {
            c.degree_cap = v;
        }
        if let Some(v) = opts.depth {
            c.depth = v;
        }
        if !weights.is_empty() {
            c.highest_weights = weights;
        }
        if let Some(v) = hbar {
            c.hbar = v;
        }
        if let Some(v) = opts.tolerance {
            c.tolerance = v;
        }
        if let Some(v) = opts.word_length {
            c.word_length = v;
        }
        if let Some(v) = opts.strands {
            c.strands = v;
        }
        if opts.verma {
            c.module = ModuleKind::Verma;
        }
        if opts.irr {
            c.module = ModuleKind::Irreducible;
        }
    })
    .map_err(usage)
}

fn execute(command: Command, opts: &Options) -> Result<bool, Failure> {
    let config = build_config(opts)?;
    let start = Instant::now();
    let report = run(command, &config).map_err(Failure::Computation)?;
    eprintln!("{}: {:.3} s", command.name(), start.elapsed().as_secs_f64());
    let text = report.render();
    match &opts.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {}", path.display(), e)))?,
        None => print!("{}", text),
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = cli.command.split();
    match execute(command, &opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error [config/{}]: {}", command.name(), msg);
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error [io/{}]: {}", command.name(), msg);
            ExitCode::from(2)
        }
        Err(Failure::Computation(e)) => {
            eprintln!("error [compute/{}]: {}", command.name(), e);
            ExitCode::from(if e.is_resource() { 3 } else { 1 })
        }
    }
}
