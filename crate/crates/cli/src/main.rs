use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use autinv::cli::{run_command, Command, Inputs, Kind, SessionConfig};
use autinv::Error;
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Invert,
    Apply,
    Compose,
    Verify,
    Taylor,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Invert => Command::Invert,
            Cmd::Apply => Command::Apply,
            Cmd::Compose => Command::Compose,
            Cmd::Verify => Command::Verify,
            Cmd::Taylor => Command::Taylor,
        }
    }
}

/// Exact inversion of automorphisms over F_p.
///
/// Exit codes: 0 ok, 1 parse error, 2 validation error, 3 verification
/// failure, 4 resource bound exceeded.
#[derive(Debug, Parser)]
#[command(name = "autinv", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,

    /// Algebra kind: poly, series, diffop, diffop_poly, weyl, weyl_poly, tk, csa.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Truncation vector for tk, e.g. 2,1.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// Series truncation degree D.
    #[arg(long = "degree-bound")]
    degree_bound: Option<u64>,
    /// Number of prime-power divided-power levels for diffop kinds.
    #[arg(long)]
    kmax: Option<usize>,
    /// Automorphism file; give twice for compose and verify.
    #[arg(long)]
    aut: Vec<PathBuf>,
    #[arg(long)]
    element: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random samples in verify.
    #[arg(long)]
    seed: Option<u64>,
}

impl Cli {
    fn config(&self) -> Result<Option<SessionConfig>, Error> {
        let Some(kind) = &self.kind else {
            if self.p.is_some() || self.n.is_some() || self.k.is_some() || self.degree_bound.is_some() || self.kmax.is_some() {
                return Err(Error::InvalidConfig("session parameters need --kind".into()));
            }
            return Ok(None);
        };
        let kind: Kind = kind.parse()?;
        let p = self.p.ok_or_else(|| Error::InvalidConfig("--p is required with --kind".into()))?;
        let n = self.n.ok_or_else(|| Error::InvalidConfig("--n is required with --kind".into()))?;
        let mut cfg = SessionConfig::new(kind, p, n, self.m)?;
        cfg.k = self.k.clone();
        cfg.degree_bound = self.degree_bound;
        cfg.kmax = self.kmax;
        cfg.validate()?;
        Ok(Some(cfg))
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let config = cli.config()?;
    let automorphisms = cli
        .aut
        .iter()
        .map(|p| fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {}", p.display(), e))))
        .collect::<Result<Vec<_>, _>>()?;
    let inputs = Inputs { automorphisms, element: cli.element.clone(), seed: cli.seed };
    let report = run_command(cli.command.into(), config.as_ref(), &inputs)?;
    match &cli.out {
        Some(path) => fs::write(path, &report.output).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?,
        None => print!("{}", report.output),
    }
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
