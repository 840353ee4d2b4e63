//! `ghost-lab family | certify | ghost`, configured by a TOML file, inline
//! flags, or both (flags override the file).
//!
//! Exit status: 0 success, 1 failed verification, 2 usage or config error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ghost_lab::commands::{cmd_certify, cmd_family, cmd_ghost, CommandError, CommandOutput};
use ghost_lab::config::RunConfig;
use ghost_lab::report::render;

#[derive(Parser)]
#[command(
    name = "ghost-lab",
    version,
    about = "Finite-scale ghost projections over expander families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the family and print orders, degrees and the symmetry check.
    Family(RunArgs),
    /// Laplacian gaps of each level's Cayley graph.
    Certify(RunArgs),
    /// Build T and e, check ranks against the character oracle and verify the claims.
    Ghost(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Family kind: sl2, alt or product.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, value_delimiter = ',')]
    primes: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<usize>>,
    /// steinberg, deleted-natural or trivial.
    #[arg(long)]
    policy: Option<String>,
    /// Level positions to keep.
    #[arg(long, value_delimiter = ',')]
    window: Option<Vec<usize>>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Report the J-truncation at this index.
    #[arg(long)]
    truncate: Option<usize>,
    /// Spectral cluster threshold around 1.
    #[arg(long)]
    cluster: Option<f64>,
    /// Frobenius tolerance between the two projections.
    #[arg(long)]
    projection: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the spectra CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, CommandError> {
        let mut cfg = match (&self.config, &self.kind) {
            (Some(path), _) => RunConfig::from_path(path)?,
            (None, Some(kind)) => RunConfig::new(kind),
            (None, None) => return Err(CommandError::Usage("either --config or --kind is required".into())),
        };
        if let Some(kind) = self.kind {
            cfg.kind = kind;
        }
        if let Some(v) = self.primes {
            cfg.primes = v;
        }
        if let Some(v) = self.degrees {
            cfg.degrees = v;
        }
        if self.policy.is_some() {
            cfg.policy = self.policy;
        }
        if self.window.is_some() {
            cfg.window = self.window;
        }
        if let Some(p) = self.parallelism {
            cfg.parallelism = p;
        }
        if self.truncate.is_some() {
            cfg.truncate = self.truncate;
        }
        if let Some(c) = self.cluster {
            cfg.tolerances.cluster = c;
        }
        if let Some(p) = self.projection {
            cfg.tolerances.projection = p;
        }
        if self.out.is_some() {
            cfg.output.json = self.out;
        }
        if self.csv.is_some() {
            cfg.output.csv = self.csv;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write(path: &Path, text: &str) -> Result<(), CommandError> {
    std::fs::write(path, text).map_err(|e| CommandError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(cfg: &RunConfig, out: &CommandOutput) -> Result<(), CommandError> {
    print!("{}", out.summary);
    if let Some(path) = &cfg.output.json {
        write(path, &render(&out.report))?;
    }
    if let (Some(path), Some(csv)) = (&cfg.output.csv, &out.csv) {
        write(path, csv)?;
    }
    Ok(())
}

type Handler = fn(&RunConfig) -> Result<CommandOutput, CommandError>;

fn run(cli: Cli) -> Result<(), CommandError> {
    let (args, cmd): (RunArgs, Handler) = match cli.command {
        Command::Family(a) => (a, cmd_family),
        Command::Certify(a) => (a, cmd_certify),
        Command::Ghost(a) => (a, cmd_ghost),
    };
    let cfg = args.into_config()?;
    let out = cmd(&cfg)?;
    emit(&cfg, &out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CommandError::Verification {
                block: Some((n, m)), ..
            } = &e
            {
                eprintln!("  at block ({n}, {m})");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
