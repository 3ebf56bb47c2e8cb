use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hidpos::algebra::rational;
use hidpos_cli::config::{env_seed, FileConfig, RunConfig};
use hidpos_cli::runner::{certify_only, explore_only};
use hidpos_cli::{emit_outputs, parse_script, run_script, ExitKind, ProblemScript, RunReport};

/// Build towers of function algebras, compare images with varieties and
/// certify positivity from problem scripts.
#[derive(Parser)]
#[command(name = "hidpos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every statement of a script.
    Run(RunArgs),
    /// Parse a script without running it.
    Check { script: PathBuf },
    /// Run the construction and the `certify` statements only.
    Certify(RunArgs),
    /// Run the construction and the `explore` statements only.
    Explore(RunArgs),
    /// Print a script in normalized form.
    Fmt {
        script: PathBuf,
        /// Rewrite the file in place.
        #[arg(long)]
        write: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    script: PathBuf,
    /// TOML file with default settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sampling seed (default from HIDPOS_SEED, else 1).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Neighbourhood radius for image-versus-variety comparison.
    #[arg(long)]
    delta: Option<f64>,
    /// Degree budget for certification.
    #[arg(long)]
    dmax: Option<u32>,
    /// Shift for certification, as a rational such as 1/10.
    #[arg(long)]
    eps: Option<String>,
    /// Continue past failed or undecided regularity checks.
    #[arg(long)]
    force: bool,
    /// Directory for the report, tower, point clouds and certificates.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print per-statement timings to stderr.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Flavor {
    All,
    Certify,
    Explore,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code.code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ExitKind::Error.code() as u8)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_file(path: &Path) -> anyhow::Result<Result<ProblemScript, hidpos_cli::ScriptError>> {
    Ok(parse_script(&read(path)?))
}

fn dispatch(command: Command) -> anyhow::Result<ExitKind> {
    match command {
        Command::Check { script } => Ok(match parse_file(&script)? {
            Ok(s) => {
                println!("{}: ok, {} statements", script.display(), s.len());
                ExitKind::Success
            }
            Err(e) => {
                eprintln!("{}: {e}", script.display());
                ExitKind::Syntax
            }
        }),
        Command::Fmt { script, write } => Ok(match parse_file(&script)? {
            Ok(s) if write => {
                std::fs::write(&script, s.to_string()).with_context(|| format!("writing {}", script.display()))?;
                ExitKind::Success
            }
            Ok(s) => {
                print!("{s}");
                ExitKind::Success
            }
            Err(e) => {
                eprintln!("{}: {e}", script.display());
                ExitKind::Syntax
            }
        }),
        Command::Run(a) => run(a, Flavor::All),
        Command::Certify(a) => run(a, Flavor::Certify),
        Command::Explore(a) => run(a, Flavor::Explore),
    }
}

fn run(a: RunArgs, flavor: Flavor) -> anyhow::Result<ExitKind> {
    let mut layers = Vec::new();
    if let Some(p) = &a.config {
        layers.push(FileConfig::load(p)?);
    }
    layers.push(FileConfig {
        seed: a.seed,
        samples: a.samples,
        delta: a.delta,
        dmax: a.dmax,
        eps: a.eps.clone(),
        force: a.force.then_some(true),
        ..FileConfig::default()
    });
    let config = RunConfig::resolve(env_seed()?, layers)?;
    let name = a.script.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let report = match parse_file(&a.script)? {
        Err(e) => {
            eprintln!("{}: {e}", a.script.display());
            RunReport::from_syntax_error(&name, &config, &e)
        }
        Ok(script) => {
            let script = match flavor {
                Flavor::All => script,
                Flavor::Certify => {
                    if !script.statements.iter().any(|s| s.kind.keyword() == "certify") {
                        anyhow::bail!("{} has no certify statement", a.script.display());
                    }
                    let eps = a.eps.as_deref().map(rational::parse).transpose()?;
                    certify_only(&script, eps, a.dmax)
                }
                Flavor::Explore => explore_only(&script, a.samples, a.delta),
            };
            run_script(&script, &config, &name)
        }
    };
    print!("{}", report.render());
    if a.timings {
        eprint!("{}", report.render_timings());
    }
    if let Some(dir) = &a.out {
        for p in emit_outputs(&report, dir).with_context(|| format!("writing outputs to {}", dir.display()))? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(report.exit)
}
