use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::{ConfigError, RunConfig};

const CONFIG_HELP: &str = "\
Configuration file (--config): one `key = value` per line, `#` starts a comment.
Keys are the long flag names of the chosen command (for example `j = 0.5`,
`steps = 1,2,4`, `backend = cphase`, `output = run.csv`). Flags given on the
command line override file entries.

Exit status: 0 on success, 2 for invalid input or configuration, 3 when a
numerical guard (dimension limit, degenerate denominator, division guard) fails.";

#[derive(Parser)]
#[command(name = "qlink", version, about = "SU(2) quantum link model experiments", after_help = CONFIG_HELP)]
struct Cli {
    /// Flat key = value parameter file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<String>,
    /// Print the merged parameters in config-file syntax and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gauge-sector table: CSV `eigenvalue,degeneracy`.
    Sectors(SectorsArgs),
    /// Figure data as CSV (fig3, fig4, figS2).
    Figures(FiguresArgs),
    /// Compile a step or a single monomial: JSON resource report.
    Compile(CompileArgs),
    /// Product-formula step-count bound: JSON.
    Bounds(BoundsArgs),
    /// Effective-Hamiltonian validation sweep: CSV `ratio,deviation,density_norm`.
    Matter(MatterArgs),
}

#[derive(Args)]
struct SectorsArgs {
    /// Layout file (default: the single triangle).
    #[arg(long)]
    layout: Option<String>,
}

#[derive(Args)]
struct FiguresArgs {
    /// fig3, fig4 or figS2.
    which: String,
    #[arg(long)]
    layout: Option<String>,
    /// Coupling J.
    #[arg(long)]
    j: Option<String>,
    /// Sector eigenvalue of the initial state.
    #[arg(long)]
    sector: Option<String>,
    /// Trotter step counts, comma separated.
    #[arg(long)]
    steps: Option<String>,
    /// Phase values phi = J t, comma separated.
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Args)]
struct CompileArgs {
    /// collective or cphase.
    #[arg(long)]
    backend: Option<String>,
    /// Compile one full step of the layout Hamiltonian.
    #[arg(long)]
    step: bool,
    /// Compile one monomial given in Pauli notation, e.g. "(0.5) X0 Y2 Z4".
    #[arg(long)]
    monomial: Option<String>,
    #[arg(long)]
    layout: Option<String>,
    #[arg(long)]
    j: Option<String>,
    /// Phase per step.
    #[arg(long)]
    phi: Option<String>,
    /// Number of repeated steps in the report.
    #[arg(long)]
    steps: Option<String>,
    /// Ancilla qubit for the cphase backend.
    #[arg(long)]
    ancilla: Option<String>,
    /// Also write the gate listing to this file.
    #[arg(long)]
    circuit: Option<String>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    plaquettes: Option<String>,
    /// |J| t.
    #[arg(long = "jt", alias = "Jt")]
    jt: Option<String>,
    /// Target error.
    #[arg(long)]
    eps: Option<String>,
    /// Fractal order.
    #[arg(long)]
    k: Option<String>,
    /// Step counts at which to measure the digitization error on the triangle.
    #[arg(long)]
    check: Option<String>,
}

#[derive(Args)]
struct MatterArgs {
    /// J0 / Omega values, comma separated.
    #[arg(long)]
    ratios: Option<String>,
    #[arg(long = "big-omega")]
    big_omega: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    n0: Option<String>,
    #[arg(long)]
    sites: Option<String>,
    /// Total excitation number of the compared sector.
    #[arg(long)]
    sector: Option<String>,
}

fn flag(b: bool) -> Option<String> {
    b.then(|| "true".to_string())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sectors(_) => "sectors",
            Command::Figures(_) => "figures",
            Command::Compile(_) => "compile",
            Command::Bounds(_) => "bounds",
            Command::Matter(_) => "matter",
        }
    }

    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        match self {
            Command::Sectors(a) => vec![("layout", a.layout.clone())],
            Command::Figures(a) => vec![
                ("layout", a.layout.clone()),
                ("j", a.j.clone()),
                ("sector", a.sector.clone()),
                ("steps", a.steps.clone()),
                ("phi", a.phi.clone()),
            ],
            Command::Compile(a) => vec![
                ("backend", a.backend.clone()),
                ("step", flag(a.step)),
                ("monomial", a.monomial.clone()),
                ("layout", a.layout.clone()),
                ("j", a.j.clone()),
                ("phi", a.phi.clone()),
                ("steps", a.steps.clone()),
                ("ancilla", a.ancilla.clone()),
                ("circuit", a.circuit.clone()),
            ],
            Command::Bounds(a) => vec![
                ("plaquettes", a.plaquettes.clone()),
                ("jt", a.jt.clone()),
                ("eps", a.eps.clone()),
                ("k", a.k.clone()),
                ("check", a.check.clone()),
            ],
            Command::Matter(a) => vec![
                ("ratios", a.ratios.clone()),
                ("big-omega", a.big_omega.clone()),
                ("omega", a.omega.clone()),
                ("n0", a.n0.clone()),
                ("sites", a.sites.clone()),
                ("sector", a.sector.clone()),
            ],
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qlink::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut flags = cli.command.flags();
    let mut allowed: Vec<&str> = flags.iter().map(|(k, _)| *k).collect();
    allowed.push("output");
    flags.push(("output", cli.output.clone()));
    let rc = RunConfig::resolve(cli.command.name(), cli.config.as_deref(), &allowed, flags)?;
    if cli.dump_config {
        print!("{}", rc.to_file_text());
        return Ok(());
    }
    let text = match &cli.command {
        Command::Sectors(_) => commands::sectors(&rc)?,
        Command::Figures(a) => commands::figures(&a.which, &rc)?,
        Command::Compile(_) => commands::compile(&rc)?,
        Command::Bounds(_) => commands::bounds(&rc)?,
        Command::Matter(_) => commands::matter(&rc)?,
    };
    match rc.get::<String>("output")? {
        Some(path) => std::fs::write(&path, text).map_err(|e| ConfigError(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
