use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use collective_dfs::config::{preset, Format, RunConfig, PRESETS};
use collective_dfs::output::Cell;
use collective_dfs::runner::{self, Report};
use collective_dfs::{Error, Result};

/// Closed-form collective decay of qubits in a shared Lorentzian bath.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in scenario, e.g. fig1b_solid.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Worker threads for parallel sections.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Time series of amplitudes, negativities and the decay rate.
    Simulate,
    /// Asymptotic tripartite bound over the (r1, r2) grid.
    Sweep,
    /// Biseparability time of the configured state.
    Tstar,
    /// CP-divisibility classification.
    Markov,
    /// Compare the closed form with an independent integrator.
    OracleCheck,
    /// Decoherence-free subspace audit for n qubits.
    Nqubit,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    match (&cli.config, &cli.preset) {
        (Some(path), None) => RunConfig::from_path(path),
        (None, Some(name)) => preset(name).ok_or_else(|| {
            Error::Config(format!("unknown preset `{name}`; available: {}", PRESETS.join(", ")))
        }),
        _ => Err(Error::Config("pass exactly one of --config or --preset".into())),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let threads = cli.threads.map(usize::from);
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let report: Report = match cli.command {
        Command::Simulate => runner::simulate(&cfg)?,
        Command::Sweep => runner::sweep(&cfg, threads)?,
        Command::Tstar => runner::tstar(&cfg)?,
        Command::Markov => runner::markov(&cfg)?,
        Command::OracleCheck => runner::oracle_check(&cfg)?,
        Command::Nqubit => runner::nqubit(&cfg)?,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for (k, v) in &report.summary {
        let shown = match v {
            Cell::Num(x) => collective_dfs::output::fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => "none".into(),
        };
        eprintln!("{k}={shown}");
    }

    let format = match cli.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => cfg.output.format,
    };
    let text = report.render(format, &cfg);
    match cli.out.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from)) {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
