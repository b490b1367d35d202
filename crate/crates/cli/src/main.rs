use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use gravent_cli::commands::{self, Outcome};
use gravent_cli::inputs::load_config;
use gravent_cli::{exit_code, OutputFormat, RunInputs, SweepSpec, TauEntMode};

/// Entanglement of gravitationally coupled oscillators: traces, contours,
/// entanglement times, decoherence budgets and design checks.
#[derive(Parser)]
#[command(name = "gravent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Negativity, f_gra and f_dec along tau.
    Trace,
    /// Negativity over the (lambda1, lambda2) grid at tau-max.
    Contour,
    /// Time to reach the target negativity.
    TauEnt,
    /// Decoherence budget at the configured design point.
    Budget,
    /// Harmonic/inverted switchability of the sandwich geometry.
    DesignCheck,
    /// Run a sweep specification (TOML, or a saved record).
    Sweep {
        spec: PathBuf,
    },
}

#[derive(Args)]
struct Flags {
    /// Frequency scale in kHz (angular, 1 kHz = 1e3 rad/s).
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega_khz: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda1: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda2: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    chi: Option<f64>,
    /// Final dimensionless time.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau_max: Option<f64>,
    /// Number of tau intervals in a trace.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Points per lambda axis in a contour.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Target logarithmic negativity [default: 1e-2].
    #[arg(long, global = true)]
    target_en: Option<f64>,
    /// tau-ent: which solver(s) to run.
    #[arg(long, global = true, value_enum)]
    mode: Option<TauEntMode>,
    /// tau-ent: include the decoherence correction in the asymptotic time.
    #[arg(long, global = true)]
    decoherence: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat TOML config, or a CSV/JSON file written by an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

impl Flags {
    fn inputs(&self) -> Result<RunInputs> {
        let mut i = match &self.config {
            Some(path) => load_config(path)?,
            None => RunInputs::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { i.$field = v; })*};
        }
        apply!(omega_khz, lambda1, lambda2, eta, mu, chi, tau_max, steps, grid, target_en, mode, format, jobs);
        if self.decoherence {
            i.include_decoherence = true;
        }
        Ok(i)
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let inputs = cli.flags.inputs()?;
    match &cli.command {
        Command::Trace => commands::trace(&inputs),
        Command::Contour => commands::contour(&inputs),
        Command::TauEnt => commands::tau_ent(&inputs),
        Command::Budget => commands::budget(&inputs),
        Command::DesignCheck => commands::design_check(&inputs),
        Command::Sweep { spec } => {
            let mut spec = SweepSpec::load(spec)?;
            if let Some(jobs) = cli.flags.jobs {
                spec.parallelism = jobs;
            }
            if let Some(format) = cli.flags.format {
                spec.output_format = format;
            }
            commands::sweep(&inputs, spec)
        }
    }
}

fn write(outcome: &Outcome, format: OutputFormat, out: Option<&PathBuf>) -> Result<()> {
    let text = outcome.record.render(format);
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let format = match (&cli.command, &outcome.record.sweep) {
        (Command::Sweep { .. }, Some(spec)) => spec.output_format,
        _ => outcome.record.inputs.format,
    };
    if let Err(e) = write(&outcome, format, cli.flags.out.as_ref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(gravent_cli::EXIT_INVALID);
    }
    for w in &outcome.record.warnings {
        eprintln!("warning: {w}");
    }
    ExitCode::from(outcome.status)
}
