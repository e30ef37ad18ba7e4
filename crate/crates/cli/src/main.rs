use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use highspin::experiments::{
    algebra_check, csv_string, export_csv, export_qasm, render_plot, run_sweep, Experiment, SweepConfig,
    SweepRow,
};
use highspin::qasm::{emit_qasm, parse_angle};

/// Spin-s on qubits: reference sweeps, plots, algebra checks and QASM export.
#[derive(Parser)]
#[command(name = "highspin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-1 in a magnetic field along x, swept over ωt.
    Magfield(SweepArgs),
    /// Spin-1 coupled to a spin-1/2, swept over Jt.
    Ising(SweepArgs),
    /// Check the spin commutators, Casimir and Dicke identities.
    AlgebraCheck {
        /// Largest spin to check, given as 2s (at most 12).
        #[arg(long, default_value_t = 6)]
        max_twice_s: u32,
    },
    /// Write one experiment circuit as OpenQASM 2.0.
    ExportQasm {
        /// magfield or ising
        experiment: String,
        /// ωt or Jt; accepts expressions such as pi/2.
        #[arg(long, default_value = "pi/2")]
        param: String,
        #[arg(long)]
        initial: Option<String>,
        /// Leave out the terminal measurements.
        #[arg(long)]
        no_measure: bool,
        /// Output file; standard output when absent.
        #[arg(long)]
        qasm: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Number of grid points, at least 2.
    #[arg(long)]
    steps: Option<String>,
    /// Upper end of the grid; accepts expressions such as 2*pi.
    #[arg(long)]
    max_param: Option<String>,
    #[arg(long)]
    shots: Option<String>,
    /// Exact probabilities instead of sampled shots.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    seed: Option<String>,
    /// m=+1, m=0, m=-1 or x-polarized.
    #[arg(long)]
    initial: Option<String>,
    /// Device file with gate and readout error rates.
    #[arg(long)]
    noise: Option<String>,
    /// CSV output; standard output when absent.
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    svg: Option<String>,
    /// Writes the circuit of the last grid point.
    #[arg(long)]
    qasm: Option<String>,
    /// key=value file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Violation(String),
}

impl From<highspin::Error> for Failure {
    fn from(e: highspin::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn build_config(experiment: Experiment, args: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = SweepConfig::new(experiment);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
        if cfg.experiment != experiment {
            return Err(Failure::Invalid(format!(
                "{}: config is for {}, not {}",
                path.display(),
                cfg.experiment.name(),
                experiment.name()
            )));
        }
    }
    let flags = [
        ("steps", &args.steps),
        ("max-param", &args.max_param),
        ("shots", &args.shots),
        ("seed", &args.seed),
        ("initial", &args.initial),
        ("noise", &args.noise),
        ("csv", &args.csv),
        ("svg", &args.svg),
        ("qasm", &args.qasm),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if args.exact {
        cfg.set("exact", "true")?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summarize(rows: &[SweepRow]) -> f64 {
    rows.iter()
        .flat_map(|r| r.estimates.iter().zip(&r.analytic).map(|(e, a)| (e.value - a).abs()))
        .fold(0.0, f64::max)
}

fn sweep(experiment: Experiment, args: &SweepArgs) -> Result<(), Failure> {
    let cfg = build_config(experiment, args)?;
    let rows = run_sweep(&cfg)?;
    match &cfg.csv {
        Some(path) => export_csv(experiment, &rows, path)?,
        None => print!("{}", csv_string(experiment, &rows)),
    }
    if let Some(path) = &cfg.svg {
        render_plot(experiment, &rows, path)?;
    }
    if let Some(path) = &cfg.qasm {
        export_qasm(&cfg, path)?;
    }
    let leakage = rows.iter().map(|r| r.leakage).fold(0.0, f64::max);
    eprintln!(
        "{}: {} points, max |estimate - analytic| = {:.3e}, max leakage = {:.3e}",
        experiment.name(),
        rows.len(),
        summarize(&rows),
        leakage
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Magfield(args) => sweep(Experiment::MagField, &args),
        Command::Ising(args) => sweep(Experiment::Ising, &args),
        Command::AlgebraCheck { max_twice_s } => {
            let report = algebra_check(max_twice_s)?;
            print!("{}", report.to_text());
            if report.passes() {
                Ok(())
            } else {
                Err(Failure::Violation("spin algebra residuals exceed tolerance".into()))
            }
        }
        Command::ExportQasm {
            experiment,
            param,
            initial,
            no_measure,
            qasm,
        } => {
            let mut cfg = SweepConfig::new(experiment.parse()?);
            if let Some(i) = initial {
                cfg.set("initial", &i)?;
            }
            cfg.validate()?;
            let param = parse_angle(&param).map_err(|e| Failure::Invalid(format!("--param: {e}")))?;
            let text = emit_qasm(&cfg.circuit_at(param)?, !no_measure);
            match qasm {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
