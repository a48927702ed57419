//! `fermi-corr`: sweeps, state dumps, figure datasets and oracle checks.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use fermi_correlations::amplitudes::ModelParams;
use fermi_correlations::oracles::DirectionGrid;
use fermi_correlations::sweep::{self, SweepSpec, DEFAULT_COUPLINGS, DEFAULT_XI_STEPS};
use fermi_correlations::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_OUT_OF_REGIME: u8 = 2;
const EXIT_ORACLE_BREACH: u8 = 3;

#[derive(Parser)]
#[command(name = "fermi-corr", version, about = "Correlation dynamics of two qubits coupled through a 1D field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate amplitudes and measures on a (xi, K) grid and write CSV.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: SweepArgs,
        /// Write only the amplitude columns.
        #[arg(long)]
        amplitudes_only: bool,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the assembled state at one time as JSON.
    State {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.05)]
        coupling: f64,
        #[arg(long)]
        xi: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare closed-form measures with brute-force oracles on random states.
    OracleCheck {
        /// States per kind (pure, mixed, X-shaped).
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        polar_steps: usize,
        #[arg(long, default_value_t = 48)]
        azimuth_steps: usize,
        #[arg(long, default_value_t = 3)]
        refine_rounds: usize,
        /// Write the full report as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write fig1.csv, fig4.csv and fig5.csv into a directory.
    Figures {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: SweepArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Qubit separation in units of v / Omega.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    r_bar: f64,
    /// UV cutoff in units of Omega.
    #[arg(long, default_value_t = 50.0)]
    cutoff: f64,
    /// Quadrature node budget per time axis.
    #[arg(long, default_value_t = 256)]
    quad_points: usize,
    /// Include the two-photon term in rho33.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    two_photon: bool,
}

impl ModelArgs {
    fn params(&self, coupling: f64) -> ModelParams {
        ModelParams {
            r_bar: self.r_bar,
            coupling,
            cutoff: self.cutoff,
            quad_points: self.quad_points,
            include_two_photon: self.two_photon,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Coupling K; repeat for several.
    #[arg(long = "coupling")]
    couplings: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    xi_min: f64,
    #[arg(long, default_value_t = 2.0)]
    xi_max: f64,
    #[arg(long, default_value_t = DEFAULT_XI_STEPS)]
    xi_steps: usize,
}

impl SweepArgs {
    fn spec(&self, model: &ModelArgs, out: Option<PathBuf>) -> SweepSpec {
        let couplings = if self.couplings.is_empty() { DEFAULT_COUPLINGS.to_vec() } else { self.couplings.clone() };
        SweepSpec {
            xi_min: self.xi_min,
            xi_max: self.xi_max,
            xi_steps: self.xi_steps,
            couplings,
            params: model.params(ModelParams::default().coupling),
            output_path: out,
        }
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Sweep { model, grid, amplitudes_only, out } => {
            let spec = grid.spec(&model, out);
            let rows = sweep::run_sweep(&spec)?;
            let w = output(&spec.output_path)?;
            if amplitudes_only {
                sweep::write_amplitude_csv(&rows, w)?;
            } else {
                sweep::write_sweep_csv(&rows, w)?;
            }
        }
        Command::State { model, coupling, xi, out } => {
            let text = sweep::state_dump_json(&model.params(coupling), xi)?;
            let mut w = output(&out)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        Command::OracleCheck { count, seed, polar_steps, azimuth_steps, refine_rounds, out } => {
            let grid = DirectionGrid { polar_steps, azimuth_steps, refine_rounds };
            let report = sweep::oracle_check(count, seed, &grid)?;
            for c in &report.comparisons {
                println!(
                    "{:<22} max deviation {:.3e} (tolerance {:.0e}; worst: {} seed {})",
                    c.measure, c.max_deviation, c.tolerance, c.worst_kind, c.worst_seed
                );
            }
            for b in &report.breaches {
                println!(
                    "BREACH {} on {} state seed {}: formula {:.17e}, oracle {:.17e}, deviation {:.3e}",
                    b.measure, b.kind, b.seed, b.formula, b.oracle, b.deviation
                );
            }
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            if !report.passed() {
                println!("oracle check failed: {} breaches", report.breaches.len());
                return Ok(ExitCode::from(EXIT_ORACLE_BREACH));
            }
            println!("oracle check passed: {} states of each kind", report.count);
        }
        Command::Figures { model, grid, out } => {
            let spec = grid.spec(&model, None);
            for path in sweep::figures(&out, &spec)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::OutOfRegime { .. } => ExitCode::from(EXIT_OUT_OF_REGIME),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}
