use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stringmass::acceptance::{run_suite, Manifest};
use stringmass::coefficients::{default_config, SystemConfig};
use stringmass::control::{modal_reduction, solve_min_norm, verify_control};
use stringmass::error::{Error, Result};
use stringmass::export::{self, num};
use stringmass::gaps::{classify_indices, default_delta_prime, verify_gap_asymptotics};
use stringmass::modes::assemble_modes;
use stringmass::observability::{empirical_constants, random_modal_data};
use stringmass::shooting::Shooter;
use stringmass::simulator::{simulate, Boundary, SimulationParams};
use stringmass::spectrum::{SpectrumTable, DEFAULT_FUSION_TOL};

#[derive(Parser)]
#[command(name = "stringmass", version, about = "Spectra, observability and null control of two strings joined by a point mass")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON coefficient file; the built-in default configuration when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long = "n-modes", global = true)]
    n_modes: Option<usize>,
    /// Time horizon.
    #[arg(long = "T", global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    dx: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dirichlet, regular and coupled spectra.
    Spectrum,
    /// Cluster classification and gap asymptotics.
    Gaps,
    /// Eigenfunctions and their norms.
    Modes,
    /// Boundary observability experiment on random data.
    Observe,
    /// Null control of random data, with verification.
    Control,
    /// Uncontrolled finite-difference run of random modal data.
    Simulate,
    /// Full acceptance suite.
    Verify,
}

const DEFAULT_SEED: u64 = 20240601;

fn load_config(c: &Common) -> Result<SystemConfig> {
    match &c.config {
        Some(p) => SystemConfig::from_path(p),
        None => Ok(default_config()),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    let cfg = load_config(c)?;
    fs::create_dir_all(&c.out).map_err(|e| Error::Io(format!("cannot create {}: {e}", c.out.display())))?;
    let seed = c.seed.unwrap_or(DEFAULT_SEED);
    let horizon = c.t_end.unwrap_or(cfg.critical_time() + 0.5);
    let dir = c.out.as_path();
    match cli.command {
        Command::Spectrum => {
            let table = SpectrumTable::build(c.n_modes.unwrap_or(40), &cfg)?;
            export::write_spectrum(create(dir, "spectrum.csv")?, &table)?;
        }
        Command::Gaps => {
            let n = c.n_modes.unwrap_or(40);
            let table = SpectrumTable::build(n + 2, &cfg)?;
            let classes = classify_indices(&table, default_delta_prime(&table))?;
            export::write_gaps(create(dir, "gaps.csv")?, &table, &classes)?;
            let r = verify_gap_asymptotics(&table, &classes);
            let g = cfg.gamma1() + cfg.gamma2();
            let tail = r.weyl_relative.iter().rev().take(10).fold(0.0f64, |m, v| m.max(v.abs()));
            let text = format!(
                "delta_prime {}\nA {:?}\nB+ {:?}\nB- {:?}\nGamma_star {:?}\nmax_n_delta_A {}\nmedian_n_delta_A {}\nmin_two_step_gap {}\npi_over_gamma {}\nmax_weyl_deviation_last10 {}\ntau {}\n",
                num(classes.delta_prime),
                classes.a,
                classes.b_plus,
                classes.b_minus,
                classes.lambda_set,
                num(r.max_n_delta_a),
                num(r.median_n_delta_a),
                num(r.min_two_step_gap),
                num(std::f64::consts::PI / g),
                num(tail),
                num(r.tau),
            );
            write_text(dir, "gap_report.txt", &text)?;
        }
        Command::Modes => {
            let n = c.n_modes.unwrap_or(12);
            let sh = Shooter::with_default_steps(&cfg);
            let table = SpectrumTable::build_with(&sh, n, DEFAULT_FUSION_TOL)?;
            let modes = assemble_modes(n, &table, &sh)?;
            for m in &modes {
                export::write_mode(create(dir, &format!("mode_{:03}.csv", m.n))?, m)?;
            }
            export::write_mode_summary(create(dir, "modes_summary.csv")?, &modes)?;
        }
        Command::Observe => {
            let exp = empirical_constants(&cfg, horizon, c.n_modes.unwrap_or(30), c.trials.unwrap_or(100), seed)?;
            export::write_observability(create(dir, "observability.csv")?, &exp)?;
        }
        Command::Control => {
            let n = c.n_modes.unwrap_or(16);
            let sh = Shooter::with_default_steps(&cfg);
            let table = SpectrumTable::build_with(&sh, n, DEFAULT_FUSION_TOL)?;
            let modes = assemble_modes(n, &table, &sh)?;
            let data = random_modal_data(n, seed, 0);
            let problem = modal_reduction(&data, &modes, &cfg, horizon)?;
            let solution = solve_min_norm(&problem, None)?;
            export::write_control_signal(create(dir, "control_signal.csv")?, &solution.signal)?;
            export::write_control_report(create(dir, "control_report.csv")?, &problem, &solution)?;
            let report = verify_control(&problem, &solution, &data, &modes, &cfg, c.dx.unwrap_or(1.0 / 2048.0))?;
            let text = format!(
                "duhamel_residual {}\nsimulator_residual {}\nfinal_mass_state {}\nmoment_residual {}\ncondition {}\ncontrol_norm {}\n",
                num(report.duhamel_residual),
                num(report.simulator_residual),
                num(report.final_mass_state),
                num(report.moment_residual),
                num(report.condition),
                num(report.control_norm)
            );
            write_text(dir, "control_verify.txt", &text)?;
        }
        Command::Simulate => {
            let n = c.n_modes.unwrap_or(20);
            let dx = c.dx.unwrap_or(1.0 / 1024.0);
            let sh = Shooter::with_default_steps(&cfg);
            let table = SpectrumTable::build_with(&sh, n, DEFAULT_FUSION_TOL)?;
            let modes = assemble_modes(n, &table, &sh)?;
            let data = random_modal_data(n, seed, 0);
            let cells = (1.0 / dx).round() as usize;
            let (w0, w1) = stringmass::control::state_from_modal(&data, &modes, cells);
            let t_end = c.t_end.unwrap_or(cfg.critical_time());
            let mut params = SimulationParams::new(dx, c.dt, t_end);
            let (steps, _) = {
                let disc = stringmass::simulator::Discretization::new(&cfg, cells)?;
                stringmass::simulator::time_grid(&disc, &cfg, &params)?
            };
            params.snapshot_every = (steps / 50).max(1);
            let run = simulate(&cfg, &w0, &w1, Boundary::Fixed, &params)?;
            export::write_trace(create(dir, "trace.csv")?, &run)?;
            export::write_energy(create(dir, "energy.csv")?, &run)?;
            export::write_snapshots(create(dir, "snapshots.csv")?, &run)?;
        }
        Command::Verify => {
            let mut manifest = Manifest { seed, ..Manifest::default() };
            if let Some(t) = c.trials {
                manifest.trials = t;
            }
            let report = run_suite(&manifest, &cfg);
            let text = report.render();
            print!("{text}");
            write_text(dir, "acceptance_report.txt", &text)?;
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
