use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ddgeo::angle::parse_angle;
use ddgeo::config::{parse_initial, NoiseSettings, TwoQubitGate};
use ddgeo::output::{emit_csv, emit_svg};
use ddgeo::sweep::{dominance_violations, run_point_2q};
use ddgeo::ExperimentConfig;
use ddgeo_core::control::{average_interaction_residual_1q, periodicity_residual, DecouplingFrame1Q, PulseMode};
use ddgeo_core::engine::{run_1q_experiment, Integrator, SimulationConfig, SimulationOutcome};
use ddgeo_core::geometry::orange_slice;
use ddgeo_core::noise::{EnvInit, Topology};
use ddgeo_core::pulse1q::{pulse_envelope, synthesize, ScheduleExport1Q};
use serde_json::json;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "ddgeo", version, about = "Decoupling-protected geometric gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct SimArgs {
    /// Integration steps per gate interval.
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    /// Environment initial state: ground, plus or mixed-average.
    #[arg(long, default_value = "ground", value_parser = parse_env_init)]
    env_init: EnvInit,
    /// Integrator: midpoint2 or magnus4.
    #[arg(long, default_value = "midpoint2", value_parser = parse_integrator)]
    integrator: Integrator,
    /// Skip the step-doubling convergence check.
    #[arg(long)]
    no_richardson: bool,
}

impl SimArgs {
    fn config(&self) -> SimulationConfig {
        SimulationConfig {
            steps_per_interval: self.steps,
            integrator: self.integrator,
            richardson_check: !self.no_richardson,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the orange-slice path for a z rotation and write its pulse schedule.
    /// `--nx 0 --nz 0` gives the unprotected drive.
    Synth1q {
        /// Gate as `z:<angle>`, e.g. `z:pi/8` for exp(−iπσ_z/8).
        #[arg(long)]
        gate: String,
        #[arg(long)]
        nx: u32,
        #[arg(long)]
        nz: u32,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the decoupling conditions of a frame.
    Verify {
        #[arg(long)]
        nx: u32,
        #[arg(long)]
        nz: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Simulate a one-qubit schedule at noise strength `eps` (units of π/τ).
    Simulate1q {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "plus-x")]
        init: String,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Simulate the two-qubit gate at noise strength `eps` (units of J).
    Simulate2q {
        #[arg(long, value_parser = parse_angle_arg)]
        gamma: f64,
        #[arg(long = "J", default_value_t = 1.0)]
        j: f64,
        #[arg(long, default_value = "square", value_parser = parse_pulse_mode)]
        pulse_mode: PulseMode,
        #[arg(long, default_value_t = 20.0)]
        pulse_strength: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "10")]
        init: String,
        /// Environment layout: per-qubit or shared.
        #[arg(long, default_value = "per-qubit", value_parser = parse_topology)]
        topology: Topology,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Run a noise sweep from a configuration file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Print the peak drive amplitude of a one-qubit schedule.
    Envelope {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value_t = 4097)]
        grid: usize,
    },
}

fn parse_angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn parse_env_init(s: &str) -> Result<EnvInit, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown environment state {s:?}"))
}

fn parse_integrator(s: &str) -> Result<Integrator, String> {
    match s {
        "midpoint2" | "midpoint-2" => Ok(Integrator::Midpoint2),
        "magnus4" | "magnus-4" => Ok(Integrator::Magnus4),
        _ => Err(format!("unknown integrator {s:?}")),
    }
}

fn parse_pulse_mode(s: &str) -> Result<PulseMode, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown pulse mode {s:?}"))
}

fn parse_topology(s: &str) -> Result<Topology, String> {
    match s {
        "per-qubit" => Ok(Topology::OneEnvPerSystemQubit),
        "shared" => Ok(Topology::SingleSharedEnv),
        _ => Err(format!("unknown topology {s:?}")),
    }
}

fn outcome_json(o: &SimulationOutcome) -> serde_json::Value {
    json!({
        "fidelity": o.fidelity,
        "fidelity_shift": o.fidelity_shift,
        "step_convergence_estimate": o.step_convergence_estimate,
        "converged": o.converged,
    })
}

fn read_schedule(path: &PathBuf) -> Result<ScheduleExport1Q> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Synth1q {
            gate,
            nx,
            nz,
            tau,
            samples,
            out,
        } => {
            let Some(angle) = gate.strip_prefix("z:") else {
                eprintln!("only z rotations are supported, e.g. --gate z:pi/8");
                return Ok(EXIT_USAGE);
            };
            let gamma = parse_angle(angle)?;
            let frame = match (nx, nz) {
                (0, 0) if tau > 0.0 => Ok(DecouplingFrame1Q::bare(tau)),
                _ => DecouplingFrame1Q::new(nx, nz, tau),
            };
            let frame = match frame {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(EXIT_USAGE);
                }
            };
            let schedule = synthesize(&orange_slice(gamma, tau), &frame)?.with_samples_per_tau(samples);
            let text = serde_json::to_string_pretty(&schedule.export())?;
            std::fs::write(&out, text + "\n").with_context(|| format!("writing {}", out.display()))?;
            Ok(0)
        }
        Command::Verify { nx, nz, tol } => {
            let frame = match DecouplingFrame1Q::new(nx, nz, 1.0) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(EXIT_USAGE);
                }
            };
            let period = periodicity_residual(&frame, 1025);
            let avg = average_interaction_residual_1q(&frame, 64);
            println!("periodicity_residual {period:.3e}");
            for (axis, r) in ["x", "y", "z"].iter().zip(avg) {
                println!("average_residual_{axis} {r:.3e}");
            }
            let ok = period < tol && avg.iter().all(|r| *r < tol);
            Ok(if ok { 0 } else { EXIT_FAILURE })
        }
        Command::Simulate1q {
            schedule,
            eps,
            init,
            sim,
        } => {
            let export = read_schedule(&schedule)?;
            let s = export.to_schedule()?;
            let initial = parse_initial(&init, 1)?;
            let noise = NoiseSettings {
                env_init: sim.env_init,
                ..Default::default()
            };
            let model = noise.model(eps * std::f64::consts::PI / s.tau());
            let out = run_1q_experiment(s.path(), s.frame(), &model, &initial, &sim.config())?;
            println!("{}", serde_json::to_string_pretty(&outcome_json(&out))?);
            Ok(if out.converged { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::Simulate2q {
            gamma,
            j,
            pulse_mode,
            pulse_strength,
            eps,
            init,
            topology,
            sim,
        } => {
            let gate = TwoQubitGate {
                gamma,
                j,
                shape: Default::default(),
                pulse_mode,
                pulse_strength,
                initial: init,
            };
            let noise = NoiseSettings {
                topology,
                env_init: sim.env_init,
                ..Default::default()
            };
            let r = run_point_2q(&gate, &noise, eps, &sim.config())?;
            let report = json!({
                "protected": outcome_json(&r.protected),
                "unprotected": outcome_json(&r.unprotected),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
            let converged = r.protected.converged && r.unprotected.converged;
            Ok(if converged { 0 } else { EXIT_NOT_CONVERGED })
        }
        Command::Sweep { config, csv, svg } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = ddgeo::sweep(&cfg)?;
            let csv = csv.or_else(|| cfg.outputs.csv.clone());
            let svg = svg.or_else(|| cfg.outputs.svg.clone());
            match &csv {
                Some(p) => emit_csv(&rows, p)?,
                None => print!("{}", ddgeo::output::csv_string(&rows)),
            }
            if let Some(p) = &svg {
                emit_svg(&rows, p)?;
            }
            let stale: Vec<f64> = rows.iter().filter(|r| !r.converged).map(|r| r.epsilon).collect();
            if !stale.is_empty() {
                eprintln!("not converged at epsilon = {stale:?}");
                return Ok(EXIT_NOT_CONVERGED);
            }
            let violations = dominance_violations(&rows, 1e-9);
            if !violations.is_empty() {
                eprintln!(
                    "unprotected fidelity exceeds protected at epsilon = {:?}",
                    violations.iter().map(|r| r.epsilon).collect::<Vec<_>>()
                );
                return Ok(EXIT_FAILURE);
            }
            Ok(0)
        }
        Command::Envelope { schedule, grid } => {
            let s = read_schedule(&schedule)?.to_schedule()?;
            println!("{:.12}", pulse_envelope(&s, grid)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
