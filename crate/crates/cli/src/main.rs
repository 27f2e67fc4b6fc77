mod config;
mod report;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use wahtor::fermion::{exact_ground_energy, lowest_energy_any_sector, MAX_SECTOR_SPIN_ORBITALS};
use wahtor::rotation::build_generators;
use wahtor::validation::{run_validation, ValidationOptions};
use wahtor::wahtor::{run_wahtor_traced, StrategyKind, WahtorOutcome};

use config::{ExperimentConfig, LoadedSystem, SystemSpec};
use report::{render_svg, CsvSink, RunSummary, SectorEnergy, Series, StrategySummary};

const EXIT_CONFIG: u8 = 1;
const EXIT_PROPERTY: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "wahtor",
    version,
    about = "VQE with orbital-rotation Hamiltonian optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured strategy and write traces, a summary and a chart.
    Run {
        config: PathBuf,
        /// Overrides vqe.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides vqe.count_gradients, e.g. `--count-gradients=false`.
        #[arg(long, value_name = "BOOL")]
        count_gradients: Option<bool>,
    },
    /// Run the fast invariant checks on random small instances.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the exact ground energy of the configured system.
    Exact { config: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl ToString) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }

    fn runtime(message: impl ToString) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            out,
            count_gradients,
        } => cmd_run(&config, seed, out, count_gradients),
        Command::Validate { seed } => cmd_validate(seed),
        Command::Exact { config } => cmd_exact(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Caps the global thread pool at `WAHTOR_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("WAHTOR_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::config(format!(
            "WAHTOR_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(Failure::runtime)
}

fn load(path: &Path) -> Result<(ExperimentConfig, LoadedSystem), Failure> {
    let cfg = ExperimentConfig::from_file(path).map_err(Failure::config)?;
    let sys = cfg.load().map_err(Failure::config)?;
    Ok((cfg, sys))
}

struct ExactEnergies {
    any: Option<SectorEnergy>,
    declared: Option<SectorEnergy>,
}

fn exact_energies(sys: &LoadedSystem) -> Result<ExactEnergies, Failure> {
    if sys.hamiltonian.n_spin_orbitals() > MAX_SECTOR_SPIN_ORBITALS {
        return Ok(ExactEnergies {
            any: None,
            declared: None,
        });
    }
    let (e, (n_up, n_dn)) = lowest_energy_any_sector(&sys.hamiltonian).map_err(Failure::runtime)?;
    let declared = match sys.sector {
        Some((u, d)) => Some(SectorEnergy {
            n_up: u,
            n_dn: d,
            energy: exact_ground_energy(&sys.hamiltonian, u, d).map_err(Failure::runtime)?,
        }),
        None => None,
    };
    Ok(ExactEnergies {
        any: Some(SectorEnergy {
            n_up,
            n_dn,
            energy: e,
        }),
        declared,
    })
}

fn system_label(cfg: &ExperimentConfig) -> String {
    match &cfg.system {
        SystemSpec::Hubbard(h) => format!(
            "hubbard ring L={} t={} V={} mu={} target={}",
            h.n_sites, h.hopping, h.on_site, h.chem_penalty, h.penalty_target
        ),
        SystemSpec::Fcidump(p) => format!("fcidump {}", p.display()),
    }
}

fn cmd_exact(path: &Path) -> Result<(), Failure> {
    let (_, sys) = load(path)?;
    let exact = exact_energies(&sys)?;
    let Some(any) = exact.any else {
        return Err(Failure::runtime(format!(
            "{} spin orbitals exceed the exact-diagonalization limit of {MAX_SECTOR_SPIN_ORBITALS}",
            sys.hamiltonian.n_spin_orbitals()
        )));
    };
    println!(
        "exact_ground_energy {} sector ({}, {})",
        any.energy, any.n_up, any.n_dn
    );
    if let Some(d) = exact.declared {
        println!(
            "declared_sector_energy {} sector ({}, {})",
            d.energy, d.n_up, d.n_dn
        );
    }
    Ok(())
}

fn cmd_validate(seed: u64) -> Result<(), Failure> {
    let report = run_validation(&ValidationOptions {
        seed,
        ..Default::default()
    })
    .map_err(Failure::runtime)?;
    for c in &report.checks {
        println!("{c}");
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_PROPERTY,
            message: "one or more properties failed".into(),
        })
    }
}

struct StrategyRun {
    kind: StrategyKind,
    csv: String,
    points: Vec<(u64, f64)>,
    records: usize,
    outcome: Result<WahtorOutcome, String>,
}

fn run_strategy(
    cfg: &ExperimentConfig,
    sys: &LoadedSystem,
    kind: StrategyKind,
    out_dir: &Path,
) -> StrategyRun {
    let csv = format!("trace_{kind}.csv");
    let mut points = Vec::new();
    let mut records = 0;
    let outcome = (|| -> Result<WahtorOutcome, String> {
        let file = File::create(out_dir.join(&csv)).map_err(|e| e.to_string())?;
        let mut sink = CsvSink::new(BufWriter::new(file)).map_err(|e| e.to_string())?;
        let n_spatial = sys.hamiltonian.n_spatial().map_err(|e| e.to_string())?;
        let gens = build_generators::<&str>(n_spatial, None).map_err(|e| e.to_string())?;
        let result = run_wahtor_traced(
            &sys.hamiltonian,
            &sys.ansatz,
            &gens,
            &cfg.strategy_config(kind),
            cfg.seed,
            &mut |r| {
                sink.push(r);
                points.push((r.cumulative_pauli_evals, r.energy));
                records += 1;
            },
        );
        sink.finish().map_err(|e| e.to_string())?;
        result.map_err(|e| e.to_string())
    })();
    StrategyRun {
        kind,
        csv,
        points,
        records,
        outcome,
    }
}

fn cmd_run(
    path: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    count_gradients: Option<bool>,
) -> Result<(), Failure> {
    let (mut cfg, sys) = load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if let Some(c) = count_gradients {
        cfg.count_gradients = c;
    }
    let exact = exact_energies(&sys)?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        Failure::runtime(format!("cannot create {}: {e}", cfg.output_dir.display()))
    })?;

    let runs: Vec<StrategyRun> = cfg
        .strategies
        .par_iter()
        .map(|&k| run_strategy(&cfg, &sys, k, &cfg.output_dir))
        .collect();

    let mut failed = Vec::new();
    let mut summaries = Vec::new();
    for run in &runs {
        let s = match &run.outcome {
            Ok(o) => {
                println!(
                    "{}: first VQE energy {:.8}, final energy {:.8}, {} Pauli strings ({:?})",
                    run.kind,
                    o.first_vqe_energy,
                    o.final_energy,
                    o.total_pauli_evals,
                    o.termination
                );
                StrategySummary {
                    strategy: run.kind.to_string(),
                    status: "ok".into(),
                    error: None,
                    first_vqe_energy: Some(o.first_vqe_energy),
                    final_energy: Some(o.final_energy),
                    total_pauli_evals: Some(o.total_pauli_evals),
                    trace_records: run.records,
                    termination: Some(format!("{:?}", o.termination)),
                    csv: run.csv.clone(),
                }
            }
            Err(e) => {
                eprintln!("{}: failed: {e}", run.kind);
                failed.push(run.kind.to_string());
                StrategySummary {
                    strategy: run.kind.to_string(),
                    status: "failed".into(),
                    error: Some(e.clone()),
                    first_vqe_energy: run.points.first().map(|p| p.1),
                    final_energy: None,
                    total_pauli_evals: run.points.last().map(|p| p.0),
                    trace_records: run.records,
                    termination: None,
                    csv: run.csv.clone(),
                }
            }
        };
        summaries.push(s);
    }
    if let Some(e) = &exact.any {
        println!(
            "exact ground energy {:.8} in sector ({}, {})",
            e.energy, e.n_up, e.n_dn
        );
    }

    let summary = RunSummary {
        system: system_label(&cfg),
        seed: cfg.seed,
        count_gradients: cfg.count_gradients,
        exact_ground_energy: exact.any.as_ref().map(|e| e.energy),
        exact_ground_sector: exact.any,
        declared_sector: exact.declared,
        strategies: summaries,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(Failure::runtime)?;
    fs::write(cfg.output_dir.join("summary.json"), json + "\n").map_err(Failure::runtime)?;

    let series: Vec<Series> = runs
        .iter()
        .map(|r| Series {
            strategy: r.kind,
            points: r.points.clone(),
        })
        .collect();
    let svg = render_svg(&series, summary.exact_ground_energy, &summary.system);
    fs::write(cfg.output_dir.join("plot.svg"), svg).map_err(Failure::runtime)?;

    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::runtime(format!(
            "strategies failed: {}",
            failed.join(", ")
        )))
    }
}
