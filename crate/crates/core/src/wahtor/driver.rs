use super::config::StrategyConfig;
use super::hamopt::{hamopt_step, HamoptStatus};
use super::trace::{AccumulatedRotation, Stage, TraceRecord, WahtorTrace};
use crate::error::{Result, WahtorError};
use crate::fermion::FermionHamiltonian;
use crate::qubit::encode;
use crate::rotation::{transform_with_unitary, GeneratorSet};
use crate::sim::{AnsatzSpec, EvalLedger};
use crate::vqe::{random_theta, run_vqe};

/// Largest elementwise gap tolerated between the tracked Hamiltonian and `U† H₀ U`.
const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Rotations smaller than this end the outer loop.
const ZERO_ROTATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterTermination {
    EnergyConverged,
    StationaryRotation,
    RepeatedFailure,
    MaxOuter,
}

#[derive(Debug, Clone)]
pub struct WahtorOutcome {
    pub trace: WahtorTrace,
    /// Energy of the last VQE.
    pub final_energy: f64,
    pub first_vqe_energy: f64,
    pub rotation: AccumulatedRotation,
    pub theta_opt: Vec<f64>,
    /// `U_total† H₀ U_total`, checked against the step-by-step updates.
    pub hamiltonian: FermionHamiltonian,
    pub termination: OuterTermination,
    pub total_pauli_evals: u64,
}

pub fn run_wahtor(
    h0: &FermionHamiltonian,
    ansatz: &AnsatzSpec,
    gens: &GeneratorSet,
    cfg: &StrategyConfig,
    seed: u64,
) -> Result<WahtorOutcome> {
    run_wahtor_traced(h0, ansatz, gens, cfg, seed, &mut |_| {})
}

/// As [`run_wahtor`], handing each trace record to `sink` as soon as it exists.
pub fn run_wahtor_traced(
    h0: &FermionHamiltonian,
    ansatz: &AnsatzSpec,
    gens: &GeneratorSet,
    cfg: &StrategyConfig,
    seed: u64,
    sink: &mut dyn FnMut(&TraceRecord),
) -> Result<WahtorOutcome> {
    cfg.validate()?;
    let n = h0.n_spin_orbitals();
    if ansatz.n_qubits() != n || gens.n_spatial() * 2 != n {
        return Err(WahtorError::DimensionMismatch(format!(
            "{n} spin orbitals, {}-qubit ansatz, generators on {} orbitals",
            ansatz.n_qubits(),
            gens.n_spatial()
        )));
    }
    let mut theta = match &cfg.initial_theta {
        Some(t) if t.len() != ansatz.n_params() => {
            return Err(WahtorError::DimensionMismatch(format!(
                "{} initial angles for {} parameters",
                t.len(),
                ansatz.n_params()
            )))
        }
        Some(t) => t.clone(),
        None => random_theta(ansatz, seed),
    };
    let mut ledger = EvalLedger::new();
    let mut trace = WahtorTrace::default();
    let mut push = |trace: &mut WahtorTrace, rec: TraceRecord| {
        sink(&rec);
        trace.records.push(rec);
    };
    let mut current = h0.clone();
    let mut rotation = AccumulatedRotation::identity(gens.n_spatial());
    let mut previous: Option<f64> = None;
    let mut first = None;
    let mut failures = 0;
    let mut termination = OuterTermination::MaxOuter;
    let mut last_energy = f64::NAN;

    for outer in 0..cfg.max_outer {
        let op = encode(&current);
        let vqe = run_vqe(&op, ansatz, &theta, &mut ledger, &cfg.vqe)?;
        theta = vqe.theta_opt;
        last_energy = vqe.energy;
        first.get_or_insert(vqe.energy);
        push(
            &mut trace,
            TraceRecord {
                stage: Stage::Vqe,
                strategy: cfg.kind,
                outer_index: outer,
                cumulative_pauli_evals: ledger.cumulative_count(),
                energy: vqe.energy,
                hamiltonian_word_count: op.measured_word_count(),
                accepted_r_norm: 0.0,
                note: Some(format!(
                    "{} iterations, {:?}",
                    vqe.iterations, vqe.termination
                )),
            },
        );
        if let Some(prev) = previous {
            if (vqe.energy - prev).abs() < cfg.outer_tol {
                termination = OuterTermination::EnergyConverged;
                break;
            }
        }
        previous = Some(vqe.energy);
        if outer + 1 == cfg.max_outer {
            break;
        }

        let step = hamopt_step(&current, gens, ansatz, &theta, &mut ledger, cfg)?;
        for inner in &step.inner_vqes {
            push(
                &mut trace,
                TraceRecord {
                    stage: Stage::Vqe,
                    strategy: cfg.kind,
                    outer_index: outer,
                    cumulative_pauli_evals: inner.cumulative_pauli_evals,
                    energy: inner.energy,
                    hamiltonian_word_count: inner.hamiltonian_word_count,
                    accepted_r_norm: 0.0,
                    note: Some("inner".into()),
                },
            );
        }
        let r_norm = step.rotation_norm();
        let mut note = step.note.clone();
        if let HamoptStatus::Failed(reason) = &step.status {
            note = Some(match note {
                Some(n) => format!("failed: {reason}; {n}"),
                None => format!("failed: {reason}"),
            });
        }
        let word_count = encode(&step.hamiltonian).measured_word_count();
        push(
            &mut trace,
            TraceRecord {
                stage: Stage::Hamopt,
                strategy: cfg.kind,
                outer_index: outer,
                cumulative_pauli_evals: ledger.cumulative_count(),
                energy: step.energy,
                hamiltonian_word_count: word_count,
                accepted_r_norm: r_norm,
                note,
            },
        );
        match step.status {
            HamoptStatus::Failed(_) => {
                failures += 1;
                if failures >= 2 {
                    termination = OuterTermination::RepeatedFailure;
                    break;
                }
                continue;
            }
            HamoptStatus::Stationary => {
                termination = OuterTermination::StationaryRotation;
                break;
            }
            HamoptStatus::Moved => {}
        }
        failures = 0;
        rotation.push(&step.unitary, step.rotations.clone());
        current = step.hamiltonian;
        theta = step.theta;
        if r_norm < ZERO_ROTATION {
            termination = OuterTermination::StationaryRotation;
            break;
        }
    }

    let unitarity = rotation.unitarity_error();
    if unitarity > 1e-10 {
        return Err(WahtorError::NumericalConsistency(format!(
            "accumulated rotation deviates from unitarity by {unitarity:e}"
        )));
    }
    let rebuilt = transform_with_unitary(h0, &rotation.u_total)?;
    let gap = rebuilt.max_abs_diff(&current);
    if gap > RECONSTRUCTION_TOL {
        return Err(WahtorError::NumericalConsistency(format!(
            "U† H₀ U differs from the tracked Hamiltonian by {gap:e}"
        )));
    }
    Ok(WahtorOutcome {
        trace,
        final_energy: last_energy,
        first_vqe_energy: first.unwrap_or(f64::NAN),
        rotation,
        theta_opt: theta,
        hamiltonian: rebuilt,
        termination,
        total_pauli_evals: ledger.cumulative_count(),
    })
}
