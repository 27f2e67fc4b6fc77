use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::config::{StrategyConfig, StrategyKind};
use crate::error::{Result, WahtorError};
use crate::fermion::FermionHamiltonian;
use crate::optim::{
    minimize_bfgs, newton_step, trust_region_local, BfgsOptions, LocalModel, ObjectiveHandle,
    TrustRegionOptions,
};
use crate::qubit::encode;
use crate::rotation::{
    contract_energy, energy_at, gradient, gradient_and_hessian, rotation_matrix,
    transform_with_unitary, GeneratorSet, RdmPair, RotationVector,
};
use crate::sim::{measure_rdms, prepare_state, AnsatzSpec, EvalLedger};
use crate::vqe::run_vqe;

/// Halvings tried before a Newton step is declared non-descending.
const NEWTON_BACKTRACK: usize = 30;
/// Gradients below this (max-norm) count as stationary.
const STATIONARY_GRADIENT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum HamoptStatus {
    /// A rotation lowering the energy was found.
    Moved,
    /// Already at a stationary point; zero rotation.
    Stationary,
    /// No acceptable rotation; zero rotation this round.
    Failed(String),
}

/// A VQE run inside an adiabatic step.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerVqe {
    pub energy: f64,
    pub cumulative_pauli_evals: u64,
    pub hamiltonian_word_count: usize,
}

#[derive(Debug, Clone)]
pub struct HamoptOutcome {
    pub status: HamoptStatus,
    /// Applied in order; their unitaries multiply to `unitary`.
    pub rotations: Vec<RotationVector>,
    pub unitary: DMatrix<Complex64>,
    pub hamiltonian: FermionHamiltonian,
    /// Angles after the step (changed only by the adiabatic strategy).
    pub theta: Vec<f64>,
    /// Energy of the state at `theta` under `hamiltonian`.
    pub energy: f64,
    pub inner_vqes: Vec<InnerVqe>,
    pub note: Option<String>,
}

impl HamoptOutcome {
    /// `sqrt(Σ ‖R_i‖²)` over the applied rotations.
    pub fn rotation_norm(&self) -> f64 {
        self.rotations
            .iter()
            .map(|r| r.norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn unchanged(
        ham: &FermionHamiltonian,
        theta: &[f64],
        energy: f64,
        status: HamoptStatus,
    ) -> Self {
        let n = ham.n_spin_orbitals() / 2;
        Self {
            status,
            rotations: Vec::new(),
            unitary: DMatrix::identity(n, n),
            hamiltonian: ham.clone(),
            theta: theta.to_vec(),
            energy,
            inner_vqes: Vec::new(),
            note: None,
        }
    }
}

/// One Hamiltonian-optimization phase at fixed (non-adiabatic) or re-converged
/// (adiabatic) angles.
pub fn hamopt_step(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    ansatz: &AnsatzSpec,
    theta: &[f64],
    ledger: &mut EvalLedger,
    cfg: &StrategyConfig,
) -> Result<HamoptOutcome> {
    let n = ham.n_spin_orbitals();
    if ansatz.n_qubits() != n || gens.n_spatial() * 2 != n {
        return Err(WahtorError::DimensionMismatch(format!(
            "{n} spin orbitals, {}-qubit ansatz, generators on {} orbitals",
            ansatz.n_qubits(),
            gens.n_spatial()
        )));
    }
    let tag = ledger.tag_for(theta);
    let psi = prepare_state(ansatz, theta)?;
    let rdms = measure_rdms(&psi, n, ledger, tag)?;
    match cfg.kind {
        StrategyKind::NaNewton => newton(ham, gens, theta, &rdms),
        StrategyKind::NaTrustRegion => trust_region(ham, gens, theta, &rdms, cfg),
        StrategyKind::NaBfgs => bfgs(ham, gens, theta, &rdms),
        StrategyKind::AdiabaticSd => adiabatic(ham, gens, ansatz, theta, rdms, ledger, cfg),
    }
}

fn finish(
    ham: &FermionHamiltonian,
    theta: &[f64],
    rdms: &RdmPair,
    rotations: Vec<RotationVector>,
    unitary: DMatrix<Complex64>,
    note: Option<String>,
) -> Result<HamoptOutcome> {
    let hamiltonian = transform_with_unitary(ham, &unitary)?;
    let energy = contract_energy(&hamiltonian, rdms)?;
    Ok(HamoptOutcome {
        status: HamoptStatus::Moved,
        rotations,
        unitary,
        hamiltonian,
        theta: theta.to_vec(),
        energy,
        inner_vqes: Vec::new(),
        note,
    })
}

fn newton(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    theta: &[f64],
    rdms: &RdmPair,
) -> Result<HamoptOutcome> {
    let e0 = contract_energy(ham, rdms)?;
    let (g, h) = gradient_and_hessian(ham, gens, rdms)?;
    if g.amax() < STATIONARY_GRADIENT {
        return Ok(HamoptOutcome::unchanged(
            ham,
            theta,
            e0,
            HamoptStatus::Stationary,
        ));
    }
    let step = newton_step(&g, &h)?;
    let mut note = Vec::new();
    if step.shift > 0.0 {
        note.push(format!("hessian shifted by {:.3e}", step.shift));
    }
    if step.fallback {
        note.push("steepest-descent fallback".to_string());
    }
    // backtrack along the Newton direction until the frozen-state energy decreases
    let mut scale = 1.0;
    for halvings in 0..NEWTON_BACKTRACK {
        let r = RotationVector((&step.step * scale).as_slice().to_vec());
        if energy_at(ham, gens, &r, rdms)? < e0 {
            if halvings > 0 {
                note.push(format!("step scaled by 2^-{halvings}"));
            }
            let u = rotation_matrix(gens, &r)?;
            let note = (!note.is_empty()).then(|| note.join("; "));
            return finish(ham, theta, rdms, vec![r], u, note);
        }
        scale *= 0.5;
    }
    let mut out = HamoptOutcome::unchanged(
        ham,
        theta,
        e0,
        HamoptStatus::Failed("newton direction does not lower the energy".into()),
    );
    out.note = Some(note.join("; ")).filter(|s| !s.is_empty());
    Ok(out)
}

/// Frozen-state energy re-expanded at every accepted step.
struct RotationModel<'a> {
    ham: FermionHamiltonian,
    gens: &'a GeneratorSet,
    rdms: &'a RdmPair,
    value: f64,
    unitary: DMatrix<Complex64>,
}

impl LocalModel for RotationModel<'_> {
    fn dim(&self) -> usize {
        self.gens.len()
    }

    fn current_value(&self) -> f64 {
        self.value
    }

    fn gradient_hessian(&mut self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        gradient_and_hessian(&self.ham, self.gens, self.rdms)
    }

    fn trial_value(&mut self, step: &DVector<f64>) -> Result<f64> {
        energy_at(
            &self.ham,
            self.gens,
            &RotationVector(step.as_slice().to_vec()),
            self.rdms,
        )
    }

    fn accept(&mut self, step: &DVector<f64>, value: f64) -> Result<()> {
        let u = rotation_matrix(self.gens, &RotationVector(step.as_slice().to_vec()))?;
        self.ham = transform_with_unitary(&self.ham, &u)?;
        self.unitary = &self.unitary * u;
        self.value = value;
        Ok(())
    }
}

fn trust_region(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    theta: &[f64],
    rdms: &RdmPair,
    cfg: &StrategyConfig,
) -> Result<HamoptOutcome> {
    let e0 = contract_energy(ham, rdms)?;
    let mut model = RotationModel {
        ham: ham.clone(),
        gens,
        rdms,
        value: e0,
        unitary: DMatrix::identity(gens.n_spatial(), gens.n_spatial()),
    };
    let opts = TrustRegionOptions {
        radius0: cfg.trust_radius0,
        max_radius: cfg.trust_max_radius,
        ..TrustRegionOptions::default()
    };
    let out = trust_region_local(&mut model, &opts)?;
    if out.accepted_steps.is_empty() {
        let status = if out.converged {
            HamoptStatus::Stationary
        } else {
            HamoptStatus::Failed(format!("trust region stopped with {:?}", out.termination))
        };
        return Ok(HamoptOutcome::unchanged(ham, theta, e0, status));
    }
    let rotations = out
        .accepted_steps
        .iter()
        .map(|s| RotationVector(s.as_slice().to_vec()))
        .collect();
    Ok(HamoptOutcome {
        status: HamoptStatus::Moved,
        rotations,
        unitary: model.unitary,
        hamiltonian: model.ham,
        theta: theta.to_vec(),
        energy: model.value,
        inner_vqes: Vec::new(),
        note: Some(format!(
            "{} accepted steps, {:?}",
            out.accepted_steps.len(),
            out.termination
        )),
    })
}

fn bfgs(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    theta: &[f64],
    rdms: &RdmPair,
) -> Result<HamoptOutcome> {
    let e0 = contract_energy(ham, rdms)?;
    let mut obj = ObjectiveHandle::new(gens.len(), |r: &DVector<f64>| {
        energy_at(ham, gens, &RotationVector(r.as_slice().to_vec()), rdms)
    });
    let opts = BfgsOptions {
        grad_tol: 1e-6,
        f_tol: 1e-12,
        ..BfgsOptions::default()
    };
    let report = minimize_bfgs(&mut obj, &DVector::zeros(gens.len()), &opts)?;
    if report.iterations == 0 || report.f_opt >= e0 {
        let status = if report.converged {
            HamoptStatus::Stationary
        } else {
            HamoptStatus::Failed(format!("bfgs stopped with {:?}", report.termination))
        };
        return Ok(HamoptOutcome::unchanged(ham, theta, e0, status));
    }
    let r = RotationVector(report.x_opt.as_slice().to_vec());
    let u = rotation_matrix(gens, &r)?;
    let note = Some(format!(
        "{} iterations, {:?}",
        report.iterations, report.termination
    ));
    finish(ham, theta, rdms, vec![r], u, note)
}

fn adiabatic(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    ansatz: &AnsatzSpec,
    theta: &[f64],
    rdms: RdmPair,
    ledger: &mut EvalLedger,
    cfg: &StrategyConfig,
) -> Result<HamoptOutcome> {
    let mut current = ham.clone();
    let mut theta = theta.to_vec();
    let mut energy = contract_energy(ham, &rdms)?;
    let mut rdms = rdms;
    let mut unitary = DMatrix::identity(gens.n_spatial(), gens.n_spatial());
    let mut rotations = Vec::new();
    let mut inner_vqes = Vec::new();
    let mut step = cfg.sd_step;
    let mut stop_reason = None;
    for round in 0..cfg.sd_inner_max {
        if round > 0 {
            let tag = ledger.tag_for(&theta);
            let psi = prepare_state(ansatz, &theta)?;
            rdms = measure_rdms(&psi, current.n_spin_orbitals(), ledger, tag)?;
        }
        let grad = gradient(&current, gens, &rdms)?;
        if grad.amax() < STATIONARY_GRADIENT {
            stop_reason = Some("stationary".to_string());
            break;
        }
        let mut accepted = false;
        while step >= cfg.sd_step * 1e-6 {
            let r = RotationVector((&grad * -step).as_slice().to_vec());
            let u = rotation_matrix(gens, &r)?;
            let trial = transform_with_unitary(&current, &u)?;
            let op = encode(&trial);
            let vqe = run_vqe(&op, ansatz, &theta, ledger, &cfg.vqe)?;
            inner_vqes.push(InnerVqe {
                energy: vqe.energy,
                cumulative_pauli_evals: ledger.cumulative_count(),
                hamiltonian_word_count: op.measured_word_count(),
            });
            if vqe.energy < energy {
                let gain = energy - vqe.energy;
                current = trial;
                theta = vqe.theta_opt;
                energy = vqe.energy;
                unitary = &unitary * u;
                rotations.push(r);
                accepted = true;
                if gain < cfg.outer_tol {
                    stop_reason = Some("energy change below tolerance".to_string());
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            stop_reason = Some("no descending step".to_string());
            break;
        }
        if stop_reason.is_some() {
            break;
        }
    }
    let status = if rotations.is_empty() {
        match stop_reason.as_deref() {
            Some("stationary") => HamoptStatus::Stationary,
            _ => HamoptStatus::Failed("no descending steepest-descent step".into()),
        }
    } else {
        HamoptStatus::Moved
    };
    Ok(HamoptOutcome {
        status,
        rotations,
        unitary,
        hamiltonian: current,
        theta,
        energy,
        inner_vqes,
        note: stop_reason.map(|s| format!("{s}; step {step:.3e}")),
    })
}
