//! Statevector VQE over the ansatz angles with ledger-charged energy evaluations.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, WahtorError};
use crate::optim::{minimize_bfgs, BfgsOptions, Objective, Termination};
use crate::qubit::QubitOperator;
use crate::sim::{prepare_state, AnsatzSpec, CompiledOperator, EvalLedger};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqeOptions {
    /// Stop when one BFGS iteration lowers the energy by less than this (Hartree).
    pub energy_tol: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Charge the shifted circuits of each parameter-shift gradient to the ledger.
    pub count_gradients: bool,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            energy_tol: 1e-6,
            grad_tol: 1e-6,
            max_iter: 2000,
            count_gradients: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqeSample {
    pub cumulative_pauli_evals: u64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub theta_opt: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Initial point, then one sample per accepted BFGS iterate.
    pub trace: Vec<VqeSample>,
}

/// Angles drawn uniformly from `[0, 2π)`.
pub fn random_theta(ansatz: &AnsatzSpec, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..ansatz.n_params())
        .map(|_| rng.random_range(0.0..TAU))
        .collect()
}

/// Energies at `θ ± π/2 e_k` for every `k`, as `[(E⁺_0, E⁻_0), …]`.
fn shifted_energies(
    op: &CompiledOperator,
    ansatz: &AnsatzSpec,
    theta: &[f64],
) -> Result<Vec<(f64, f64)>> {
    (0..theta.len())
        .into_par_iter()
        .map(|k| {
            let mut t = theta.to_vec();
            t[k] = theta[k] + FRAC_PI_2;
            let plus = op.value(&prepare_state(ansatz, &t)?)?;
            t[k] = theta[k] - FRAC_PI_2;
            let minus = op.value(&prepare_state(ansatz, &t)?)?;
            Ok((plus, minus))
        })
        .collect()
}

/// `∂E/∂θ_k = ½[E(θ + π/2 e_k) − E(θ − π/2 e_k)]`, exact for Ry rotations.
///
/// With a ledger, each of the `2|θ|` shifted circuits is charged as its own point.
pub fn parameter_shift_gradient(
    op: &CompiledOperator,
    ansatz: &AnsatzSpec,
    theta: &[f64],
    ledger: Option<&mut EvalLedger>,
) -> Result<Vec<f64>> {
    if theta.len() != ansatz.n_params() {
        return Err(WahtorError::DimensionMismatch(format!(
            "{} angles for an ansatz with {} parameters",
            theta.len(),
            ansatz.n_params()
        )));
    }
    let pairs = shifted_energies(op, ansatz, theta)?;
    if let Some(ledger) = ledger {
        for _ in 0..2 * pairs.len() {
            let tag = ledger.fresh_tag();
            ledger.charge(tag, op.words());
        }
    }
    Ok(pairs.into_iter().map(|(p, m)| 0.5 * (p - m)).collect())
}

struct VqeObjective<'a> {
    op: &'a CompiledOperator,
    ansatz: &'a AnsatzSpec,
    ledger: &'a mut EvalLedger,
    count_gradients: bool,
    trace: Vec<VqeSample>,
}

impl Objective for VqeObjective<'_> {
    fn dim(&self) -> usize {
        self.ansatz.n_params()
    }

    fn value(&mut self, x: &DVector<f64>) -> Result<f64> {
        let tag = self.ledger.tag_for(x.as_slice());
        let psi = prepare_state(self.ansatz, x.as_slice())?;
        let e = self.op.evaluate(&psi, self.ledger, tag)?;
        if self.trace.is_empty() {
            self.trace.push(VqeSample {
                cumulative_pauli_evals: self.ledger.cumulative_count(),
                energy: e,
            });
        }
        Ok(e)
    }

    fn gradient(&mut self, x: &DVector<f64>) -> Result<Option<DVector<f64>>> {
        let ledger = if self.count_gradients {
            Some(&mut *self.ledger)
        } else {
            None
        };
        let g = parameter_shift_gradient(self.op, self.ansatz, x.as_slice(), ledger)?;
        Ok(Some(DVector::from_vec(g)))
    }

    fn on_accept(&mut self, _x: &DVector<f64>, f: f64) {
        self.trace.push(VqeSample {
            cumulative_pauli_evals: self.ledger.cumulative_count(),
            energy: f,
        });
    }
}

pub fn run_vqe(
    op: &QubitOperator,
    ansatz: &AnsatzSpec,
    theta0: &[f64],
    ledger: &mut EvalLedger,
    opts: &VqeOptions,
) -> Result<VqeResult> {
    if op.n_qubits() != ansatz.n_qubits() {
        return Err(WahtorError::DimensionMismatch(format!(
            "{}-qubit operator for a {}-qubit ansatz",
            op.n_qubits(),
            ansatz.n_qubits()
        )));
    }
    if theta0.len() != ansatz.n_params() {
        return Err(WahtorError::DimensionMismatch(format!(
            "{} initial angles for an ansatz with {} parameters",
            theta0.len(),
            ansatz.n_params()
        )));
    }
    let compiled = CompiledOperator::new(op);
    let mut obj = VqeObjective {
        op: &compiled,
        ansatz,
        ledger,
        count_gradients: opts.count_gradients,
        trace: Vec::new(),
    };
    let bfgs = BfgsOptions {
        grad_tol: opts.grad_tol,
        f_tol: opts.energy_tol,
        max_iter: opts.max_iter,
        ..BfgsOptions::default()
    };
    let report = minimize_bfgs(&mut obj, &DVector::from_column_slice(theta0), &bfgs)?;
    Ok(VqeResult {
        theta_opt: report.x_opt.as_slice().to_vec(),
        energy: report.f_opt,
        iterations: report.iterations,
        termination: report.termination,
        trace: obj.trace,
    })
}
