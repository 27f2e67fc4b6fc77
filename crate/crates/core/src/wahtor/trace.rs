use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::config::StrategyKind;
use crate::rotation::RotationVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Vqe,
    Hamopt,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Vqe => "vqe",
            Stage::Hamopt => "hamopt",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub stage: Stage,
    pub strategy: StrategyKind,
    pub outer_index: usize,
    pub cumulative_pauli_evals: u64,
    pub energy: f64,
    /// Non-identity words of the encoded Hamiltonian in force after this stage.
    pub hamiltonian_word_count: usize,
    pub accepted_r_norm: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WahtorTrace {
    pub records: Vec<TraceRecord>,
}

impl WahtorTrace {
    pub fn vqe_energies(&self) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.stage == Stage::Vqe)
            .map(|r| r.energy)
            .collect()
    }

    pub fn is_count_monotone(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[0].cumulative_pauli_evals <= w[1].cumulative_pauli_evals)
    }
}

/// Ordered product `U₁U₂U₃…` of the step unitaries and the rotations that built them.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatedRotation {
    pub u_total: DMatrix<Complex64>,
    pub steps: Vec<RotationVector>,
}

impl AccumulatedRotation {
    pub fn identity(n_spatial: usize) -> Self {
        Self {
            u_total: DMatrix::identity(n_spatial, n_spatial),
            steps: Vec::new(),
        }
    }

    /// Right-multiplies the step unitary.
    pub fn push(
        &mut self,
        u_step: &DMatrix<Complex64>,
        steps: impl IntoIterator<Item = RotationVector>,
    ) {
        self.u_total = &self.u_total * u_step;
        self.steps.extend(steps);
    }

    pub fn unitarity_error(&self) -> f64 {
        let n = self.u_total.nrows();
        (self.u_total.adjoint() * &self.u_total - DMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}
