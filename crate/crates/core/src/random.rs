//! Seeded random instances for property checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::fermion::FermionHamiltonian;
use crate::rotation::{RdmPair, RotationVector};
use crate::sim::{measure_rdms, EvalLedger, StateVector};
use crate::tensor::Tensor4;

fn unit_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Hamiltonian with `h = h†`, `g_cdef = conj(g_fedc)` and a random constant.
pub fn random_hamiltonian<R: Rng + ?Sized>(
    n_spin_orbitals: usize,
    rng: &mut R,
) -> FermionHamiltonian {
    let n = n_spin_orbitals;
    let a = DMatrix::from_fn(n, n, |_, _| unit_complex(rng));
    let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let raw = Tensor4::from_fn(n, |_, _, _, _| unit_complex(rng));
    let g = Tensor4::from_fn(n, |c, d, e, f| {
        (raw[[c, d, e, f]] + raw[[f, e, d, c]].conj()) * 0.5
    });
    FermionHamiltonian {
        core_energy: rng.random_range(-1.0..1.0),
        one_body: h,
        two_body: g,
    }
}

/// Normalized state with independent uniform real and imaginary parts.
pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<StateVector> {
    let mut amps: Vec<Complex64> = (0..1usize << n_qubits).map(|_| unit_complex(rng)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(n_qubits, amps)
}

/// RDMs of a random state, hence representable.
pub fn random_rdms<R: Rng + ?Sized>(n_spin_orbitals: usize, rng: &mut R) -> Result<RdmPair> {
    let psi = random_state(n_spin_orbitals, rng)?;
    let mut ledger = EvalLedger::new();
    let tag = ledger.fresh_tag();
    measure_rdms(&psi, n_spin_orbitals, &mut ledger, tag)
}

/// Components uniform in `[-scale, scale]`.
pub fn random_rotation<R: Rng + ?Sized>(len: usize, scale: f64, rng: &mut R) -> RotationVector {
    RotationVector((0..len).map(|_| rng.random_range(-scale..scale)).collect())
}
