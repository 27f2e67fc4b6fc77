//! Wavefunction-adapted Hamiltonians through orbital rotation.
//!
//! The crate alternates a statevector VQE over heuristic ansatz parameters with a
//! classical optimization of single-particle orbital rotations applied to the
//! Hamiltonian. Quantum cost is tracked as the number of distinct Pauli words
//! evaluated per parameter point ([`sim::EvalLedger`]).
//!
//! Layout:
//! - [`fermion`]: second-quantized Hamiltonians, the Hubbard ring, FCIDUMP I/O and
//!   exact diagonalization.
//! - [`rotation`]: orbital-rotation generators, tensor transforms and analytic
//!   derivatives of any order at the origin.
//! - [`qubit`]: Pauli words, qubit operators and the Jordan-Wigner encoding.
//! - [`sim`]: ansatz circuits, statevectors, expectation values, RDM measurement.
//! - [`optim`]: BFGS, Newton and trust-region minimizers.
//! - [`vqe`] and [`wahtor`]: the inner and outer optimization loops.

pub mod error;
pub mod fermion;
pub mod optim;
pub mod qubit;
pub mod random;
pub mod rotation;
pub mod sim;
pub mod tensor;
pub mod validation;
pub mod vqe;
pub mod wahtor;

pub use error::{Result, WahtorError};
pub use fermion::{FermionHamiltonian, HubbardSpec};
pub use qubit::{PauliWord, QubitOperator};
pub use rotation::{GeneratorSet, RdmPair, RotationVector};
pub use sim::{AnsatzSpec, EvalLedger, StateVector};

pub use num_complex::Complex64;
