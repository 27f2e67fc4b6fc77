//! Orbital rotations of a fermionic Hamiltonian and the classical energy model
//! `E(R)` built from fixed reduced density matrices.

mod derivatives;
mod energy;
mod generators;
mod transform;

pub use derivatives::{
    derivative_tensors, first_derivative_closed_form, second_derivative_closed_form,
    DerivativeEngine, DerivativeTensors,
};
pub use energy::{
    contract_energy, energy_at, energy_change, gradient, gradient_and_hessian,
    hessian_from_tensors, RdmPair,
};
pub use generators::{
    build_generators, rotation_matrix, Generator, GeneratorKind, GeneratorSet, RotationVector,
};
pub use transform::{spin_block_unitary, transform_hamiltonian, transform_with_unitary};
