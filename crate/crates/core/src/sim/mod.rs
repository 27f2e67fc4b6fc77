//! Statevector simulation of the Ry/CNOT ansatz, Pauli expectation values, RDM
//! measurement and the Pauli-word evaluation ledger.

mod ansatz;
mod ledger;
mod measure;
mod state;

pub use ansatz::{prepare_state, AnsatzSpec};
pub use ledger::{EvalLedger, ThetaStamper, ThetaTag};
pub use measure::{expectation, measure_rdms, CompiledOperator};
pub use state::{StateVector, MAX_SIM_QUBITS};
