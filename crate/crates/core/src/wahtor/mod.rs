//! The outer loop: VQE on the current Hamiltonian, then an orbital rotation of the
//! Hamiltonian chosen by one of four strategies, until consecutive VQE energies agree.

mod config;
mod driver;
mod hamopt;
mod trace;

pub use config::{StrategyConfig, StrategyKind};
pub use driver::{run_wahtor, run_wahtor_traced, OuterTermination, WahtorOutcome};
pub use hamopt::{hamopt_step, HamoptOutcome, HamoptStatus, InnerVqe};
pub use trace::{AccumulatedRotation, Stage, TraceRecord, WahtorTrace};
