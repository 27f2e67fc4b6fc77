//! Unconstrained minimizers: BFGS with a Wolfe line search, a shifted Newton step and a
//! Steihaug trust region.

mod bfgs;
mod newton;
mod objective;
mod trust_region;

pub use bfgs::{minimize_bfgs, BfgsOptions};
pub use newton::{newton_step, NewtonStep, NEWTON_MIN_EIGENVALUE};
pub use objective::{EvalCounters, Objective, ObjectiveHandle, OptimizerReport, Termination};
pub use trust_region::{
    steihaug_cg, trust_region_local, trust_region_minimize, LocalModel, TrustRegionOptions,
    TrustRegionOutcome,
};
