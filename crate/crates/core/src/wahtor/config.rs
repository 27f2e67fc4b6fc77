use std::fmt;
use std::str::FromStr;

use crate::error::{Result, WahtorError};
use crate::vqe::VqeOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    /// Steepest descent on Hellmann-Feynman gradients, re-converging the VQE after each step.
    AdiabaticSd,
    /// Trust-region minimization of the frozen-state energy `E(R)`.
    NaTrustRegion,
    /// One shifted Newton step on `E(R)` per outer round.
    NaNewton,
    /// BFGS with finite-difference gradients on `E(R)`.
    NaBfgs,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::AdiabaticSd,
        StrategyKind::NaTrustRegion,
        StrategyKind::NaNewton,
        StrategyKind::NaBfgs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::AdiabaticSd => "adiabatic_sd",
            StrategyKind::NaTrustRegion => "na_trust_region",
            StrategyKind::NaNewton => "na_newton",
            StrategyKind::NaBfgs => "na_bfgs",
        }
    }

    pub fn is_adiabatic(self) -> bool {
        self == StrategyKind::AdiabaticSd
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = WahtorError;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| WahtorError::InvalidSpec(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Outer loop stops when consecutive VQE energies differ by less than this (Hartree).
    pub outer_tol: f64,
    pub max_outer: usize,
    pub sd_step: f64,
    pub sd_inner_max: usize,
    pub trust_radius0: f64,
    pub trust_max_radius: f64,
    pub vqe: VqeOptions,
    /// Starting angles; drawn from the run seed when absent.
    pub initial_theta: Option<Vec<f64>>,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind) -> Self {
        Self {
            kind,
            outer_tol: 1e-6,
            max_outer: 50,
            sd_step: 0.1,
            sd_inner_max: 20,
            trust_radius0: 0.1,
            trust_max_radius: 1.0,
            vqe: VqeOptions::default(),
            initial_theta: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("outer_tol", self.outer_tol),
            ("sd_step", self.sd_step),
            ("trust_radius0", self.trust_radius0),
            ("trust_max_radius", self.trust_max_radius),
            ("vqe.energy_tol", self.vqe.energy_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(WahtorError::InvalidSpec(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.vqe.grad_tol < 0.0 || !self.vqe.grad_tol.is_finite() {
            return Err(WahtorError::InvalidSpec(
                "vqe.grad_tol must be non-negative".into(),
            ));
        }
        if self.max_outer == 0 || self.sd_inner_max == 0 || self.vqe.max_iter == 0 {
            return Err(WahtorError::InvalidSpec(
                "iteration limits must be at least 1".into(),
            ));
        }
        if self.trust_radius0 > self.trust_max_radius {
            return Err(WahtorError::InvalidSpec(
                "trust_radius0 exceeds trust_max_radius".into(),
            ));
        }
        Ok(())
    }
}
