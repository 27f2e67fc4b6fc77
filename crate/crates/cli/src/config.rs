//! Flat `key = value` experiment files with dotted section keys.
//!
//! ```text
//! # Hubbard ring, all strategies
//! system.type = hubbard
//! system.sites = 4
//! system.hopping = 1
//! system.on_site = 8
//! system.penalty = 8
//! ansatz.blocks = 7
//! strategy.list = adiabatic_sd, na_trust_region, na_newton, na_bfgs
//! vqe.seed = 7
//! output.dir = out
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use wahtor::fermion::{
    build_hubbard_ring, parse_fcidump_with_header, FermionHamiltonian, HubbardSpec,
};
use wahtor::sim::AnsatzSpec;
use wahtor::vqe::VqeOptions;
use wahtor::wahtor::{StrategyConfig, StrategyKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line of the offending entry, when there is one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Hubbard(HubbardSpec),
    Fcidump(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnsatzKind {
    /// Nearest-neighbour bonds within each spin ring, alternating with rung bonds.
    HubbardRing,
    /// CNOT chain `0→1→…→N−1` in every block.
    Ladder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub ansatz: AnsatzKind,
    pub blocks: usize,
    pub strategies: Vec<StrategyKind>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub count_gradients: bool,
    pub outer_tol: f64,
    pub max_outer: usize,
    pub sd_step: f64,
    pub sd_inner_max: usize,
    pub trust_radius0: f64,
    pub trust_max_radius: f64,
    pub vqe_energy_tol: f64,
    pub vqe_max_iter: usize,
}

/// A parsed system ready to run.
#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub hamiltonian: FermionHamiltonian,
    pub ansatz: AnsatzSpec,
    /// `(n_up, n_dn)` the physical ground state lives in, when the input says.
    pub sector: Option<(usize, usize)>,
}

const KEYS: &[&str] = &[
    "system.type",
    "system.sites",
    "system.hopping",
    "system.on_site",
    "system.penalty",
    "system.penalty_target",
    "system.path",
    "ansatz.type",
    "ansatz.blocks",
    "strategy.list",
    "vqe.seed",
    "vqe.energy_tol",
    "vqe.max_iter",
    "vqe.count_gradients",
    "wahtor.outer_tol",
    "wahtor.max_outer",
    "wahtor.sd_step",
    "wahtor.sd_inner_max",
    "wahtor.trust_radius0",
    "wahtor.trust_max_radius",
    "output.dir",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(
                    Some(line_no),
                    format!("expected 'key = value', got '{line}'"),
                ));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(err(Some(line_no), format!("unknown key '{key}'")));
            }
            if map
                .insert(key.to_string(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(err(Some(line_no), format!("duplicate key '{key}'")));
            }
        }
        Ok(Self { map })
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => v
                .parse()
                .map_err(|_| err(Some(line), format!("cannot parse '{v}' for {key}"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        let (line, v) = self
            .raw(key)
            .ok_or_else(|| err(None, format!("missing {key}")))?;
        v.parse()
            .map_err(|_| err(Some(line), format!("cannot parse '{v}' for {key}")))
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.raw(key).map(|(l, _)| l)
    }
}

impl ExperimentConfig {
    /// Parses a config; relative paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let e = Entries::parse(text)?;
        let system_type: String = e.require("system.type")?;
        let (system, default_ansatz, default_blocks) = match system_type.as_str() {
            "hubbard" => {
                let spec = HubbardSpec::new(
                    e.get("system.sites", 4)?,
                    e.get("system.hopping", 1.0)?,
                    e.get("system.on_site", 8.0)?,
                    e.get("system.penalty", 8.0)?,
                )
                .with_penalty_target(e.get("system.penalty_target", 2.0)?);
                (SystemSpec::Hubbard(spec), AnsatzKind::HubbardRing, 7)
            }
            "fcidump" => {
                let p: String = e.require("system.path")?;
                (SystemSpec::Fcidump(base_dir.join(p)), AnsatzKind::Ladder, 2)
            }
            other => {
                return Err(err(
                    e.line("system.type"),
                    format!("system.type must be 'hubbard' or 'fcidump', got '{other}'"),
                ))
            }
        };
        let ansatz = match e.raw("ansatz.type") {
            None => default_ansatz,
            Some((_, "hubbard_ring")) => AnsatzKind::HubbardRing,
            Some((_, "ladder")) => AnsatzKind::Ladder,
            Some((line, other)) => {
                return Err(err(
                    Some(line),
                    format!("ansatz.type must be 'hubbard_ring' or 'ladder', got '{other}'"),
                ))
            }
        };
        let strategies = match e.raw("strategy.list") {
            None => StrategyKind::ALL.to_vec(),
            Some((line, list)) => {
                let mut out = Vec::new();
                for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let k: StrategyKind = name
                        .parse()
                        .map_err(|_| err(Some(line), format!("unknown strategy '{name}'")))?;
                    if !out.contains(&k) {
                        out.push(k);
                    }
                }
                if out.is_empty() {
                    return Err(err(Some(line), "strategy.list is empty"));
                }
                out
            }
        };
        let output_dir: String = e.get("output.dir", "wahtor-out".to_string())?;
        let cfg = Self {
            system,
            ansatz,
            blocks: e.get("ansatz.blocks", default_blocks)?,
            strategies,
            seed: e.get("vqe.seed", 0)?,
            output_dir: base_dir.join(output_dir),
            count_gradients: e.get("vqe.count_gradients", true)?,
            outer_tol: e.get("wahtor.outer_tol", 1e-6)?,
            max_outer: e.get("wahtor.max_outer", 50)?,
            sd_step: e.get("wahtor.sd_step", 0.1)?,
            sd_inner_max: e.get("wahtor.sd_inner_max", 20)?,
            trust_radius0: e.get("wahtor.trust_radius0", 0.1)?,
            trust_max_radius: e.get("wahtor.trust_max_radius", 1.0)?,
            vqe_energy_tol: e.get("vqe.energy_tol", 1e-6)?,
            vqe_max_iter: e.get("vqe.max_iter", 2000)?,
        };
        cfg.strategy_config(cfg.strategies[0])
            .validate()
            .map_err(|x| err(None, x.to_string()))?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|x| err(None, format!("cannot read {}: {x}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn strategy_config(&self, kind: StrategyKind) -> StrategyConfig {
        StrategyConfig {
            outer_tol: self.outer_tol,
            max_outer: self.max_outer,
            sd_step: self.sd_step,
            sd_inner_max: self.sd_inner_max,
            trust_radius0: self.trust_radius0,
            trust_max_radius: self.trust_max_radius,
            vqe: VqeOptions {
                energy_tol: self.vqe_energy_tol,
                max_iter: self.vqe_max_iter,
                count_gradients: self.count_gradients,
                ..VqeOptions::default()
            },
            ..StrategyConfig::new(kind)
        }
    }

    /// Builds the Hamiltonian and ansatz; failures here are configuration errors.
    pub fn load(&self) -> Result<LoadedSystem, ConfigError> {
        let (hamiltonian, sector) = match &self.system {
            SystemSpec::Hubbard(spec) => {
                let h = build_hubbard_ring(spec).map_err(|x| err(None, x.to_string()))?;
                let half = spec.n_sites / 2;
                (h, (spec.n_sites % 2 == 0).then_some((half, half)))
            }
            SystemSpec::Fcidump(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|x| err(None, format!("cannot read {}: {x}", path.display())))?;
                let (header, h) = parse_fcidump_with_header(&text)
                    .map_err(|x| err(None, format!("{}: {x}", path.display())))?;
                (h, header.spin_populations())
            }
        };
        let n = hamiltonian.n_spin_orbitals();
        let ansatz = match self.ansatz {
            AnsatzKind::Ladder => AnsatzSpec::ladder(n, self.blocks),
            AnsatzKind::HubbardRing => AnsatzSpec::hubbard_ring(n / 2, self.blocks),
        }
        .map_err(|x| err(None, x.to_string()))?;
        Ok(LoadedSystem {
            hamiltonian,
            ansatz,
            sector,
        })
    }
}
