use super::state::StateVector;
use crate::error::{Result, WahtorError};

/// Layered Ry/CNOT circuit: an Ry layer on every qubit, then per block the CNOTs of the
/// block's entangler map followed by another Ry layer.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec {
    n_qubits: usize,
    n_blocks: usize,
    maps: Vec<Vec<(usize, usize)>>,
}

impl AnsatzSpec {
    /// Block `k` uses `maps[k % maps.len()]`.
    pub fn new(n_qubits: usize, n_blocks: usize, maps: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(WahtorError::InvalidSpec(
                "ansatz needs at least one qubit".into(),
            ));
        }
        if n_blocks > 0 && maps.is_empty() {
            return Err(WahtorError::InvalidSpec(
                "blocks requested without an entangler map".into(),
            ));
        }
        for &(c, t) in maps.iter().flatten() {
            if c >= n_qubits || t >= n_qubits {
                return Err(WahtorError::IndexOutOfRange(format!(
                    "CNOT ({c}, {t}) on {n_qubits} qubits"
                )));
            }
            if c == t {
                return Err(WahtorError::InvalidSpec(format!(
                    "CNOT with control = target = {c}"
                )));
            }
        }
        Ok(Self {
            n_qubits,
            n_blocks,
            maps,
        })
    }

    /// Nearest-neighbour CNOT ladder `(q, q+1)` in every block.
    pub fn ladder(n_qubits: usize, n_blocks: usize) -> Result<Self> {
        let map = (0..n_qubits.saturating_sub(1))
            .map(|q| (q, q + 1))
            .collect();
        Self::new(n_qubits, n_blocks, vec![map])
    }

    /// Two alternating maps on `2L` qubits: open-chain neighbours within each spin block,
    /// then the on-site up/down pairs `(i, i + L)`.
    pub fn hubbard_ring(n_sites: usize, n_blocks: usize) -> Result<Self> {
        let along: Vec<(usize, usize)> = [0, n_sites]
            .iter()
            .flat_map(|&base| (0..n_sites.saturating_sub(1)).map(move |i| (base + i, base + i + 1)))
            .collect();
        let across: Vec<(usize, usize)> = (0..n_sites).map(|i| (i, i + n_sites)).collect();
        Self::new(2 * n_sites, n_blocks, vec![along, across])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * (self.n_blocks + 1)
    }

    pub fn block_map(&self, k: usize) -> &[(usize, usize)] {
        &self.maps[k % self.maps.len()]
    }

    pub fn maps(&self) -> &[Vec<(usize, usize)>] {
        &self.maps
    }
}

pub fn prepare_state(ansatz: &AnsatzSpec, theta: &[f64]) -> Result<StateVector> {
    if theta.len() != ansatz.n_params() {
        return Err(WahtorError::DimensionMismatch(format!(
            "{} angles for an ansatz with {} parameters",
            theta.len(),
            ansatz.n_params()
        )));
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(WahtorError::NonFinite("ansatz angle".into()));
    }
    let n = ansatz.n_qubits();
    let mut psi = StateVector::zero_state(n)?;
    for (q, &t) in theta[..n].iter().enumerate() {
        psi.apply_ry(q, t);
    }
    for k in 0..ansatz.n_blocks() {
        for &(c, t) in ansatz.block_map(k) {
            psi.apply_cnot(c, t);
        }
        let layer = &theta[(k + 1) * n..(k + 2) * n];
        for (q, &t) in layer.iter().enumerate() {
            psi.apply_ry(q, t);
        }
    }
    Ok(psi)
}
