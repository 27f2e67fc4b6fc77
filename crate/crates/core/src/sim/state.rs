use num_complex::Complex64;

use crate::error::{Result, WahtorError};
use crate::qubit::{i_pow, PauliWord};

/// Largest register the dense simulator accepts.
pub const MAX_SIM_QUBITS: usize = 24;

/// Dense amplitudes; bit `q` of the basis index is qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_SIM_QUBITS {
            return Err(WahtorError::Capability(format!(
                "{n_qubits} qubits exceeds the {MAX_SIM_QUBITS}-qubit simulator limit"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits > MAX_SIM_QUBITS || amps.len() != 1 << n_qubits {
            return Err(WahtorError::DimensionMismatch(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero_state(n_qubits)?;
        if index >= s.amps.len() {
            return Err(WahtorError::IndexOutOfRange(format!(
                "basis index {index} on {n_qubits} qubits"
            )));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Ry(θ) = [[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]` on qubit `q`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta * 0.5).sin_cos();
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = a0 * c - a1 * s;
                self.amps[i | bit] = a0 * s + a1 * c;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    /// `P|ψ⟩`
    pub fn apply_word(&self, word: &PauliWord) -> StateVector {
        let (x, z) = (word.x_mask() as usize, word.z_mask() as usize);
        let phase = i_pow(word.y_count());
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (s, &a) in self.amps.iter().enumerate() {
            let sign = if (s & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[s ^ x] = a * phase * sign;
        }
        StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        }
    }

    /// `⟨ψ|P|ψ⟩`, real for any Pauli word up to rounding.
    pub fn word_expectation(&self, word: &PauliWord) -> f64 {
        let (x, z) = (word.x_mask() as usize, word.z_mask() as usize);
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, &a) in self.amps.iter().enumerate() {
            let term = self.amps[s ^ x].conj() * a;
            if (s & z).count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        (acc * i_pow(word.y_count())).re
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}
