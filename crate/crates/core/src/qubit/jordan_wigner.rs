//! Jordan-Wigner images of fermionic ladder operators.
//!
//! Spin orbital `p` maps to qubit `p`:
//! `a†_p = Z_0 … Z_{p-1} (X_p - iY_p)/2`, `a_p = Z_0 … Z_{p-1} (X_p + iY_p)/2`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{PauliWord, QubitOperator};
use crate::error::{Result, WahtorError};
use crate::fermion::FermionHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monomial {
    /// `a†_i a_j`
    OneBody(usize, usize),
    /// `a†_c a†_d a_e a_f`
    TwoBody(usize, usize, usize, usize),
}

impl Monomial {
    fn ladder(&self) -> Vec<(bool, usize)> {
        match *self {
            Monomial::OneBody(i, j) => vec![(true, i), (false, j)],
            Monomial::TwoBody(c, d, e, f) => vec![(true, c), (true, d), (false, e), (false, f)],
        }
    }
}

/// The two Pauli terms of a single ladder operator.
#[inline]
fn ladder_terms(create: bool, p: usize, n_qubits: usize) -> [(PauliWord, Complex64); 2] {
    let z_string = (1u64 << p) - 1;
    let bit = 1u64 << p;
    let x_word = PauliWord::from_masks(n_qubits, bit, z_string);
    let y_word = PauliWord::from_masks(n_qubits, bit, z_string | bit);
    let y_coeff = if create {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    [(x_word, Complex64::new(0.5, 0.0)), (y_word, y_coeff)]
}

/// Product of ladder operators `(is_creation, index)` from left to right, merged.
///
/// Returns an empty list when the product vanishes identically.
pub fn ladder_product(ops: &[(bool, usize)], n_qubits: usize) -> Vec<(PauliWord, Complex64)> {
    let factors: Vec<[(PauliWord, Complex64); 2]> = ops
        .iter()
        .map(|&(create, p)| ladder_terms(create, p, n_qubits))
        .collect();
    let mut out: Vec<(PauliWord, Complex64)> = Vec::with_capacity(1 << ops.len());
    for choice in 0..1usize << ops.len() {
        let mut word = PauliWord::identity(n_qubits);
        let mut coeff = Complex64::new(1.0, 0.0);
        for (k, factor) in factors.iter().enumerate() {
            let (w, c) = factor[choice >> k & 1];
            let (phase, next) = word.mul(&w);
            word = next;
            coeff *= c * phase;
        }
        match out.iter_mut().find(|(w, _)| *w == word) {
            Some((_, c)) => *c += coeff,
            None => out.push((word, coeff)),
        }
    }
    out.retain(|(_, c)| c.norm() > 1e-15);
    out
}

pub fn jw_monomial(monomial: Monomial, n_qubits: usize) -> Result<QubitOperator> {
    let ops = monomial.ladder();
    if let Some(&(_, p)) = ops.iter().find(|(_, p)| *p >= n_qubits) {
        return Err(WahtorError::IndexOutOfRange(format!(
            "mode {p} on {n_qubits} qubits"
        )));
    }
    Ok(QubitOperator::from_terms(
        n_qubits,
        ladder_product(&ops, n_qubits),
    ))
}

/// Jordan-Wigner image of the full Hamiltonian, constant as the identity term.
pub fn encode(ham: &FermionHamiltonian) -> QubitOperator {
    let n = ham.n_spin_orbitals();
    let mut acc: HashMap<PauliWord, Complex64> = HashMap::new();
    let mut push = |terms: Vec<(PauliWord, Complex64)>, scale: Complex64| {
        for (w, c) in terms {
            *acc.entry(w).or_default() += c * scale;
        }
    };
    for i in 0..n {
        for j in 0..n {
            let v = ham.one_body[(i, j)];
            if v.norm() == 0.0 {
                continue;
            }
            push(ladder_product(&[(true, i), (false, j)], n), v);
        }
    }
    for (offset, v) in ham.two_body.nonzeros() {
        let [c, d, e, f] = ham.two_body.indices(offset);
        if c == d || e == f {
            continue;
        }
        push(
            ladder_product(&[(true, c), (true, d), (false, e), (false, f)], n),
            v * 0.5,
        );
    }
    let mut op = QubitOperator::from_terms(n, acc);
    if ham.core_energy != 0.0 {
        op = op.sum(&QubitOperator::identity(n, ham.core_energy));
    }
    op
}
