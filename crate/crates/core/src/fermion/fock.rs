//! Dense Fock-space representation and exact diagonalization.
//!
//! Occupation-number states are bit strings with bit `p` set when spin orbital `p`
//! is occupied; `a_p` picks up the sign `(-1)^(occupied orbitals below p)`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::FermionHamiltonian;
use crate::error::{Result, WahtorError};

/// Largest system for which the full `2^N × 2^N` matrix is built.
pub const MAX_DENSE_FOCK_SPIN_ORBITALS: usize = 10;
/// Largest system accepted by the particle-sector solvers.
pub const MAX_SECTOR_SPIN_ORBITALS: usize = 16;

#[inline]
fn annihilate(state: u64, p: usize) -> Option<(u64, f64)> {
    if state >> p & 1 == 0 {
        return None;
    }
    let below = (state & ((1u64 << p) - 1)).count_ones();
    Some((state ^ (1u64 << p), if below % 2 == 0 { 1.0 } else { -1.0 }))
}

#[inline]
fn create(state: u64, p: usize) -> Option<(u64, f64)> {
    if state >> p & 1 == 1 {
        return None;
    }
    let below = (state & ((1u64 << p) - 1)).count_ones();
    Some((state | (1u64 << p), if below % 2 == 0 { 1.0 } else { -1.0 }))
}

struct TermList {
    one: Vec<(usize, usize, Complex64)>,
    two: Vec<([usize; 4], Complex64)>,
}

impl TermList {
    fn new(ham: &FermionHamiltonian) -> Self {
        let n = ham.n_spin_orbitals();
        let mut one = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = ham.one_body[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    one.push((i, j, v));
                }
            }
        }
        let two = ham
            .two_body
            .nonzeros()
            .map(|(o, v)| (ham.two_body.indices(o), v * 0.5))
            .filter(|([c, d, e, f], _)| c != d && e != f)
            .collect();
        Self { one, two }
    }

    /// `H|state⟩` as a list of (basis state, amplitude); the constant is excluded.
    fn apply(&self, state: u64, out: &mut Vec<(u64, Complex64)>) {
        out.clear();
        for &(i, j, v) in &self.one {
            let Some((s1, p1)) = annihilate(state, j) else {
                continue;
            };
            let Some((s2, p2)) = create(s1, i) else {
                continue;
            };
            out.push((s2, v * (p1 * p2)));
        }
        for &([c, d, e, f], v) in &self.two {
            let Some((s1, p1)) = annihilate(state, f) else {
                continue;
            };
            let Some((s2, p2)) = annihilate(s1, e) else {
                continue;
            };
            let Some((s3, p3)) = create(s2, d) else {
                continue;
            };
            let Some((s4, p4)) = create(s3, c) else {
                continue;
            };
            out.push((s4, v * (p1 * p2 * p3 * p4)));
        }
    }
}

/// Full Fock-space matrix, basis index = occupation bit string.
pub fn fock_matrix(ham: &FermionHamiltonian) -> Result<DMatrix<Complex64>> {
    let n = ham.n_spin_orbitals();
    if n > MAX_DENSE_FOCK_SPIN_ORBITALS {
        return Err(WahtorError::Capability(format!(
            "dense Fock matrix limited to {MAX_DENSE_FOCK_SPIN_ORBITALS} spin orbitals, got {n}"
        )));
    }
    let dim = 1usize << n;
    let terms = TermList::new(ham);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut buf = Vec::new();
    for s in 0..dim {
        m[(s, s)] += Complex64::new(ham.core_energy, 0.0);
        terms.apply(s as u64, &mut buf);
        for &(t, amp) in &buf {
            m[(t as usize, s)] += amp;
        }
    }
    Ok(m)
}

/// Sorted eigenvalues of the full Fock-space matrix.
pub fn fock_spectrum(ham: &FermionHamiltonian) -> Result<Vec<f64>> {
    let m = fock_matrix(ham)?;
    Ok(sorted_eigenvalues(m))
}

fn sorted_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Occupation states with `n_up` electrons in the up block and `n_dn` in the down block.
pub fn sector_basis(n_spin_orbitals: usize, n_up: usize, n_dn: usize) -> Vec<u64> {
    let n = n_spin_orbitals / 2;
    let up_mask = (1u64 << n) - 1;
    (0..1u64 << n_spin_orbitals)
        .filter(|s| {
            (s & up_mask).count_ones() as usize == n_up && (s >> n).count_ones() as usize == n_dn
        })
        .collect()
}

/// Matrix of `H` projected onto the span of `basis`.
pub fn sector_matrix(ham: &FermionHamiltonian, basis: &[u64]) -> DMatrix<Complex64> {
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let terms = TermList::new(ham);
    let dim = basis.len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut buf = Vec::new();
    for (col, &s) in basis.iter().enumerate() {
        m[(col, col)] += Complex64::new(ham.core_energy, 0.0);
        terms.apply(s, &mut buf);
        for &(t, amp) in &buf {
            if let Some(&row) = index.get(&t) {
                m[(row, col)] += amp;
            }
        }
    }
    m
}

fn check_sector_size(ham: &FermionHamiltonian) -> Result<usize> {
    let n = ham.n_spin_orbitals();
    if n > MAX_SECTOR_SPIN_ORBITALS {
        return Err(WahtorError::Capability(format!(
            "exact diagonalization limited to {MAX_SECTOR_SPIN_ORBITALS} spin orbitals, got {n}"
        )));
    }
    ham.n_spatial()
}

/// Lowest eigenvalue in the `(n_up, n_dn)` particle sector, constant included.
pub fn exact_ground_energy(ham: &FermionHamiltonian, n_up: usize, n_dn: usize) -> Result<f64> {
    let n = check_sector_size(ham)?;
    if n_up > n || n_dn > n {
        return Err(WahtorError::InvalidSpec(format!(
            "sector ({n_up}, {n_dn}) does not fit {n} spatial orbitals"
        )));
    }
    let basis = sector_basis(ham.n_spin_orbitals(), n_up, n_dn);
    let ev = sorted_eigenvalues(sector_matrix(ham, &basis));
    Ok(ev[0])
}

/// Minimum of [`exact_ground_energy`] over every `(n_up, n_dn)` sector.
///
/// Equals the lowest eigenvalue on the whole Fock space whenever the Hamiltonian
/// conserves both spin populations, which every spin-block-preserving rotation of
/// a Hubbard or molecular Hamiltonian does. Returns the energy and the sector.
pub fn lowest_energy_any_sector(ham: &FermionHamiltonian) -> Result<(f64, (usize, usize))> {
    let n = check_sector_size(ham)?;
    let mut best = (f64::INFINITY, (0, 0));
    for up in 0..=n {
        for dn in 0..=n {
            let e = exact_ground_energy(ham, up, dn)?;
            if e < best.0 {
                best = (e, (up, dn));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor4;

    fn diag_two_orbital(core: f64) -> FermionHamiltonian {
        let mut h = FermionHamiltonian::zeros(2);
        h.one_body[(0, 0)] = Complex64::new(-1.0, 0.0);
        h.one_body[(1, 1)] = Complex64::new(-1.0, 0.0);
        h.core_energy = core;
        h
    }

    #[test]
    fn diagonal_one_body_sector_energy() {
        let e = exact_ground_energy(&diag_two_orbital(0.3), 1, 1).unwrap();
        assert!((e - (-2.0 + 0.3)).abs() < 1e-14);
    }

    #[test]
    fn ladder_signs_follow_lower_occupations() {
        assert_eq!(annihilate(0b101, 2), Some((0b001, -1.0)));
        assert_eq!(annihilate(0b100, 2), Some((0b000, 1.0)));
        assert_eq!(create(0b011, 2), Some((0b111, 1.0)));
        assert_eq!(create(0b001, 1), Some((0b011, -1.0)));
        assert_eq!(create(0b001, 0), None);
    }

    #[test]
    fn capability_limits() {
        let big = FermionHamiltonian::zeros(18);
        assert!(matches!(
            exact_ground_energy(&big, 1, 1),
            Err(WahtorError::Capability(_))
        ));
        assert!(matches!(
            fock_matrix(&FermionHamiltonian::zeros(12)),
            Err(WahtorError::Capability(_))
        ));
    }

    #[test]
    fn sector_dimensions() {
        assert_eq!(sector_basis(8, 2, 2).len(), 36);
        assert_eq!(sector_basis(12, 4, 4).len(), 225);
        assert!(sector_basis(8, 2, 2)
            .iter()
            .all(|s| (s & 0xF).count_ones() == 2 && (s >> 4).count_ones() == 2));
    }

    #[test]
    fn pair_interaction_is_diagonal_number_product() {
        // ½(g_0110 + g_1001) a†a†aa = n_0 n_1 with weight 3
        let mut h = FermionHamiltonian::zeros(2);
        h.two_body = Tensor4::zeros(2);
        h.two_body[[0, 1, 1, 0]] = Complex64::new(3.0, 0.0);
        h.two_body[[1, 0, 0, 1]] = Complex64::new(3.0, 0.0);
        let m = fock_matrix(&h).unwrap();
        assert_eq!(m[(3, 3)].re, 3.0);
        assert_eq!(m[(1, 1)].re, 0.0);
        assert_eq!(m[(2, 2)].re, 0.0);
    }
}
