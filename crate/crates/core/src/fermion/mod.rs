//! Second-quantized Hamiltonians in a spin-orbital basis.
//!
//! Spin-orbital layout is fixed crate-wide: indices `0..n` are spin-up spatial
//! orbitals and `n..2n` the spin-down copies. Two-body tensors use physicist
//! operator ordering,
//!
//! ```text
//! H = Σ h_ij a†_i a_j + ½ Σ g_cdef a†_c a†_d a_e a_f + core_energy
//! ```

mod fcidump;
mod fock;
mod hubbard;

pub use fcidump::{parse_fcidump, parse_fcidump_with_header, write_fcidump, FcidumpHeader};
pub use fock::{
    exact_ground_energy, fock_matrix, fock_spectrum, lowest_energy_any_sector, sector_basis,
    sector_matrix, MAX_DENSE_FOCK_SPIN_ORBITALS, MAX_SECTOR_SPIN_ORBITALS,
};
pub use hubbard::{build_hubbard_ring, HubbardSpec};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WahtorError};
use crate::tensor::Tensor4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Spin-orbital index of spatial orbital `spatial` under the up-block/down-block layout.
#[inline]
pub fn spin_orbital(spatial: usize, spin: Spin, n_spatial: usize) -> usize {
    match spin {
        Spin::Up => spatial,
        Spin::Down => spatial + n_spatial,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionHamiltonian {
    pub core_energy: f64,
    pub one_body: DMatrix<Complex64>,
    pub two_body: Tensor4,
}

impl FermionHamiltonian {
    pub fn new(core_energy: f64, one_body: DMatrix<Complex64>, two_body: Tensor4) -> Result<Self> {
        let n = one_body.nrows();
        if one_body.ncols() != n || two_body.dim() != n {
            return Err(WahtorError::DimensionMismatch(format!(
                "one-body {}x{} vs two-body dimension {}",
                one_body.nrows(),
                one_body.ncols(),
                two_body.dim()
            )));
        }
        Ok(Self {
            core_energy,
            one_body,
            two_body,
        })
    }

    pub fn zeros(n_spin_orbitals: usize) -> Self {
        Self {
            core_energy: 0.0,
            one_body: DMatrix::zeros(n_spin_orbitals, n_spin_orbitals),
            two_body: Tensor4::zeros(n_spin_orbitals),
        }
    }

    #[inline]
    pub fn n_spin_orbitals(&self) -> usize {
        self.one_body.nrows()
    }

    /// Number of spatial orbitals; errors on an odd spin-orbital count.
    pub fn n_spatial(&self) -> Result<usize> {
        let n = self.n_spin_orbitals();
        if n % 2 != 0 {
            return Err(WahtorError::InvalidSpec(format!(
                "{n} spin orbitals cannot be split into up/down blocks"
            )));
        }
        Ok(n / 2)
    }

    /// Largest violation of `h = h†` and `g_cdef = conj(g_fedc)`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.n_spin_orbitals();
        let h = &self.one_body;
        let mut err = (h - h.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let g = &self.two_body;
        for c in 0..n {
            for d in 0..n {
                for e in 0..n {
                    for f in 0..n {
                        let diff = g[[c, d, e, f]] - g[[f, e, d, c]].conj();
                        err = err.max(diff.norm());
                    }
                }
            }
        }
        err
    }

    /// Elementwise maximum difference over both tensors and the constant.
    pub fn max_abs_diff(&self, other: &FermionHamiltonian) -> f64 {
        let dh = (&self.one_body - &other.one_body)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        dh.max(self.two_body.max_abs_diff(&other.two_body))
            .max((self.core_energy - other.core_energy).abs())
    }

    /// Term-wise sum of two Hamiltonians on the same spin-orbital set.
    pub fn sum(&self, other: &FermionHamiltonian) -> Result<FermionHamiltonian> {
        if self.n_spin_orbitals() != other.n_spin_orbitals() {
            return Err(WahtorError::DimensionMismatch(format!(
                "{} vs {} spin orbitals",
                self.n_spin_orbitals(),
                other.n_spin_orbitals()
            )));
        }
        let mut g = self.two_body.clone();
        g.axpy(Complex64::new(1.0, 0.0), &other.two_body);
        Ok(FermionHamiltonian {
            core_energy: self.core_energy + other.core_energy,
            one_body: &self.one_body + &other.one_body,
            two_body: g,
        })
    }
}
