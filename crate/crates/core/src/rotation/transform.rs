use nalgebra::DMatrix;
use num_complex::Complex64;

use super::generators::{rotation_matrix, GeneratorSet, RotationVector};
use crate::error::{Result, WahtorError};
use crate::fermion::FermionHamiltonian;
use crate::tensor::Tensor4;

/// `diag(U, U)` on the up-block/down-block spin-orbital layout.
pub fn spin_block_unitary(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = u.nrows();
    let mut full = DMatrix::zeros(2 * n, 2 * n);
    full.view_mut((0, 0), (n, n)).copy_from(u);
    full.view_mut((n, n), (n, n)).copy_from(u);
    full
}

/// `out[.. p ..] = Σ_c w(c, p) t[.. c ..]` along one axis, `w = U` or `conj(U)`.
pub(crate) fn transform_axis(
    t: &Tensor4,
    axis: usize,
    cols: &[Vec<(usize, Complex64)>],
    conj: bool,
) -> Tensor4 {
    let n = t.dim();
    let stride = n.pow(3 - axis as u32);
    let src = t.as_slice();
    let mut out = Tensor4::zeros(n);
    for (o, slot) in out.as_mut_slice().iter_mut().enumerate() {
        let p = (o / stride) % n;
        let base = o - p * stride;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, v) in &cols[p] {
            let w = if conj { v.conj() } else { v };
            acc += w * src[base + c * stride];
        }
        *slot = acc;
    }
    out
}

/// Nonzero entries of each column of `m`, as `(row, value)`.
pub(crate) fn sparse_columns(m: &DMatrix<Complex64>) -> Vec<Vec<(usize, Complex64)>> {
    (0..m.ncols())
        .map(|p| {
            (0..m.nrows())
                .filter(|&c| m[(c, p)] != Complex64::new(0.0, 0.0))
                .map(|c| (c, m[(c, p)]))
                .collect()
        })
        .collect()
}

/// `h' = U† h U` and `g'_pqrs = Σ conj(U_cp) conj(U_dq) g_cdef U_er U_fs`, with `U`
/// the spatial unitary replicated on both spin blocks.
pub fn transform_with_unitary(
    ham: &FermionHamiltonian,
    u_spatial: &DMatrix<Complex64>,
) -> Result<FermionHamiltonian> {
    let n_spatial = ham.n_spatial()?;
    if u_spatial.nrows() != n_spatial || u_spatial.ncols() != n_spatial {
        return Err(WahtorError::DimensionMismatch(format!(
            "{}x{} unitary for {n_spatial} spatial orbitals",
            u_spatial.nrows(),
            u_spatial.ncols()
        )));
    }
    let u = spin_block_unitary(u_spatial);
    let cols = sparse_columns(&u);
    let one_body = u.adjoint() * &ham.one_body * &u;
    let g = transform_axis(&ham.two_body, 0, &cols, true);
    let g = transform_axis(&g, 1, &cols, true);
    let g = transform_axis(&g, 2, &cols, false);
    let g = transform_axis(&g, 3, &cols, false);
    FermionHamiltonian::new(ham.core_energy, one_body, g)
}

/// `H(R)` for `U = exp(i Σ R_l T_l)`.
pub fn transform_hamiltonian(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    r: &RotationVector,
) -> Result<FermionHamiltonian> {
    if ham.n_spatial()? != gens.n_spatial() {
        return Err(WahtorError::DimensionMismatch(format!(
            "generators act on {} orbitals, Hamiltonian has {}",
            gens.n_spatial(),
            ham.n_spatial()?
        )));
    }
    transform_with_unitary(ham, &rotation_matrix(gens, r)?)
}
