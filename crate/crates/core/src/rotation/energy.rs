use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::derivatives::{
    commutator_matrix, commutator_tensor, lifted_entries, transpose_entries, DerivativeEngine,
    DerivativeTensors,
};
use super::generators::{unitary_exp_minus_identity, GeneratorSet, RotationVector};
use super::transform::{sparse_columns, spin_block_unitary, transform_axis, transform_hamiltonian};
use crate::error::{Result, WahtorError};
use crate::fermion::FermionHamiltonian;
use crate::tensor::Tensor4;

/// Reduced density matrices `D_ij = ⟨a†_i a_j⟩` and `Γ_cdef = ⟨a†_c a†_d a_e a_f⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmPair {
    pub one: DMatrix<Complex64>,
    pub two: Tensor4,
}

impl RdmPair {
    pub fn new(one: DMatrix<Complex64>, two: Tensor4) -> Result<Self> {
        let n = one.nrows();
        if one.ncols() != n || two.dim() != n {
            return Err(WahtorError::DimensionMismatch(format!(
                "1-RDM {}x{} vs 2-RDM dimension {}",
                one.nrows(),
                one.ncols(),
                two.dim()
            )));
        }
        Ok(Self { one, two })
    }

    pub fn n_spin_orbitals(&self) -> usize {
        self.one.nrows()
    }

    pub fn particle_number(&self) -> f64 {
        self.one.trace().re
    }

    /// Largest violation of `D = D†` and `Γ_cdef = conj(Γ_fedc)`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.n_spin_orbitals();
        let mut err = (&self.one - self.one.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        for c in 0..n {
            for d in 0..n {
                for e in 0..n {
                    for f in 0..n {
                        let diff = self.two[[c, d, e, f]] - self.two[[f, e, d, c]].conj();
                        err = err.max(diff.norm());
                    }
                }
            }
        }
        err
    }

    /// Largest violation of `Γ_cdef = -Γ_dcef = -Γ_cdfe`.
    pub fn antisymmetry_error(&self) -> f64 {
        let n = self.n_spin_orbitals();
        let g = &self.two;
        let mut err: f64 = 0.0;
        for c in 0..n {
            for d in 0..n {
                for e in 0..n {
                    for f in 0..n {
                        let v = g[[c, d, e, f]];
                        err = err
                            .max((v + g[[d, c, e, f]]).norm())
                            .max((v + g[[c, d, f, e]]).norm());
                    }
                }
            }
        }
        err
    }
}

fn check_dims(ham: &FermionHamiltonian, rdms: &RdmPair) -> Result<()> {
    if ham.n_spin_orbitals() != rdms.n_spin_orbitals() {
        return Err(WahtorError::DimensionMismatch(format!(
            "Hamiltonian on {} spin orbitals, RDMs on {}",
            ham.n_spin_orbitals(),
            rdms.n_spin_orbitals()
        )));
    }
    Ok(())
}

/// `core + Σ h_ij D_ij + ½ Σ g_cdef Γ_cdef`
pub fn contract_energy(ham: &FermionHamiltonian, rdms: &RdmPair) -> Result<f64> {
    check_dims(ham, rdms)?;
    let t = DerivativeTensors {
        one_body: ham.one_body.clone(),
        two_body: ham.two_body.clone(),
    };
    Ok(ham.core_energy + t.pair_with(&rdms.one, &rdms.two).re)
}

/// Energy of the fixed RDMs under the rotated Hamiltonian `H(R)`.
pub fn energy_at(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    r: &RotationVector,
    rdms: &RdmPair,
) -> Result<f64> {
    check_dims(ham, rdms)?;
    contract_energy(&transform_hamiltonian(ham, gens, r)?, rdms)
}

/// `E(R) − E(0)` for fixed RDMs, formed from `K = U − I` so that small rotations do not
/// lose digits to cancellation. Matches `energy_at(R) − energy_at(0)` up to rounding.
pub fn energy_change(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    r: &RotationVector,
    rdms: &RdmPair,
) -> Result<f64> {
    check_dims(ham, rdms)?;
    gens.check_len(r)?;
    if ham.n_spatial()? != gens.n_spatial() {
        return Err(WahtorError::DimensionMismatch(format!(
            "generators act on {} orbitals, Hamiltonian has {}",
            gens.n_spatial(),
            ham.n_spatial()?
        )));
    }
    if r.0.iter().any(|x| !x.is_finite()) {
        return Err(WahtorError::NonFinite("rotation vector".into()));
    }
    if r.is_zero() {
        return Ok(0.0);
    }
    let k = spin_block_unitary(&unitary_exp_minus_identity(gens.hermitian_sum(r)?));
    let u = &k + DMatrix::<Complex64>::identity(k.nrows(), k.ncols());
    let h = &ham.one_body;
    // U†hU − h = K†h + hK + K†hK
    let kh = k.adjoint() * h;
    let one_body = &kh + h * &k + &kh * &k;
    // U₀U₁U₂U₃ − 1 = K₀ + U₀K₁ + U₀U₁K₂ + U₀U₁U₂K₃, one axis at a time
    let (kcols, ucols) = (sparse_columns(&k), sparse_columns(&u));
    let mut two_body = Tensor4::zeros(k.nrows());
    let mut done = ham.two_body.clone();
    for axis in 0..4 {
        let conj = axis < 2;
        two_body.axpy(
            Complex64::new(1.0, 0.0),
            &transform_axis(&done, axis, &kcols, conj),
        );
        if axis < 3 {
            done = transform_axis(&done, axis, &ucols, conj);
        }
    }
    let delta = DerivativeTensors { one_body, two_body };
    real_part(delta.pair_with(&rdms.one, &rdms.two), "energy change")
}

fn real_part(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > 1e-8 * (1.0 + z.re.abs()) {
        return Err(WahtorError::NumericalConsistency(format!(
            "{what} has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `∂E/∂R_l` at `R = 0`.
pub fn gradient(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    rdms: &RdmPair,
) -> Result<DVector<f64>> {
    check_dims(ham, rdms)?;
    let mut engine = DerivativeEngine::new(ham, gens)?;
    let mut g = DVector::zeros(gens.len());
    for l in 0..gens.len() {
        let d = engine.derivative(&[l])?;
        g[l] = real_part(d.pair_with(&rdms.one, &rdms.two), "gradient")?;
    }
    Ok(g)
}

/// Gradient and symmetric Hessian at `R = 0`.
///
/// The second-order pairing `⟨[A_a, D_b], Γ⟩` is evaluated as `⟨D_b, [A_aᵀ, Γ]⟩`, so only
/// first-order tensors are formed.
pub fn gradient_and_hessian(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    rdms: &RdmPair,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_dims(ham, rdms)?;
    let m = gens.len();
    let mut engine = DerivativeEngine::new(ham, gens)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut firsts = Vec::with_capacity(m);
    let mut adjoints = Vec::with_capacity(m);
    let mut grad = DVector::zeros(m);
    for l in 0..m {
        let d = engine.derivative(&[l])?;
        grad[l] = real_part(d.pair_with(&rdms.one, &rdms.two), "gradient")?;
        let at = transpose_entries(&lifted_entries(gens, l, minus_i));
        adjoints.push((
            commutator_matrix(&at, &rdms.one),
            commutator_tensor(&at, &rdms.two),
        ));
        firsts.push(d);
    }
    let mut hess = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let z = (firsts[b].pair_with(&adjoints[a].0, &adjoints[a].1)
                + firsts[a].pair_with(&adjoints[b].0, &adjoints[b].1))
                * 0.5;
            let v = real_part(z, "Hessian")?;
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    Ok((grad, hess))
}

/// Hessian contracted from the recursively built second-order tensors.
pub fn hessian_from_tensors(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    rdms: &RdmPair,
) -> Result<DMatrix<f64>> {
    check_dims(ham, rdms)?;
    let m = gens.len();
    let mut engine = DerivativeEngine::new(ham, gens)?;
    let mut hess = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let d = engine.derivative(&[a, b])?;
            let v = real_part(d.pair_with(&rdms.one, &rdms.two), "Hessian")?;
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    Ok(hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_change_matches_direct_difference() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let ham = crate::random::random_hamiltonian(6, &mut rng);
        let rdms = crate::random::random_rdms(6, &mut rng).unwrap();
        let gens = crate::rotation::build_generators::<&str>(3, None).unwrap();
        let e0 = energy_at(&ham, &gens, &RotationVector::zeros(9), &rdms).unwrap();
        for scale in [1.0, 1e-2] {
            let r = crate::random::random_rotation(9, scale, &mut rng);
            let direct = energy_at(&ham, &gens, &r, &rdms).unwrap() - e0;
            let change = energy_change(&ham, &gens, &r, &rdms).unwrap();
            assert!((direct - change).abs() < 1e-12, "{direct} vs {change}");
        }
        assert_eq!(
            energy_change(&ham, &gens, &RotationVector::zeros(9), &rdms).unwrap(),
            0.0
        );
    }

    #[test]
    fn rdm_dimensions_are_checked() {
        assert!(RdmPair::new(DMatrix::zeros(2, 2), Tensor4::zeros(3)).is_err());
        let h = FermionHamiltonian::zeros(4);
        let r = RdmPair::new(DMatrix::zeros(2, 2), Tensor4::zeros(2)).unwrap();
        assert!(contract_energy(&h, &r).is_err());
    }

    #[test]
    fn core_energy_survives_contraction() {
        let mut h = FermionHamiltonian::zeros(2);
        h.core_energy = 3.5;
        h.one_body[(0, 0)] = Complex64::new(-1.0, 0.0);
        let mut d = DMatrix::zeros(2, 2);
        d[(0, 0)] = Complex64::new(1.0, 0.0);
        let r = RdmPair::new(d, Tensor4::zeros(2)).unwrap();
        assert_eq!(contract_energy(&h, &r).unwrap(), 2.5);
    }
}
