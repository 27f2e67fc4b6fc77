//! Arbitrary-order derivatives of the rotated Hamiltonian tensors at `R = 0`.
//!
//! With `A_l = -i T_l` (lifted to both spin blocks), `∂_l h(R)|₀ = [A_l, h]` and the
//! two-body tensor transforms under `A ⊗ I + I ⊗ A`. Higher orders follow from the
//! symmetrized recursion `D(L) = (1/|L|) Σ_k [A_{L_k}, D(L \ L_k)]`, memoized on the
//! sorted index multiset.

use std::collections::HashMap;
use std::rc::Rc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::generators::GeneratorSet;
use crate::error::{Result, WahtorError};
use crate::fermion::FermionHamiltonian;
use crate::tensor::Tensor4;

/// Sparse `(row, col, value)` entries of a spin-orbital matrix.
pub(crate) type Entries = Vec<(usize, usize, Complex64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTensors {
    pub one_body: DMatrix<Complex64>,
    pub two_body: Tensor4,
}

impl DerivativeTensors {
    /// Largest elementwise gap over both tensors.
    pub fn max_abs_diff(&self, other: &DerivativeTensors) -> f64 {
        let one = (&self.one_body - &other.one_body)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        one.max(self.two_body.max_abs_diff(&other.two_body))
    }

    /// `Σ X_ij Y_ij + ½ Σ X_cdef Y_cdef`, the pairing used for energies.
    pub fn pair_with(&self, one_body: &DMatrix<Complex64>, two_body: &Tensor4) -> Complex64 {
        let one: Complex64 = self
            .one_body
            .iter()
            .zip(one_body.iter())
            .map(|(a, b)| a * b)
            .sum();
        one + self.two_body.contract(two_body) * 0.5
    }
}

/// Generator `l` on the spin-orbital space, scaled by `scale`.
pub(crate) fn lifted_entries(gens: &GeneratorSet, l: usize, scale: Complex64) -> Entries {
    let n = gens.n_spatial();
    let mut out = Vec::new();
    if let Some(g) = gens.get(l) {
        for &(r, c, v) in g.entries() {
            out.push((r, c, v * scale));
            out.push((r + n, c + n, v * scale));
        }
    }
    out
}

pub(crate) fn transpose_entries(a: &Entries) -> Entries {
    a.iter().map(|&(r, c, v)| (c, r, v)).collect()
}

/// `[A, X]` for sparse `A`.
pub(crate) fn commutator_matrix(a: &Entries, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = x.nrows();
    let mut out = DMatrix::zeros(n, n);
    for &(r, c, v) in a {
        for j in 0..n {
            out[(r, j)] += v * x[(c, j)];
        }
        for i in 0..n {
            out[(i, c)] -= x[(i, r)] * v;
        }
    }
    out
}

/// `[A ⊗ I + I ⊗ A, G]` for sparse `A`, acting on creation indices from the left and
/// annihilation indices from the right.
pub(crate) fn commutator_tensor(a: &Entries, g: &Tensor4) -> Tensor4 {
    let n = g.dim();
    let src = g.as_slice();
    let mut out = Tensor4::zeros(n);
    let dst = out.as_mut_slice();
    for axis in 0..4 {
        let stride = n.pow(3 - axis as u32);
        let left = axis < 2;
        for &(r, c, v) in a {
            // left axes: out[..r..] += v g[..c..]; right axes: out[..c..] -= g[..r..] v
            let (from, to, sign) = if left { (c, r, 1.0) } else { (r, c, -1.0) };
            let w = v * sign;
            for (o, &x) in src.iter().enumerate() {
                if (o / stride) % n != from || x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                dst[o + to * stride - from * stride] += w * x;
            }
        }
    }
    out
}

pub struct DerivativeEngine<'a> {
    ham: &'a FermionHamiltonian,
    lifted: Vec<Entries>,
    cache: HashMap<Vec<usize>, Rc<DerivativeTensors>>,
}

impl<'a> DerivativeEngine<'a> {
    pub fn new(ham: &'a FermionHamiltonian, gens: &GeneratorSet) -> Result<Self> {
        if ham.n_spatial()? != gens.n_spatial() {
            return Err(WahtorError::DimensionMismatch(format!(
                "generators act on {} orbitals, Hamiltonian has {}",
                gens.n_spatial(),
                ham.n_spatial()?
            )));
        }
        let minus_i = Complex64::new(0.0, -1.0);
        let lifted = (0..gens.len())
            .map(|l| lifted_entries(gens, l, minus_i))
            .collect();
        Ok(Self {
            ham,
            lifted,
            cache: HashMap::new(),
        })
    }

    pub fn n_generators(&self) -> usize {
        self.lifted.len()
    }

    pub fn cached_count(&self) -> usize {
        self.cache.len()
    }

    /// `∂^{|L|} (h(R), g(R)) / ∂R_{L_1} … ∂R_{L_n}` at `R = 0`.
    pub fn derivative(&mut self, order: &[usize]) -> Result<Rc<DerivativeTensors>> {
        if let Some(&l) = order.iter().find(|&&l| l >= self.lifted.len()) {
            return Err(WahtorError::IndexOutOfRange(format!(
                "generator {l} of {}",
                self.lifted.len()
            )));
        }
        let mut key = order.to_vec();
        key.sort_unstable();
        Ok(self.derivative_sorted(key))
    }

    fn derivative_sorted(&mut self, key: Vec<usize>) -> Rc<DerivativeTensors> {
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let result = if key.is_empty() {
            DerivativeTensors {
                one_body: self.ham.one_body.clone(),
                two_body: self.ham.two_body.clone(),
            }
        } else {
            let n = self.ham.n_spin_orbitals();
            let mut one = DMatrix::zeros(n, n);
            let mut two = Tensor4::zeros(n);
            let mut k = 0;
            while k < key.len() {
                // equal indices give equal terms; weight by multiplicity
                let mut run = k + 1;
                while run < key.len() && key[run] == key[k] {
                    run += 1;
                }
                let multiplicity = (run - k) as f64;
                let mut rest = key.clone();
                rest.remove(k);
                let inner = self.derivative_sorted(rest);
                let a = &self.lifted[key[k]];
                let w = Complex64::new(multiplicity / key.len() as f64, 0.0);
                one += commutator_matrix(a, &inner.one_body) * w;
                two.axpy(w, &commutator_tensor(a, &inner.two_body));
                k = run;
            }
            DerivativeTensors {
                one_body: one,
                two_body: two,
            }
        };
        let rc = Rc::new(result);
        self.cache.insert(key, rc.clone());
        rc
    }
}

pub fn derivative_tensors(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    order: &[usize],
) -> Result<DerivativeTensors> {
    let mut engine = DerivativeEngine::new(ham, gens)?;
    Ok((*engine.derivative(order)?).clone())
}

fn check_index(gens: &GeneratorSet, l: usize) -> Result<()> {
    if l >= gens.len() {
        return Err(WahtorError::IndexOutOfRange(format!(
            "generator {l} of {}",
            gens.len()
        )));
    }
    Ok(())
}

/// `-i [T_l, (h, g)]`, written directly with the Hermitian generator.
pub fn first_derivative_closed_form(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    l: usize,
) -> Result<DerivativeTensors> {
    check_index(gens, l)?;
    let t = lifted_entries(gens, l, Complex64::new(1.0, 0.0));
    let minus_i = Complex64::new(0.0, -1.0);
    let mut two = commutator_tensor(&t, &ham.two_body);
    two.scale(minus_i);
    Ok(DerivativeTensors {
        one_body: commutator_matrix(&t, &ham.one_body) * minus_i,
        two_body: two,
    })
}

/// `-½ ([T_a, [T_b, X]] + [T_b, [T_a, X]])`.
pub fn second_derivative_closed_form(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    a: usize,
    b: usize,
) -> Result<DerivativeTensors> {
    check_index(gens, a)?;
    check_index(gens, b)?;
    let one = Complex64::new(1.0, 0.0);
    let ta = lifted_entries(gens, a, one);
    let tb = lifted_entries(gens, b, one);
    let h = commutator_matrix(&ta, &commutator_matrix(&tb, &ham.one_body))
        + commutator_matrix(&tb, &commutator_matrix(&ta, &ham.one_body));
    let mut g = commutator_tensor(&ta, &commutator_tensor(&tb, &ham.two_body));
    g.axpy(
        one,
        &commutator_tensor(&tb, &commutator_tensor(&ta, &ham.two_body)),
    );
    let half = Complex64::new(-0.5, 0.0);
    g.scale(half);
    Ok(DerivativeTensors {
        one_body: h * half,
        two_body: g,
    })
}
