//! Reference implementations used as test oracles. They share no code with the library
//! beyond plain data types: Fock-space operators are applied bit by bit, Jordan-Wigner
//! matrices are built from Kronecker products, and rotated energies are computed with
//! dense index loops.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use wahtor::rotation::{GeneratorSet, RotationVector};
use wahtor::tensor::Tensor4;
use wahtor::{FermionHamiltonian, StateVector};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Applies ladder operators right to left to an occupation bitstring. The sign of `a_p`
/// and `a†_p` counts occupied modes below `p`.
pub fn ladder_apply(ops: &[(bool, usize)], bits: u64) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    let mut state = bits;
    for &(create, p) in ops.iter().rev() {
        let occupied = state >> p & 1 == 1;
        if occupied == create {
            return None;
        }
        if (state & ((1u64 << p) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        state ^= 1 << p;
    }
    Some((sign, state))
}

/// Matrix of `H` on the full Fock space, one basis column at a time.
pub fn fock_matrix_oracle(ham: &FermionHamiltonian) -> DMatrix<Complex64> {
    let n = ham.n_spin_orbitals();
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(col, col)] += c(ham.core_energy);
        for i in 0..n {
            for j in 0..n {
                let h = ham.one_body[(i, j)];
                if h == ZERO {
                    continue;
                }
                if let Some((s, row)) = ladder_apply(&[(true, i), (false, j)], col as u64) {
                    m[(row as usize, col)] += h * s;
                }
            }
        }
        for (off, g) in ham.two_body.nonzeros() {
            let [p, q, r, t] = ham.two_body.indices(off);
            if let Some((s, row)) = ladder_apply(&[(true, p), (true, q), (false, r), (false, t)], col as u64) {
                m[(row as usize, col)] += g * (0.5 * s);
            }
        }
    }
    m
}

/// Occupation bitstrings with `n_up` bits among the first half and `n_dn` among the second.
pub fn sector_states(n_spin_orbitals: usize, n_up: usize, n_dn: usize) -> Vec<u64> {
    let half = n_spin_orbitals / 2;
    let mask = (1u64 << half) - 1;
    (0..1u64 << n_spin_orbitals)
        .filter(|b| (b & mask).count_ones() as usize == n_up && (b >> half).count_ones() as usize == n_dn)
        .collect()
}

pub fn restrict(m: &DMatrix<Complex64>, states: &[u64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(states.len(), states.len(), |i, j| m[(states[i] as usize, states[j] as usize)])
}

/// Lowest eigenvalue of a Hermitian matrix by power iteration on `sI − M`, with `s` a
/// Gershgorin bound so the target becomes the dominant eigenvalue.
pub fn power_iteration_lowest(m: &DMatrix<Complex64>) -> f64 {
    let dim = m.nrows();
    let shift = (0..dim)
        .map(|i| (0..dim).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let shifted = DMatrix::<Complex64>::identity(dim, dim) * c(shift) - m;
    // deterministic start with weight on every basis vector
    let mut v = DVector::from_fn(dim, |i, _| Complex64::new(1.0 + 0.1 * (i as f64).sin(), 0.01 * i as f64));
    v /= c(v.norm());
    let mut lambda = f64::NAN;
    for _ in 0..2_000_000 {
        let w = &shifted * &v;
        let next = v.dotc(&w).re;
        v = &w / c(w.norm());
        if (next - lambda).abs() < 1e-14 * next.abs().max(1.0) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    shift - lambda
}

/// `⟨ψ|a†_i a_j|ψ⟩` and `⟨ψ|a†_c a†_d a_e a_f|ψ⟩` by direct action on amplitudes.
pub fn direct_rdms(psi: &StateVector, n: usize) -> (DMatrix<Complex64>, Tensor4) {
    let amps = psi.amplitudes();
    let expect = |ops: &[(bool, usize)]| -> Complex64 {
        let mut acc = ZERO;
        for (b, a) in amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            if let Some((s, out)) = ladder_apply(ops, b as u64) {
                acc += amps[out as usize].conj() * a * s;
            }
        }
        acc
    };
    let d1 = DMatrix::from_fn(n, n, |i, j| expect(&[(true, i), (false, j)]));
    let d2 = Tensor4::from_fn(n, |p, q, r, t| expect(&[(true, p), (true, q), (false, r), (false, t)]));
    (d1, d2)
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Dense Jordan-Wigner image of `a_p` (or `a†_p`) on `n` qubits: `Z` on every qubit below
/// `p`, `|0⟩⟨1|` (or `|1⟩⟨0|`) on `p`. Qubit 0 is the least significant index bit.
pub fn jw_ladder_dense(p: usize, n: usize, create: bool) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let z = DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    let lower = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let op = if create { lower.transpose() } else { lower };
    let mut m = DMatrix::<Complex64>::identity(1, 1);
    for q in (0..n).rev() {
        let factor = match q.cmp(&p) {
            std::cmp::Ordering::Less => &z,
            std::cmp::Ordering::Equal => &op,
            std::cmp::Ordering::Greater => &id,
        };
        m = kron(&m, factor);
    }
    m
}

/// `H` assembled from products of dense Jordan-Wigner ladder matrices.
pub fn jw_hamiltonian_dense(ham: &FermionHamiltonian) -> DMatrix<Complex64> {
    let n = ham.n_spin_orbitals();
    let dim = 1 << n;
    let cre: Vec<_> = (0..n).map(|p| jw_ladder_dense(p, n, true)).collect();
    let ann: Vec<_> = (0..n).map(|p| jw_ladder_dense(p, n, false)).collect();
    let mut m = DMatrix::<Complex64>::identity(dim, dim) * c(ham.core_energy);
    for i in 0..n {
        for j in 0..n {
            let h = ham.one_body[(i, j)];
            if h != ZERO {
                m += &cre[i] * &ann[j] * h;
            }
        }
    }
    for (off, g) in ham.two_body.nonzeros() {
        let [p, q, r, t] = ham.two_body.indices(off);
        m += &cre[p] * &cre[q] * &ann[r] * &ann[t] * (g * 0.5);
    }
    m
}

/// `exp(iX) − I` on the spatial orbitals for `X = Σ R_l T_l`, replicated on both spin blocks.
pub fn rotation_minus_identity(gens: &GeneratorSet, r: &RotationVector) -> DMatrix<Complex64> {
    let n = gens.n_spatial();
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    for (l, rl) in r.0.iter().enumerate() {
        x += gens.get(l).expect("generator index").matrix(n) * c(*rl);
    }
    let eig = SymmetricEigen::new(x);
    let phase = eig.eigenvalues.map(|l| {
        let s = (0.5 * l).sin();
        Complex64::new(-2.0 * s * s, l.sin())
    });
    let k = &eig.eigenvectors * DMatrix::from_diagonal(&phase) * eig.eigenvectors.adjoint();
    let mut full = DMatrix::zeros(2 * n, 2 * n);
    full.view_mut((0, 0), (n, n)).copy_from(&k);
    full.view_mut((n, n), (n, n)).copy_from(&k);
    full
}

/// `out[..p..] = Σ_c w_cp t[..c..]` on `axis`, with `w = conj(M)` on the first two axes.
fn apply_axis(t: &Tensor4, m: &DMatrix<Complex64>, axis: usize) -> Tensor4 {
    let n = t.dim();
    Tensor4::from_fn(n, |i0, i1, i2, i3| {
        let mut idx = [i0, i1, i2, i3];
        let p = idx[axis];
        let mut acc = ZERO;
        for cidx in 0..n {
            let w = if axis < 2 { m[(cidx, p)].conj() } else { m[(cidx, p)] };
            if w == ZERO {
                continue;
            }
            idx[axis] = cidx;
            acc += w * t[idx];
        }
        acc
    })
}

/// `E(R) − E(0)` for fixed RDMs, telescoped through `K = U − I` to avoid cancellation.
pub fn energy_change_oracle(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    r: &RotationVector,
    d1: &DMatrix<Complex64>,
    d2: &Tensor4,
) -> f64 {
    let k = rotation_minus_identity(gens, r);
    let u = &k + DMatrix::<Complex64>::identity(k.nrows(), k.ncols());
    let h = &ham.one_body;
    let dh = k.adjoint() * h + h * &k + k.adjoint() * h * &k;
    let mut e = ZERO;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            e += dh[(i, j)] * d1[(i, j)];
        }
    }
    let mut done = ham.two_body.clone();
    let mut dg = Tensor4::zeros(done.dim());
    for axis in 0..4 {
        dg.axpy(ONE, &apply_axis(&done, &k, axis));
        done = apply_axis(&done, &u, axis);
    }
    e += dg.contract(d2) * 0.5;
    e.re
}

/// Central-difference gradient and Hessian of `R ↦ E(R)` at the origin.
pub fn fd_gradient_hessian(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    d1: &DMatrix<Complex64>,
    d2: &Tensor4,
    h: f64,
) -> (DVector<f64>, DMatrix<f64>) {
    let m = gens.len();
    let e = |steps: &[(usize, f64)]| {
        let mut r = vec![0.0; m];
        for &(l, s) in steps {
            r[l] += s;
        }
        energy_change_oracle(ham, gens, &RotationVector(r), d1, d2)
    };
    let plus: Vec<f64> = (0..m).map(|l| e(&[(l, h)])).collect();
    let minus: Vec<f64> = (0..m).map(|l| e(&[(l, -h)])).collect();
    let grad = DVector::from_fn(m, |l, _| (plus[l] - minus[l]) / (2.0 * h));
    let mut hess = DMatrix::zeros(m, m);
    for a in 0..m {
        hess[(a, a)] = (plus[a] + minus[a]) / (h * h);
        for b in a + 1..m {
            let v = (e(&[(a, h), (b, h)]) - e(&[(a, h), (b, -h)]) - e(&[(a, -h), (b, h)]) + e(&[(a, -h), (b, -h)]))
                / (4.0 * h * h);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    (grad, hess)
}

/// `‖a − b‖∞ / ‖b‖∞`.
pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1e-300)
}

pub fn rel_err_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1e-300)
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn sorted_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
