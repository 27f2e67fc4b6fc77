mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wahtor::fermion::{fock_spectrum, Spin};
use wahtor::qubit::encode;
use wahtor::random::{random_hamiltonian, random_rdms, random_rotation, random_state};
use wahtor::rotation::{
    build_generators, derivative_tensors, energy_at, energy_change, gradient, gradient_and_hessian,
    rotation_matrix, transform_hamiltonian, transform_with_unitary, GeneratorKind,
};
use wahtor::sim::{measure_rdms, CompiledOperator};
use wahtor::tensor::Tensor4;
use wahtor::{EvalLedger, FermionHamiltonian, RdmPair, RotationVector};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn generator_counts() {
    let g = build_generators::<&str>(4, None).unwrap();
    assert_eq!(g.count_kind(GeneratorKind::Symmetric), 10);
    assert_eq!(g.count_kind(GeneratorKind::Antisymmetric), 6);
    assert_eq!(g.len(), 16);
    for t in g.iter() {
        let m = t.matrix(4);
        assert!(max_abs(&(&m - m.adjoint())) < 1e-14);
    }

    let g = build_generators::<&str>(1, None).unwrap();
    assert_eq!(g.len(), 1);
    assert_eq!(g.get(0).unwrap().matrix(1)[(0, 0)], ONE);

    let g = build_generators(3, Some(&["A", "A", "B"])).unwrap();
    assert_eq!(g.count_kind(GeneratorKind::Symmetric), 4);
    assert_eq!(g.count_kind(GeneratorKind::Antisymmetric), 1);
    for t in g.iter() {
        for &(r, col, _) in t.entries() {
            assert!(r == col || (r.min(col), r.max(col)) == (0, 1));
        }
    }
    assert!(build_generators(3, Some(&["A", "B"])).is_err());
}

#[test]
fn rotation_matrix_examples() {
    let g = build_generators::<&str>(3, None).unwrap();
    let u = rotation_matrix(&g, &RotationVector::zeros(g.len())).unwrap();
    assert_eq!(u, DMatrix::identity(3, 3));

    let g1 = build_generators::<&str>(1, None).unwrap();
    let u = rotation_matrix(&g1, &RotationVector(vec![std::f64::consts::PI])).unwrap();
    assert!((u[(0, 0)] + ONE).norm() < 1e-15);

    let g4 = build_generators::<&str>(4, None).unwrap();
    let u = rotation_matrix(&g4, &random_rotation(16, 2.0, &mut rng(1))).unwrap();
    assert!(max_abs(&(u.adjoint() * &u - DMatrix::identity(4, 4))) < 1e-12);
}

#[test]
fn zero_rotation_leaves_tensors_unchanged() {
    let ham = random_hamiltonian(6, &mut rng(2));
    let g = build_generators::<&str>(3, None).unwrap();
    let out = transform_hamiltonian(&ham, &g, &RotationVector::zeros(g.len())).unwrap();
    assert!(ham.max_abs_diff(&out) < 1e-15);
    assert_eq!(out.core_energy, ham.core_energy);
}

#[test]
fn single_orbital_phase_leaves_diagonal_h_unchanged() {
    let mut ham = FermionHamiltonian::zeros(2);
    ham.one_body = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.5), c(-1.5)]));
    let g = build_generators::<&str>(1, None).unwrap();
    for r in [0.3, -2.0, 7.0] {
        let out = transform_hamiltonian(&ham, &g, &RotationVector(vec![r])).unwrap();
        assert!(ham.max_abs_diff(&out) < 1e-14);
    }
}

#[test]
fn rotation_matches_dense_tensor_oracle() {
    // transform = identity + K in the oracle's telescoped form
    let mut r = rng(4);
    let ham = random_hamiltonian(4, &mut r);
    let g = build_generators::<&str>(2, None).unwrap();
    let rot = random_rotation(g.len(), 1.0, &mut r);
    let out = transform_hamiltonian(&ham, &g, &rot).unwrap();
    let k = rotation_minus_identity(&g, &rot);
    let u = &k + DMatrix::identity(4, 4);
    assert!(max_abs(&(&out.one_body - u.adjoint() * &ham.one_body * &u)) < 1e-12);
    let dense = Tensor4::from_fn(4, |p, q, rr, s| {
        let mut acc = ZERO;
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    for d in 0..4 {
                        acc += u[(a, p)].conj() * u[(b, q)].conj() * ham.two_body[[a, b, cc, d]] * u[(cc, rr)] * u[(d, s)];
                    }
                }
            }
        }
        acc
    });
    assert!(out.two_body.max_abs_diff(&dense) < 1e-12);
}

#[test]
fn spin_blocks_are_not_mixed() {
    let g = build_generators::<&str>(3, None).unwrap();
    let zero = FermionHamiltonian::zeros(6);
    let mut only_up = zero.clone();
    only_up.one_body[(0, 1)] = ONE;
    only_up.one_body[(1, 0)] = ONE;
    let out = transform_hamiltonian(&only_up, &g, &random_rotation(9, 1.0, &mut rng(6))).unwrap();
    let dn = wahtor::fermion::spin_orbital(0, Spin::Down, 3);
    for i in 0..6 {
        for j in 0..6 {
            if i >= dn || j >= dn {
                assert!(out.one_body[(i, j)].norm() < 1e-15);
            }
        }
    }
}

#[test]
fn derivative_order_is_symmetric() {
    let ham = random_hamiltonian(4, &mut rng(7));
    let g = build_generators::<&str>(2, None).unwrap();
    for a in 0..g.len() {
        for b in 0..g.len() {
            let ab = derivative_tensors(&ham, &g, &[a, b]).unwrap();
            let ba = derivative_tensors(&ham, &g, &[b, a]).unwrap();
            assert_eq!(ab.max_abs_diff(&ba), 0.0);
        }
    }
}

#[test]
fn identity_generator_has_zero_derivative() {
    let ham = random_hamiltonian(2, &mut rng(8));
    let g = build_generators::<&str>(1, None).unwrap();
    let d = derivative_tensors(&ham, &g, &[0]).unwrap();
    assert!(max_abs(&d.one_body) < 1e-15);
    assert!(d.two_body.max_abs() < 1e-15);
}

#[test]
fn first_derivative_matches_tensor_finite_differences() {
    let ham = random_hamiltonian(4, &mut rng(9));
    let g = build_generators::<&str>(2, None).unwrap();
    let h = 1e-4;
    for l in 0..g.len() {
        let mut plus = vec![0.0; g.len()];
        let mut minus = plus.clone();
        plus[l] = h;
        minus[l] = -h;
        let hp = transform_hamiltonian(&ham, &g, &RotationVector(plus)).unwrap();
        let hm = transform_hamiltonian(&ham, &g, &RotationVector(minus)).unwrap();
        let fd_one = (&hp.one_body - &hm.one_body) / c(2.0 * h);
        let mut fd_two = hp.two_body.clone();
        fd_two.axpy(-ONE, &hm.two_body);
        fd_two.scale(c(1.0 / (2.0 * h)));
        let d = derivative_tensors(&ham, &g, &[l]).unwrap();
        let scale = max_abs(&fd_one).max(fd_two.max_abs());
        let err = max_abs(&(&d.one_body - &fd_one)).max(d.two_body.max_abs_diff(&fd_two));
        assert!(err / scale < 1e-6, "generator {l}: {err} / {scale}");
    }
}

#[test]
fn energy_at_origin_equals_statevector_expectation() {
    let mut r = rng(10);
    for n in [4, 6] {
        let ham = random_hamiltonian(n, &mut r);
        let psi = random_state(n, &mut r).unwrap();
        let (d1, d2) = direct_rdms(&psi, n);
        let g = build_generators::<&str>(n / 2, None).unwrap();
        let rdms = RdmPair::new(d1, d2).unwrap();
        let e = energy_at(&ham, &g, &RotationVector::zeros(g.len()), &rdms).unwrap();
        let expect = CompiledOperator::new(&encode(&ham)).value(&psi).unwrap();
        assert!((e - expect).abs() < 1e-9, "{e} vs {expect}");

        let mut ledger = EvalLedger::new();
        let tag = ledger.fresh_tag();
        let measured = measure_rdms(&psi, n, &mut ledger, tag).unwrap();
        assert!(max_abs(&(&measured.one - &rdms.one)) < 1e-12);
        assert!(measured.two.max_abs_diff(&rdms.two) < 1e-12);
    }
}

#[test]
fn energy_of_occupied_diagonal_orbitals() {
    let mut ham = FermionHamiltonian::zeros(4);
    let diag = [-2.0, 0.5, -1.0, 3.0];
    for (i, v) in diag.iter().enumerate() {
        ham.one_body[(i, i)] = c(*v);
    }
    ham.core_energy = 0.25;
    let occ = [1.0, 0.0, 1.0, 1.0];
    let d1 = DMatrix::from_fn(4, 4, |i, j| if i == j { c(occ[i]) } else { ZERO });
    let rdms = RdmPair::new(d1, Tensor4::zeros(4)).unwrap();
    let g = build_generators::<&str>(2, None).unwrap();
    let e = energy_at(&ham, &g, &RotationVector::zeros(4), &rdms).unwrap();
    assert!((e - (-2.0 - 1.0 + 3.0 + 0.25)).abs() < 1e-15);
}

#[test]
fn zero_rdms_give_zero_derivatives() {
    let ham = random_hamiltonian(6, &mut rng(11));
    let g = build_generators::<&str>(3, None).unwrap();
    let rdms = RdmPair::new(DMatrix::zeros(6, 6), Tensor4::zeros(6)).unwrap();
    let (grad, hess) = gradient_and_hessian(&ham, &g, &rdms).unwrap();
    assert_eq!(grad.amax(), 0.0);
    assert_eq!(hess.amax(), 0.0);
}

#[test]
fn hessian_is_exactly_symmetric() {
    let mut r = rng(12);
    let ham = random_hamiltonian(6, &mut r);
    let rdms = random_rdms(6, &mut r).unwrap();
    let g = build_generators::<&str>(3, None).unwrap();
    let (_, hess) = gradient_and_hessian(&ham, &g, &rdms).unwrap();
    assert_eq!(hess, hess.transpose());
}

#[test]
fn composed_rotations_equal_product_unitary() {
    let mut r = rng(13);
    let ham = random_hamiltonian(6, &mut r);
    let g = build_generators::<&str>(3, None).unwrap();
    let r1 = random_rotation(9, 1.0, &mut r);
    let r2 = random_rotation(9, 1.0, &mut r);
    let twice = transform_hamiltonian(&transform_hamiltonian(&ham, &g, &r1).unwrap(), &g, &r2).unwrap();
    let u = rotation_matrix(&g, &r1).unwrap() * rotation_matrix(&g, &r2).unwrap();
    let once = transform_with_unitary(&ham, &u).unwrap();
    assert!(twice.max_abs_diff(&once) < 1e-12);
    let a = fock_spectrum(&twice).unwrap();
    let b = fock_spectrum(&ham).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_is_rotation_invariant(seed in any::<u64>(), scale in 0.1f64..3.0) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(4, &mut r);
        let g = build_generators::<&str>(2, None).unwrap();
        let rot = random_rotation(g.len(), scale, &mut r);
        let a = sorted_eigenvalues(&fock_matrix_oracle(&transform_hamiltonian(&ham, &g, &rot).unwrap()));
        let b = sorted_eigenvalues(&fock_matrix_oracle(&ham));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn derivatives_match_oracle_differences(seed in any::<u64>(), n in 2usize..5) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(2 * n, &mut r);
        let rdms = random_rdms(2 * n, &mut r).unwrap();
        let g = build_generators::<&str>(n, None).unwrap();
        let (fd_g, fd_h) = fd_gradient_hessian(&ham, &g, &rdms.one, &rdms.two, 1e-4);
        let (grad, hess) = gradient_and_hessian(&ham, &g, &rdms).unwrap();
        prop_assert!(rel_err(&grad, &fd_g) < 1e-6);
        prop_assert!(rel_err_mat(&hess, &fd_h) < 1e-6);
        prop_assert!((gradient(&ham, &g, &rdms).unwrap() - &grad).amax() < 1e-12);
    }

    #[test]
    fn energy_change_matches_oracle(seed in any::<u64>(), scale in 1e-3f64..2.0) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(6, &mut r);
        let rdms = random_rdms(6, &mut r).unwrap();
        let g = build_generators::<&str>(3, None).unwrap();
        let rot = random_rotation(g.len(), scale, &mut r);
        let lib = energy_change(&ham, &g, &rot, &rdms).unwrap();
        let oracle = energy_change_oracle(&ham, &g, &rot, &rdms.one, &rdms.two);
        let direct = energy_at(&ham, &g, &rot, &rdms).unwrap()
            - energy_at(&ham, &g, &RotationVector::zeros(g.len()), &rdms).unwrap();
        prop_assert!((lib - oracle).abs() < 1e-11 * (1.0 + oracle.abs()));
        prop_assert!((lib - direct).abs() < 1e-10 * (1.0 + direct.abs()));
    }

    #[test]
    fn measured_rdms_satisfy_their_invariants(seed in any::<u64>()) {
        let psi = random_state(6, &mut rng(seed)).unwrap();
        let mut ledger = EvalLedger::new();
        let tag = ledger.fresh_tag();
        let rdms = measure_rdms(&psi, 6, &mut ledger, tag).unwrap();
        prop_assert!(rdms.hermiticity_error() < 1e-10);
        prop_assert!(rdms.antisymmetry_error() < 1e-10);
        let number: f64 = psi
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * b.count_ones() as f64)
            .sum();
        prop_assert!((rdms.particle_number() - number).abs() < 1e-8);
    }
}
