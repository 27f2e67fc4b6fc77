mod common;

use std::f64::consts::PI;
use std::sync::OnceLock;

use common::*;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wahtor::fermion::{build_hubbard_ring, lowest_energy_any_sector};
use wahtor::qubit::{encode, ladder_product};
use wahtor::random::random_hamiltonian;
use wahtor::rotation::{build_generators, rotation_matrix, transform_with_unitary};
use wahtor::sim::{prepare_state, CompiledOperator};
use wahtor::tensor::Tensor4;
use wahtor::validation::{run_validation, ValidationOptions};
use wahtor::vqe::{random_theta, run_vqe};
use wahtor::wahtor::{
    hamopt_step, run_wahtor, HamoptStatus, OuterTermination, Stage, StrategyConfig, StrategyKind,
    WahtorOutcome,
};
use wahtor::{
    AnsatzSpec, EvalLedger, FermionHamiltonian, GeneratorSet, HubbardSpec, PauliWord, RdmPair,
};

const NON_ADIABATIC: [StrategyKind; 3] = [
    StrategyKind::NaTrustRegion,
    StrategyKind::NaNewton,
    StrategyKind::NaBfgs,
];

fn hubbard() -> FermionHamiltonian {
    build_hubbard_ring(&HubbardSpec::new(4, 1.0, 8.0, 8.0)).unwrap()
}

/// Two spatial orbitals, `h = diag(-1, 0.5)` in both spin blocks, no interaction.
fn diagonal_two_orbital() -> FermionHamiltonian {
    let mut ham = FermionHamiltonian::zeros(4);
    for (p, e) in [(0, -1.0), (1, 0.5), (2, -1.0), (3, 0.5)] {
        ham.one_body[(p, p)] = c(e);
    }
    ham
}

/// Ry angles preparing `|0101⟩`: spatial orbital 0 doubly occupied.
const LOWER_ORBITAL_FILLED: [f64; 4] = [PI, 0.0, PI, 0.0];

fn hubbard_run(kind: StrategyKind, seed: u64) -> WahtorOutcome {
    let ansatz = AnsatzSpec::hubbard_ring(4, 7).unwrap();
    let gens = build_generators::<&str>(4, None).unwrap();
    run_wahtor(&hubbard(), &ansatz, &gens, &StrategyConfig::new(kind), seed).unwrap()
}

fn trust_region_run() -> &'static WahtorOutcome {
    static RUN: OnceLock<WahtorOutcome> = OnceLock::new();
    RUN.get_or_init(|| hubbard_run(StrategyKind::NaTrustRegion, 3))
}

#[test]
fn expressible_ground_state_is_a_fixed_point() {
    let ham = diagonal_two_orbital();
    let ansatz = AnsatzSpec::ladder(4, 0).unwrap();
    assert_eq!(ansatz.n_params(), 4);
    let gens = build_generators::<&str>(2, None).unwrap();
    for kind in StrategyKind::ALL {
        let mut cfg = StrategyConfig::new(kind);
        cfg.initial_theta = Some(LOWER_ORBITAL_FILLED.to_vec());
        let out = run_wahtor(&ham, &ansatz, &gens, &cfg, 0).unwrap();
        let records = &out.trace.records;
        assert_eq!(records.len(), 2, "{kind}: {records:?}");
        assert_eq!(records[0].stage, Stage::Vqe);
        assert_eq!(records[1].stage, Stage::Hamopt);
        assert!(records[1].accepted_r_norm < 1e-6);
        assert_eq!(out.termination, OuterTermination::StationaryRotation);
        assert!((out.final_energy + 2.0).abs() < 1e-12);
        assert!(out.rotation.steps.is_empty());
    }
}

#[test]
fn zero_gradient_gives_zero_rotation_for_every_strategy() {
    let ham = diagonal_two_orbital();
    let ansatz = AnsatzSpec::ladder(4, 0).unwrap();
    let gens = build_generators::<&str>(2, None).unwrap();
    for kind in StrategyKind::ALL {
        let mut ledger = EvalLedger::new();
        let cfg = StrategyConfig::new(kind);
        let out = hamopt_step(&ham, &gens, &ansatz, &LOWER_ORBITAL_FILLED, &mut ledger, &cfg).unwrap();
        assert_eq!(out.status, HamoptStatus::Stationary, "{kind}");
        assert_eq!(out.rotation_norm(), 0.0);
        assert_eq!(out.hamiltonian, ham);
    }
}

fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b - b * a
}

/// Same generator in both spin blocks.
fn spin_lift(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i / n == j / n {
            t[(i % n, j % n)]
        } else {
            ZERO
        }
    })
}

fn contract(m: &DMatrix<Complex64>, d1: &DMatrix<Complex64>) -> f64 {
    m.iter().zip(d1.iter()).map(|(a, b)| a * b).sum::<Complex64>().re
}

#[test]
fn newton_step_minimizes_the_quadratic_model() {
    // one-body only; the occupied orbital is coupled to the empty one
    let mut ham = FermionHamiltonian::zeros(4);
    for block in [0, 2] {
        ham.one_body[(block, block)] = c(-1.0);
        ham.one_body[(block + 1, block + 1)] = c(1.0);
        ham.one_body[(block, block + 1)] = c(0.3);
        ham.one_body[(block + 1, block)] = c(0.3);
    }
    let gens = build_generators::<&str>(2, None).unwrap();
    let ansatz = AnsatzSpec::ladder(4, 0).unwrap();
    let mut ledger = EvalLedger::new();
    let cfg = StrategyConfig::new(StrategyKind::NaNewton);
    let out = hamopt_step(&ham, &gens, &ansatz, &LOWER_ORBITAL_FILLED, &mut ledger, &cfg).unwrap();
    assert_eq!(out.status, HamoptStatus::Moved);
    assert!(!out.note.clone().unwrap_or_default().contains("scaled"), "{:?}", out.note);
    assert_eq!(out.rotations.len(), 1);

    // model from nested commutators, E(R) ≈ E₀ + gᵀR + ½RᵀHR
    let d1 = DMatrix::from_fn(4, 4, |i, j| if i == j && i % 2 == 0 { ONE } else { ZERO });
    let ts: Vec<_> = gens.iter().map(|g| spin_lift(&g.matrix(2))).collect();
    let i = Complex64::new(0.0, 1.0);
    let h = &ham.one_body;
    let m = ts.len();
    let g = DVector::from_fn(m, |a, _| contract(&(commutator(&ts[a], h) * -i), &d1));
    let hess = DMatrix::from_fn(m, m, |a, b| {
        let ab = commutator(&ts[a], &commutator(&ts[b], h));
        let ba = commutator(&ts[b], &commutator(&ts[a], h));
        -0.5 * contract(&(ab + ba), &d1)
    });
    let lambda_min = SymmetricEigen::new(hess.clone()).eigenvalues.min();
    let tau = (1e-8 - lambda_min).max(0.0);
    let shifted = &hess + DMatrix::identity(m, m) * tau;
    let expected = shifted.lu().solve(&-&g).unwrap();
    let got = DVector::from_vec(out.rotations[0].0.clone());
    assert!((&got - &expected).amax() < 1e-8, "{got} vs {expected}");
    assert!(out.energy < -2.0);
}

fn random_instance(seed: u64) -> (FermionHamiltonian, AnsatzSpec, Vec<f64>) {
    let ham = random_hamiltonian(4, &mut ChaCha8Rng::seed_from_u64(seed));
    let ansatz = AnsatzSpec::ladder(4, 2).unwrap();
    let theta = random_theta(&ansatz, seed);
    (ham, ansatz, theta)
}

#[test]
fn trust_region_and_bfgs_reach_the_same_frozen_state_minimum() {
    let gens = build_generators::<&str>(2, None).unwrap();
    for seed in 0..4 {
        let (ham, ansatz, theta) = random_instance(seed);
        let mut energies = Vec::new();
        for kind in [StrategyKind::NaTrustRegion, StrategyKind::NaBfgs] {
            let mut ledger = EvalLedger::new();
            let out = hamopt_step(&ham, &gens, &ansatz, &theta, &mut ledger, &StrategyConfig::new(kind)).unwrap();
            energies.push(out.energy);
        }
        assert!((energies[0] - energies[1]).abs() < 1e-6, "seed {seed}: {energies:?}");
    }
}

fn rdm_words(n: usize) -> Vec<PauliWord> {
    let mut words = Vec::new();
    for i in 0..n {
        for j in 0..n {
            words.extend(ladder_product(&[(true, i), (false, j)], n).into_iter().map(|(w, _)| w));
        }
    }
    for p in 0..n {
        for q in p + 1..n {
            for r in 0..n {
                for s in r + 1..n {
                    let ops = [(true, p), (true, q), (false, r), (false, s)];
                    words.extend(ladder_product(&ops, n).into_iter().map(|(w, _)| w));
                }
            }
        }
    }
    words
}

#[test]
fn hamopt_charges_only_unmeasured_rdm_words() {
    let ham = hubbard();
    let op = encode(&ham);
    let ansatz = AnsatzSpec::hubbard_ring(4, 2).unwrap();
    let gens = build_generators::<&str>(4, None).unwrap();
    let theta = random_theta(&ansatz, 5);
    let words = rdm_words(8);
    for kind in NON_ADIABATIC {
        let cfg = StrategyConfig::new(kind);
        let mut ledger = EvalLedger::new();
        // the energy at θ has already been measured
        let tag = ledger.tag_for(&theta);
        let psi = prepare_state(&ansatz, &theta).unwrap();
        CompiledOperator::new(&op).evaluate(&psi, &mut ledger, tag).unwrap();
        let before = ledger.cumulative_count();
        assert_eq!(before, op.measured_word_count() as u64);
        let pending = ledger.uncharged(tag, &words);
        let total = EvalLedger::new().uncharged(tag, &words);
        assert!(pending < total);

        hamopt_step(&ham, &gens, &ansatz, &theta, &mut ledger, &cfg).unwrap();
        let first = ledger.cumulative_count() - before;
        assert!(first > 0 && first <= pending, "{kind}: {first} > {pending}");

        let again = ledger.cumulative_count();
        hamopt_step(&ham, &gens, &ansatz, &theta, &mut ledger, &cfg).unwrap();
        assert_eq!(ledger.cumulative_count(), again, "{kind}");
    }
}

#[test]
fn outer_vqe_energies_do_not_increase() {
    let out = trust_region_run();
    let energies: Vec<f64> = out
        .trace
        .records
        .iter()
        .filter(|r| r.stage == Stage::Vqe && r.note.as_deref() != Some("inner"))
        .map(|r| r.energy)
        .collect();
    assert!(energies.len() >= 2);
    for w in energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-8, "{energies:?}");
    }
}

#[test]
fn rotated_hamiltonians_keep_the_spectrum() {
    let h0 = hubbard();
    let (exact, _) = lowest_energy_any_sector(&h0).unwrap();
    let out = trust_region_run();
    let gens = build_generators::<&str>(4, None).unwrap();
    assert!(!out.rotation.steps.is_empty());
    let mut current = h0.clone();
    for r in &out.rotation.steps {
        current = transform_with_unitary(&current, &rotation_matrix(&gens, r).unwrap()).unwrap();
        let (e, _) = lowest_energy_any_sector(&current).unwrap();
        assert!((e - exact).abs() < 1e-8);
    }
    assert!(current.max_abs_diff(&out.hamiltonian) < 1e-9);
}

#[test]
fn accumulated_rotation_is_the_unitary_product_of_its_steps() {
    let out = trust_region_run();
    let gens = build_generators::<&str>(4, None).unwrap();
    assert!(out.rotation.unitarity_error() < 1e-10);
    let product = out
        .rotation
        .steps
        .iter()
        .fold(DMatrix::identity(4, 4), |u, r| u * rotation_matrix(&gens, r).unwrap());
    assert!(max_abs(&(product - &out.rotation.u_total)) < 1e-10);
    assert!(out.trace.is_count_monotone());
    assert_eq!(out.trace.records.last().unwrap().cumulative_pauli_evals, out.total_pauli_evals);
    assert!(out.final_energy <= out.first_vqe_energy + 1e-9);
}

#[test]
fn hubbard_trust_region_improves_on_plain_vqe() {
    let h0 = hubbard();
    let (exact, _) = lowest_energy_any_sector(&h0).unwrap();
    let out = trust_region_run();

    let ansatz = AnsatzSpec::hubbard_ring(4, 7).unwrap();
    let cfg = StrategyConfig::new(StrategyKind::NaTrustRegion);
    let mut ledger = EvalLedger::new();
    let plain = run_vqe(&encode(&h0), &ansatz, &random_theta(&ansatz, 3), &mut ledger, &cfg.vqe).unwrap();
    eprintln!(
        "plain {:.9} wahtor {:.9} exact {:.9}",
        plain.energy, out.final_energy, exact
    );
    assert_eq!(plain.energy, out.first_vqe_energy);
    assert!(out.final_energy < plain.energy);
    assert!(out.final_energy - exact < plain.energy - exact);
    assert!(out.final_energy >= exact - 1e-8);
}

#[test]
fn non_adiabatic_runs_are_deterministic() {
    let (ham, ansatz, _) = random_instance(9);
    let gens = build_generators::<&str>(2, None).unwrap();
    for kind in NON_ADIABATIC {
        let cfg = StrategyConfig::new(kind);
        let a = run_wahtor(&ham, &ansatz, &gens, &cfg, 4).unwrap();
        let b = run_wahtor(&ham, &ansatz, &gens, &cfg, 4).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.rotation, b.rotation);
    }
}

#[test]
fn mismatched_generators_are_rejected() {
    let ansatz = AnsatzSpec::hubbard_ring(4, 1).unwrap();
    let gens = build_generators::<&str>(3, None).unwrap();
    let cfg = StrategyConfig::new(StrategyKind::NaNewton);
    assert!(run_wahtor(&hubbard(), &ansatz, &gens, &cfg, 0).is_err());
    let mut bad = StrategyConfig::new(StrategyKind::NaNewton);
    bad.initial_theta = Some(vec![0.0; 3]);
    let gens = build_generators::<&str>(4, None).unwrap();
    assert!(run_wahtor(&hubbard(), &ansatz, &gens, &bad, 0).is_err());
}

#[test]
fn validation_suite_passes() {
    let report = run_validation(&ValidationOptions::default()).unwrap();
    for check in &report.checks {
        eprintln!("{check}");
    }
    assert!(report.all_passed());
}

fn flipped_gradient(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    rdms: &RdmPair,
) -> wahtor::Result<DVector<f64>> {
    wahtor::rotation::gradient(ham, gens, rdms).map(|g| -g)
}

#[test]
fn validation_catches_a_sign_flipped_gradient() {
    let opts = ValidationOptions {
        gradient: flipped_gradient,
        ..ValidationOptions::default()
    };
    let report = run_validation(&opts).unwrap();
    assert!(!report.all_passed());
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    assert!(failed.iter().any(|n| n.contains("gradient")), "{failed:?}");
}

#[test]
fn two_body_tensor_is_untouched_by_zero_interaction_rotations() {
    let ham = diagonal_two_orbital();
    let gens = build_generators::<&str>(2, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r = wahtor::random::random_rotation(gens.len(), 0.5, &mut rng);
    let rotated = transform_with_unitary(&ham, &rotation_matrix(&gens, &r).unwrap()).unwrap();
    assert_eq!(rotated.two_body.max_abs_diff(&Tensor4::zeros(4)), 0.0);
    let before = sorted_eigenvalues(&ham.one_body);
    let after = sorted_eigenvalues(&rotated.one_body);
    assert!(before.iter().zip(&after).all(|(a, b)| (a - b).abs() < 1e-12));
}
