//! Fast self-checks on random small instances: analytic derivatives against finite
//! differences, derivative recursion against closed forms, spectrum invariance under
//! rotation, and the Jordan-Wigner image against the Fock-space matrix.

use std::fmt;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fermion::{
    build_hubbard_ring, fock_matrix, fock_spectrum, FermionHamiltonian, HubbardSpec,
};
use crate::qubit::encode;
use crate::random::{random_hamiltonian, random_rdms, random_rotation};
use crate::rotation::{
    build_generators, derivative_tensors, energy_change, first_derivative_closed_form, gradient,
    gradient_and_hessian, second_derivative_closed_form, transform_hamiltonian, GeneratorSet,
    RdmPair, RotationVector,
};

/// Signature of the analytic gradient under test.
pub type GradientFn = fn(&FermionHamiltonian, &GeneratorSet, &RdmPair) -> Result<DVector<f64>>;

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Random `(H, rdms)` instances for the derivative checks.
    pub derivative_instances: usize,
    pub fd_step: f64,
    pub gradient: GradientFn,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            derivative_instances: 21,
            fd_step: 1e-4,
            gradient,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error and the tolerance it was held to.
    pub worst: f64,
    pub tolerance: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: worst {:.3e} (tolerance {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, worst: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name,
        // NaN must fail
        passed: worst < tolerance,
        worst,
        tolerance,
    }
}

fn relative(err: f64, scale: f64) -> f64 {
    err / scale.max(1e-12)
}

fn axis(len: usize, l: usize, h: f64) -> RotationVector {
    let mut r = vec![0.0; len];
    r[l] = h;
    RotationVector(r)
}

fn displaced(len: usize, steps: &[(usize, f64)]) -> RotationVector {
    let mut r = vec![0.0; len];
    for &(l, h) in steps {
        r[l] += h;
    }
    RotationVector(r)
}

/// Central differences of `E(R)` around `R = 0`: gradient, then Hessian. Differences
/// are taken from [`energy_change`], which keeps the second differences clear of the
/// rounding floor that subtracting two full energies hits at small steps.
pub fn finite_difference_derivatives(
    ham: &FermionHamiltonian,
    gens: &GeneratorSet,
    rdms: &RdmPair,
    h: f64,
) -> Result<(DVector<f64>, nalgebra::DMatrix<f64>)> {
    let m = gens.len();
    let e = |r: &RotationVector| energy_change(ham, gens, r, rdms);
    let e0 = 0.0;
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for l in 0..m {
        plus[l] = e(&axis(m, l, h))?;
        minus[l] = e(&axis(m, l, -h))?;
    }
    let grad = DVector::from_fn(m, |l, _| (plus[l] - minus[l]) / (2.0 * h));
    let mut hess = nalgebra::DMatrix::zeros(m, m);
    for a in 0..m {
        hess[(a, a)] = (plus[a] - 2.0 * e0 + minus[a]) / (h * h);
        for b in a + 1..m {
            let pp = e(&displaced(m, &[(a, h), (b, h)]))?;
            let pm = e(&displaced(m, &[(a, h), (b, -h)]))?;
            let mp = e(&displaced(m, &[(a, -h), (b, h)]))?;
            let mm = e(&displaced(m, &[(a, -h), (b, -h)]))?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    Ok((grad, hess))
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = ValidationReport::default();

    let mut grad_err: f64 = 0.0;
    let mut hess_err: f64 = 0.0;
    let mut recursion_err: f64 = 0.0;
    for i in 0..opts.derivative_instances {
        let n = 2 + i % 3;
        let ham = random_hamiltonian(2 * n, &mut rng);
        let rdms = random_rdms(2 * n, &mut rng)?;
        let gens = build_generators::<&str>(n, None)?;
        let (fd_g, fd_h) = finite_difference_derivatives(&ham, &gens, &rdms, opts.fd_step)?;
        let g = (opts.gradient)(&ham, &gens, &rdms)?;
        let (_, hess) = gradient_and_hessian(&ham, &gens, &rdms)?;
        grad_err = grad_err.max(relative((&g - &fd_g).amax(), fd_g.amax()));
        hess_err = hess_err.max(relative((&hess - &fd_h).amax(), fd_h.amax()));

        if n == 2 {
            for a in 0..gens.len() {
                let closed = first_derivative_closed_form(&ham, &gens, a)?;
                let rec = derivative_tensors(&ham, &gens, &[a])?;
                recursion_err = recursion_err.max(rec.max_abs_diff(&closed));
                for b in a..gens.len() {
                    let closed = second_derivative_closed_form(&ham, &gens, a, b)?;
                    let rec = derivative_tensors(&ham, &gens, &[a, b])?;
                    recursion_err = recursion_err.max(rec.max_abs_diff(&closed));
                }
            }
        }
    }
    report.checks.push(check(
        "gradient matches central differences",
        grad_err,
        1e-6,
    ));
    report
        .checks
        .push(check("Hessian matches central differences", hess_err, 1e-6));
    report.checks.push(check(
        "derivative recursion matches closed forms",
        recursion_err,
        1e-12,
    ));

    let ham = random_hamiltonian(4, &mut rng);
    let gens = build_generators::<&str>(2, None)?;
    let reference = fock_spectrum(&ham)?;
    let mut spectrum_err: f64 = 0.0;
    for _ in 0..5 {
        let r = random_rotation(gens.len(), 1.0, &mut rng);
        let rotated = fock_spectrum(&transform_hamiltonian(&ham, &gens, &r)?)?;
        for (a, b) in reference.iter().zip(&rotated) {
            spectrum_err = spectrum_err.max((a - b).abs());
        }
    }
    report
        .checks
        .push(check("rotation preserves the spectrum", spectrum_err, 1e-9));

    let mut jw_err: f64 = 0.0;
    let mut systems = vec![
        random_hamiltonian(4, &mut rng),
        random_hamiltonian(4, &mut rng),
    ];
    systems.push(build_hubbard_ring(&HubbardSpec::new(4, 1.0, 8.0, 8.0))?);
    for ham in &systems {
        let diff = encode(ham).to_dense()? - fock_matrix(ham)?;
        jw_err = jw_err.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    report.checks.push(check(
        "Jordan-Wigner image equals the Fock matrix",
        jw_err,
        1e-10,
    ));

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run_validation(&ValidationOptions {
            derivative_instances: 3,
            ..Default::default()
        })
        .unwrap();
        assert!(report.all_passed(), "{:?}", report.checks);
    }

    #[test]
    fn nan_fails() {
        assert!(!check("x", f64::NAN, 1.0).passed);
    }
}
