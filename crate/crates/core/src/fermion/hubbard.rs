use std::collections::BTreeSet;

use num_complex::Complex64;

use super::{spin_orbital, FermionHamiltonian, Spin};
use crate::error::{Result, WahtorError};

/// Hubbard ring with an on-site particle-number penalty.
///
/// `H = -t Σ_<ij>,σ (a†_iσ a_jσ + h.c.) + V Σ_i n_i↑ n_i↓ + μ Σ_i (n_i - target)²`
#[derive(Debug, Clone, PartialEq)]
pub struct HubbardSpec {
    pub n_sites: usize,
    pub hopping: f64,
    pub on_site: f64,
    pub chem_penalty: f64,
    /// Site occupation the penalty is centred on; 2.0 unless overridden.
    pub penalty_target: f64,
}

impl HubbardSpec {
    pub fn new(n_sites: usize, hopping: f64, on_site: f64, chem_penalty: f64) -> Self {
        Self {
            n_sites,
            hopping,
            on_site,
            chem_penalty,
            penalty_target: 2.0,
        }
    }

    pub fn with_penalty_target(mut self, target: f64) -> Self {
        self.penalty_target = target;
        self
    }

    /// Undirected ring edges `i ↔ (i+1) mod L`, deduplicated (L = 2 has a single bond).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let l = self.n_sites;
        let set: BTreeSet<(usize, usize)> = (0..l)
            .map(|i| {
                let j = (i + 1) % l;
                (i.min(j), i.max(j))
            })
            .collect();
        set.into_iter().collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(WahtorError::InvalidSpec(format!(
                "Hubbard ring needs at least 2 sites, got {}",
                self.n_sites
            )));
        }
        let finite = [
            self.hopping,
            self.on_site,
            self.chem_penalty,
            self.penalty_target,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(WahtorError::InvalidSpec(
                "non-finite Hubbard parameter".into(),
            ));
        }
        Ok(())
    }
}

/// Expands the ring Hamiltonian into one- and two-body tensors.
///
/// The penalty uses `n_iσ² = n_iσ`:
/// `μ(n_i - m)² = μ(1 - 2m)(n_i↑ + n_i↓) + 2μ n_i↑ n_i↓ + μ m²`.
pub fn build_hubbard_ring(spec: &HubbardSpec) -> Result<FermionHamiltonian> {
    spec.validate()?;
    let l = spec.n_sites;
    let mut ham = FermionHamiltonian::zeros(2 * l);
    let t = Complex64::new(spec.hopping, 0.0);

    for (i, j) in spec.edges() {
        for spin in [Spin::Up, Spin::Down] {
            let p = spin_orbital(i, spin, l);
            let q = spin_orbital(j, spin, l);
            ham.one_body[(p, q)] -= t;
            ham.one_body[(q, p)] -= t;
        }
    }

    let mu = spec.chem_penalty;
    let m = spec.penalty_target;
    let diag = Complex64::new(mu * (1.0 - 2.0 * m), 0.0);
    let pair = Complex64::new(spec.on_site + 2.0 * mu, 0.0);
    for i in 0..l {
        let up = spin_orbital(i, Spin::Up, l);
        let dn = spin_orbital(i, Spin::Down, l);
        ham.one_body[(up, up)] += diag;
        ham.one_body[(dn, dn)] += diag;
        // n_p n_q = a†_p a†_q a_q a_p for p != q; both orderings carry the weight
        // so that the ½ prefactor gives it back once.
        ham.two_body[[up, dn, dn, up]] += pair;
        ham.two_body[[dn, up, up, dn]] += pair;
    }
    ham.core_energy = mu * m * m * l as f64;
    Ok(ham)
}
