use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::ledger::{EvalLedger, ThetaTag};
use super::state::StateVector;
use crate::error::{Result, WahtorError};
use crate::qubit::{i_pow, ladder_product, PauliWord, QubitOperator};
use crate::rotation::RdmPair;
use crate::tensor::Tensor4;

/// Upper bound on precomputed diagonal entries across all groups of one operator.
const TABLE_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone)]
enum GroupKind {
    /// `table[s] = Σ_k c_k i^{#Y_k} (-1)^{|s & z_k|}`
    Table(Vec<Complex64>),
    Terms(Vec<(usize, Complex64)>),
}

#[derive(Debug, Clone)]
struct Group {
    x: usize,
    kind: GroupKind,
}

/// A qubit operator grouped by X-mask for repeated expectation values on one register.
#[derive(Debug, Clone)]
pub struct CompiledOperator {
    n_qubits: usize,
    constant: Complex64,
    words: Vec<PauliWord>,
    groups: Vec<Group>,
}

impl CompiledOperator {
    pub fn new(op: &QubitOperator) -> Self {
        let n = op.n_qubits();
        let mut constant = Complex64::new(0.0, 0.0);
        let mut words = Vec::new();
        let mut by_x: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (w, &c) in op.iter() {
            if w.is_identity() {
                constant += c;
                continue;
            }
            words.push(*w);
            by_x.entry(w.x_mask() as usize)
                .or_default()
                .push((w.z_mask() as usize, c * i_pow(w.y_count())));
        }
        let dim = 1usize << n;
        let tabulate = by_x.len().saturating_mul(dim) <= TABLE_BUDGET;
        let groups = by_x
            .into_iter()
            .map(|(x, terms)| {
                let kind = if tabulate {
                    let table = (0..dim)
                        .map(|s| {
                            terms
                                .iter()
                                .map(|&(z, c)| if (s & z).count_ones() % 2 == 0 { c } else { -c })
                                .sum()
                        })
                        .collect();
                    GroupKind::Table(table)
                } else {
                    GroupKind::Terms(terms)
                };
                Group { x, kind }
            })
            .collect();
        Self {
            n_qubits: n,
            constant,
            words,
            groups,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Non-identity words, the ones a measurement charges.
    pub fn words(&self) -> &[PauliWord] {
        &self.words
    }

    fn raw(&self, psi: &StateVector) -> Complex64 {
        let amps = psi.amplitudes();
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let mut acc = self.constant * norm_sqr;
        for g in &self.groups {
            match &g.kind {
                GroupKind::Table(table) => {
                    for (s, &a) in amps.iter().enumerate() {
                        acc += amps[s ^ g.x].conj() * a * table[s];
                    }
                }
                GroupKind::Terms(terms) => {
                    for &(z, c) in terms {
                        let mut part = Complex64::new(0.0, 0.0);
                        for (s, &a) in amps.iter().enumerate() {
                            let t = amps[s ^ g.x].conj() * a;
                            if (s & z).count_ones() % 2 == 0 {
                                part += t;
                            } else {
                                part -= t;
                            }
                        }
                        acc += part * c;
                    }
                }
            }
        }
        acc
    }

    /// `⟨ψ|O|ψ⟩` without touching any ledger.
    pub fn value(&self, psi: &StateVector) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(WahtorError::DimensionMismatch(format!(
                "{}-qubit state for a {}-qubit operator",
                psi.n_qubits(),
                self.n_qubits
            )));
        }
        let z = self.raw(psi);
        if z.im.abs() > 1e-8 * (1.0 + z.re.abs()) {
            return Err(WahtorError::NumericalConsistency(format!(
                "expectation value has imaginary part {:e}",
                z.im
            )));
        }
        if !z.re.is_finite() {
            return Err(WahtorError::NonFinite("expectation value".into()));
        }
        Ok(z.re)
    }

    /// `⟨ψ|O|ψ⟩`, charging every word not yet evaluated under `tag`.
    pub fn evaluate(
        &self,
        psi: &StateVector,
        ledger: &mut EvalLedger,
        tag: ThetaTag,
    ) -> Result<f64> {
        let v = self.value(psi)?;
        ledger.charge(tag, &self.words);
        Ok(v)
    }
}

pub fn expectation(
    psi: &StateVector,
    op: &QubitOperator,
    ledger: &mut EvalLedger,
    tag: ThetaTag,
) -> Result<f64> {
    CompiledOperator::new(op).evaluate(psi, ledger, tag)
}

/// One- and two-body RDMs of `ψ`, each entry assembled from Pauli-word expectation values.
///
/// Every distinct word is charged once under `tag`, so words already measured at this
/// `θ` (e.g. the Hamiltonian's) add nothing.
pub fn measure_rdms(
    psi: &StateVector,
    n_spin_orbitals: usize,
    ledger: &mut EvalLedger,
    tag: ThetaTag,
) -> Result<RdmPair> {
    let n = n_spin_orbitals;
    if psi.n_qubits() != n {
        return Err(WahtorError::DimensionMismatch(format!(
            "{}-qubit state for {n} spin orbitals",
            psi.n_qubits()
        )));
    }
    let one_terms: Vec<((usize, usize), Vec<(PauliWord, Complex64)>)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ((i, j), ladder_product(&[(true, i), (false, j)], n)))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|c| (c + 1..n).map(move |d| (c, d)))
        .collect();
    let two_terms: Vec<((usize, usize, usize, usize), Vec<(PauliWord, Complex64)>)> = pairs
        .iter()
        .flat_map(|&(c, d)| pairs.iter().map(move |&(e, f)| (c, d, e, f)))
        .map(|(c, d, e, f)| {
            let ops = [(true, c), (true, d), (false, e), (false, f)];
            ((c, d, e, f), ladder_product(&ops, n))
        })
        .collect();

    let mut unique: Vec<PauliWord> = one_terms
        .iter()
        .flat_map(|(_, t)| t.iter())
        .chain(two_terms.iter().flat_map(|(_, t)| t.iter()))
        .map(|(w, _)| *w)
        .collect();
    unique.sort_unstable();
    unique.dedup();
    let values: HashMap<PauliWord, f64> = unique
        .par_iter()
        .map(|w| {
            let v = if w.is_identity() {
                psi.norm().powi(2)
            } else {
                psi.word_expectation(w)
            };
            (*w, v)
        })
        .collect();
    let assemble = |terms: &[(PauliWord, Complex64)]| -> Complex64 {
        terms.iter().map(|(w, c)| c * values[w]).sum()
    };

    let mut one = DMatrix::zeros(n, n);
    for ((i, j), terms) in &one_terms {
        one[(*i, *j)] = assemble(terms);
    }
    let mut two = Tensor4::zeros(n);
    for ((c, d, e, f), terms) in &two_terms {
        let v = assemble(terms);
        two[[*c, *d, *e, *f]] = v;
        two[[*d, *c, *e, *f]] = -v;
        two[[*c, *d, *f, *e]] = -v;
        two[[*d, *c, *f, *e]] = v;
    }
    ledger.charge(tag, &unique);
    RdmPair::new(one, two)
}
