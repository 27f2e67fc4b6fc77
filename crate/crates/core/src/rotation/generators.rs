use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, WahtorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `E_jk + E_kj` (just `E_jj` on the diagonal)
    Symmetric,
    /// `i(E_jk - E_kj)`
    Antisymmetric,
}

/// One Hermitian basis matrix of the spatial rotation algebra, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub pair: (usize, usize),
    entries: Vec<(usize, usize, Complex64)>,
}

impl Generator {
    fn new(kind: GeneratorKind, j: usize, k: usize) -> Self {
        let entries = match kind {
            GeneratorKind::Symmetric if j == k => vec![(j, j, Complex64::new(1.0, 0.0))],
            GeneratorKind::Symmetric => vec![
                (j, k, Complex64::new(1.0, 0.0)),
                (k, j, Complex64::new(1.0, 0.0)),
            ],
            GeneratorKind::Antisymmetric => vec![
                (j, k, Complex64::new(0.0, 1.0)),
                (k, j, Complex64::new(0.0, -1.0)),
            ],
        };
        Self {
            kind,
            pair: (j, k),
            entries,
        }
    }

    /// Nonzero `(row, col, value)` entries on the spatial orbitals.
    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn matrix(&self, n_spatial: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(n_spatial, n_spatial);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

/// Ordered generator list: symmetric pairs `j ≤ k` first, then antisymmetric `j < k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    n_spatial: usize,
    generators: Vec<Generator>,
    irrep_mask: Option<Vec<String>>,
}

pub fn build_generators<S: AsRef<str>>(
    n_spatial: usize,
    irrep_mask: Option<&[S]>,
) -> Result<GeneratorSet> {
    if n_spatial == 0 {
        return Err(WahtorError::InvalidSpec(
            "at least one spatial orbital required".into(),
        ));
    }
    let mask: Option<Vec<String>> =
        irrep_mask.map(|m| m.iter().map(|s| s.as_ref().to_string()).collect());
    if let Some(m) = &mask {
        if m.len() != n_spatial {
            return Err(WahtorError::InvalidSpec(format!(
                "irrep mask has {} labels for {n_spatial} orbitals",
                m.len()
            )));
        }
    }
    let allowed = |j: usize, k: usize| mask.as_ref().is_none_or(|m| m[j] == m[k]);
    let mut generators = Vec::new();
    for j in 0..n_spatial {
        for k in j..n_spatial {
            if allowed(j, k) {
                generators.push(Generator::new(GeneratorKind::Symmetric, j, k));
            }
        }
    }
    for j in 0..n_spatial {
        for k in j + 1..n_spatial {
            if allowed(j, k) {
                generators.push(Generator::new(GeneratorKind::Antisymmetric, j, k));
            }
        }
    }
    Ok(GeneratorSet {
        n_spatial,
        generators,
        irrep_mask: mask,
    })
}

impl GeneratorSet {
    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn get(&self, l: usize) -> Option<&Generator> {
        self.generators.get(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter()
    }

    pub fn irrep_mask(&self) -> Option<&[String]> {
        self.irrep_mask.as_deref()
    }

    pub fn count_kind(&self, kind: GeneratorKind) -> usize {
        self.generators.iter().filter(|g| g.kind == kind).count()
    }

    /// `Σ_l R_l T_l`
    pub fn hermitian_sum(&self, r: &RotationVector) -> Result<DMatrix<Complex64>> {
        self.check_len(r)?;
        let mut m = DMatrix::zeros(self.n_spatial, self.n_spatial);
        for (g, &coef) in self.generators.iter().zip(r.as_slice()) {
            for &(row, col, v) in g.entries() {
                m[(row, col)] += v * coef;
            }
        }
        Ok(m)
    }

    pub(crate) fn check_len(&self, r: &RotationVector) -> Result<()> {
        if r.len() != self.len() {
            return Err(WahtorError::DimensionMismatch(format!(
                "rotation vector of length {} for {} generators",
                r.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// Real coefficients of the generators, one per generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationVector(pub Vec<f64>);

impl RotationVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

impl From<Vec<f64>> for RotationVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// `U = exp(i Σ R_l T_l)` on the spatial orbitals, via eigendecomposition of the
/// Hermitian exponent.
pub fn rotation_matrix(gens: &GeneratorSet, r: &RotationVector) -> Result<DMatrix<Complex64>> {
    gens.check_len(r)?;
    if r.0.iter().any(|x| !x.is_finite()) {
        return Err(WahtorError::NonFinite("rotation vector".into()));
    }
    let n = gens.n_spatial();
    if r.is_zero() {
        return Ok(DMatrix::identity(n, n));
    }
    unitary_exp(gens.hermitian_sum(r)?)
}

/// `exp(iX)` for Hermitian `X`.
pub(crate) fn unitary_exp(x: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let eig = SymmetricEigen::new(x);
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(0.0, l).exp()));
    Ok(v * phases * v.adjoint())
}

/// `exp(iX) − I` for Hermitian `X`, accurate when `X` is small.
pub(crate) fn unitary_exp_minus_identity(x: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(x);
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| {
        let s = (0.5 * l).sin();
        Complex64::new(-2.0 * s * s, l.sin())
    }));
    v * phases * v.adjoint()
}
