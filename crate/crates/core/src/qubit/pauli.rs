use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WahtorError};

/// Coefficients below this magnitude are dropped when merging terms.
pub const COEFF_EPS: f64 = 1e-12;

/// Tensor product of single-qubit Paulis stored as X/Z bit masks.
///
/// Letter encoding per qubit: I = (0,0), X = (1,0), Z = (0,1), Y = (1,1), so the
/// word equals `i^(#Y) · X^x · Z^z`. The textual form puts qubit 0 rightmost.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    n_qubits: u8,
    x: u64,
    z: u64,
}

impl PauliWord {
    pub const MAX_QUBITS: usize = 64;

    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= Self::MAX_QUBITS);
        Self {
            n_qubits: n_qubits as u8,
            x: 0,
            z: 0,
        }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Self {
        assert!(n_qubits <= Self::MAX_QUBITS);
        let mask = if n_qubits == 64 {
            u64::MAX
        } else {
            (1u64 << n_qubits) - 1
        };
        debug_assert!(x & !mask == 0 && z & !mask == 0);
        Self {
            n_qubits: n_qubits as u8,
            x,
            z,
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn letter(&self, qubit: usize) -> char {
        match (self.x >> qubit & 1, self.z >> qubit & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    /// Sets one letter; `'I'`, `'X'`, `'Y'` or `'Z'`.
    pub fn with_letter(mut self, qubit: usize, letter: char) -> Self {
        let bit = 1u64 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        match letter {
            'X' => self.x |= bit,
            'Y' => {
                self.x |= bit;
                self.z |= bit
            }
            'Z' => self.z |= bit,
            _ => {}
        }
        self
    }

    /// `self · other = phase · word`.
    pub fn mul(&self, other: &PauliWord) -> (Complex64, PauliWord) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        let both = (self.x | self.z) & (other.x | other.z);
        let mut power = 0u32;
        let mut rest = both;
        while rest != 0 {
            let q = rest.trailing_zeros();
            rest &= rest - 1;
            let a = letter_index(self.x >> q & 1, self.z >> q & 1);
            let b = letter_index(other.x >> q & 1, other.z >> q & 1);
            if a != b {
                // XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i
                power += if (b + 3 - a) % 3 == 1 { 1 } else { 3 };
            }
        }
        let word = PauliWord {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        (i_pow(power), word)
    }
}

#[inline]
fn letter_index(x: u64, z: u64) -> u32 {
    match (x, z) {
        (1, 0) => 0,
        (1, 1) => 1,
        _ => 2,
    }
}

#[inline]
pub(crate) fn i_pow(power: u32) -> Complex64 {
    match power % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.n_qubits()).rev().map(|q| self.letter(q)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliWord({self})")
    }
}

impl FromStr for PauliWord {
    type Err = WahtorError;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n > Self::MAX_QUBITS {
            return Err(WahtorError::Capability(format!("{n} qubits")));
        }
        let mut w = PauliWord::identity(n);
        for (pos, ch) in s.chars().enumerate() {
            let q = n - 1 - pos;
            match ch {
                'I' | 'X' | 'Y' | 'Z' => w = w.with_letter(q, ch),
                _ => return Err(WahtorError::InvalidSpec(format!("bad Pauli letter `{ch}`"))),
            }
        }
        Ok(w)
    }
}

/// Weighted sum of Pauli words on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliWord, Complex64>,
}

impl QubitOperator {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: impl Into<Complex64>) -> Self {
        let mut op = Self::new(n_qubits);
        op.add_term(PauliWord::identity(n_qubits), coeff.into());
        op.pruned()
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (PauliWord, Complex64)>,
    ) -> Self {
        let mut op = Self::new(n_qubits);
        for (w, c) in terms {
            op.add_term(w, c);
        }
        op.pruned()
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Adds without pruning; call [`QubitOperator::pruned`] when done.
    pub fn add_term(&mut self, word: PauliWord, coeff: Complex64) {
        assert_eq!(word.n_qubits(), self.n_qubits, "register size mismatch");
        *self.terms.entry(word).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= COEFF_EPS);
        self
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &PauliWord> {
        self.terms.keys()
    }

    /// Number of stored terms, identity included.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of words that would need measuring (identity excluded).
    pub fn measured_word_count(&self) -> usize {
        self.terms.keys().filter(|w| !w.is_identity()).count()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let terms = self.terms.iter().map(|(w, c)| (*w, c * s));
        Self::from_terms(self.n_qubits, terms)
    }

    pub fn sum(&self, other: &QubitOperator) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits);
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, *c);
        }
        out.pruned()
    }

    pub fn product(&self, other: &QubitOperator) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits);
        let mut out = Self::new(self.n_qubits);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (phase, w) = wa.mul(wb);
                out.add_term(w, ca * cb * phase);
            }
        }
        out.pruned()
    }

    /// Largest imaginary coefficient part; zero for a Hermitian operator.
    pub fn hermiticity_error(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference over the union of words.
    pub fn max_coeff_diff(&self, other: &QubitOperator) -> f64 {
        let mut err: f64 = 0.0;
        for (w, c) in &self.terms {
            err = err.max((c - other.coefficient(w)).norm());
        }
        for (w, c) in &other.terms {
            if !self.terms.contains_key(w) {
                err = err.max(c.norm());
            }
        }
        err
    }

    /// Dense `2^n` matrix, basis index bit `q` = qubit `q`.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > 12 {
            return Err(WahtorError::Capability(format!(
                "dense operator on {} qubits",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (w, c) in &self.terms {
            let phase = i_pow(w.y_count());
            for s in 0..dim {
                let sign = if (s as u64 & w.z_mask()).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                m[(s ^ w.x_mask() as usize, s)] += c * phase * sign;
            }
        }
        Ok(m)
    }

    /// One line per term: `coeff_real coeff_imag word`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, c) in &self.terms {
            out.push_str(&format!("{:e} {:e} {}\n", c.re, c.im, w));
        }
        out
    }

    pub fn from_text(n_qubits: usize, text: &str) -> Result<Self> {
        let mut op = Self::new(n_qubits);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [re, im, word] = fields[..] else {
                return Err(WahtorError::parse(i + 1, "expected `re im word`"));
            };
            let re: f64 = re
                .parse()
                .map_err(|_| WahtorError::parse(i + 1, "bad real part"))?;
            let im: f64 = im
                .parse()
                .map_err(|_| WahtorError::parse(i + 1, "bad imaginary part"))?;
            let word: PauliWord = word
                .parse()
                .map_err(|e| WahtorError::parse(i + 1, format!("{e}")))?;
            if word.n_qubits() != n_qubits {
                return Err(WahtorError::parse(
                    i + 1,
                    "word length differs from register",
                ));
            }
            op.add_term(word, Complex64::new(re, im));
        }
        Ok(op.pruned())
    }
}
