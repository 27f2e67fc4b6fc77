//! Dense rank-4 complex tensor with row-major `(c, d, e, f)` layout.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<Complex64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim.pow(4)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(dim);
        for c in 0..dim {
            for d in 0..dim {
                for e in 0..dim {
                    for g in 0..dim {
                        t[[c, d, e, g]] = f(c, d, e, g);
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn offset(&self, c: usize, d: usize, e: usize, f: usize) -> usize {
        ((c * self.dim + d) * self.dim + e) * self.dim + f
    }

    /// Inverse of [`Tensor4::offset`].
    #[inline]
    pub fn indices(&self, offset: usize) -> [usize; 4] {
        let n = self.dim;
        [
            offset / (n * n * n),
            (offset / (n * n)) % n,
            (offset / n) % n,
            offset % n,
        ]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn max_abs_diff(&self, other: &Tensor4) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: Complex64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: Complex64, other: &Tensor4) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Full contraction `Σ self_cdef · other_cdef` (no conjugation).
    pub fn contract(&self, other: &Tensor4) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Nonzero entries as `(offset, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|(i, v)| (i, *v))
    }
}

impl Index<[usize; 4]> for Tensor4 {
    type Output = Complex64;

    #[inline]
    fn index(&self, [c, d, e, f]: [usize; 4]) -> &Complex64 {
        &self.data[self.offset(c, d, e, f)]
    }
}

impl IndexMut<[usize; 4]> for Tensor4 {
    #[inline]
    fn index_mut(&mut self, [c, d, e, f]: [usize; 4]) -> &mut Complex64 {
        let o = self.offset(c, d, e, f);
        &mut self.data[o]
    }
}
