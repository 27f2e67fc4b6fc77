//! Pauli words, qubit operators and the Jordan-Wigner encoding.

mod jordan_wigner;
mod pauli;

pub use jordan_wigner::{encode, jw_monomial, ladder_product, Monomial};
pub use pauli::{PauliWord, QubitOperator, COEFF_EPS};

pub(crate) use pauli::i_pow;
