use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, WahtorError};

/// Smallest eigenvalue the shifted Hessian is guaranteed to have.
pub const NEWTON_MIN_EIGENVALUE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStep {
    pub step: DVector<f64>,
    /// `τ` added to the diagonal before solving; zero for a positive-definite Hessian.
    pub shift: f64,
    pub min_eigenvalue: f64,
    /// The shifted solve failed and `-g` was returned instead.
    pub fallback: bool,
}

/// Solves `(H + τI) s = -g` with `τ = max(0, 1e-8 - λ_min)`.
pub fn newton_step(gradient: &DVector<f64>, hessian: &DMatrix<f64>) -> Result<NewtonStep> {
    let n = gradient.len();
    if hessian.nrows() != n || hessian.ncols() != n {
        return Err(WahtorError::DimensionMismatch(format!(
            "{}x{} Hessian for a gradient of length {n}",
            hessian.nrows(),
            hessian.ncols()
        )));
    }
    if n == 0 {
        return Ok(NewtonStep {
            step: DVector::zeros(0),
            shift: 0.0,
            min_eigenvalue: 0.0,
            fallback: false,
        });
    }
    if hessian
        .iter()
        .chain(gradient.iter())
        .any(|v| !v.is_finite())
    {
        return Ok(NewtonStep {
            step: -gradient,
            shift: 0.0,
            min_eigenvalue: f64::NAN,
            fallback: true,
        });
    }
    let min_eigenvalue = SymmetricEigen::new(hessian.clone()).eigenvalues.min();
    let shift = (NEWTON_MIN_EIGENVALUE - min_eigenvalue).max(0.0);
    let shifted = hessian + DMatrix::identity(n, n) * shift;
    let solved = shifted
        .cholesky()
        .map(|c| c.solve(&-gradient))
        .filter(|s| s.iter().all(|v| v.is_finite()));
    Ok(match solved {
        Some(step) => NewtonStep {
            step,
            shift,
            min_eigenvalue,
            fallback: false,
        },
        None => NewtonStep {
            step: -gradient,
            shift,
            min_eigenvalue,
            fallback: true,
        },
    })
}
