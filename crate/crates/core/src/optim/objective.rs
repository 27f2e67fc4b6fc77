use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, WahtorError};

/// A scalar function with optional analytic derivatives.
///
/// Drivers request [`Objective::value`] at a point before its gradient, and skip the
/// gradient at points a line search rejects on value alone.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&mut self, x: &DVector<f64>) -> Result<f64>;

    /// `None` selects the finite-difference fallback.
    fn gradient(&mut self, _x: &DVector<f64>) -> Result<Option<DVector<f64>>> {
        Ok(None)
    }

    fn hessian(&mut self, _x: &DVector<f64>) -> Result<Option<DMatrix<f64>>> {
        Ok(None)
    }

    /// Called after every accepted step with the new point and value.
    fn on_accept(&mut self, _x: &DVector<f64>, _f: f64) {}
}

pub(crate) fn check_finite(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(WahtorError::NonFinite(format!("{what} evaluated to {v}")))
    }
}

/// Value and gradient at `x`, with a forward-difference gradient when none is supplied.
pub(crate) fn value_and_gradient<O: Objective + ?Sized>(
    obj: &mut O,
    x: &DVector<f64>,
    fd_step: f64,
) -> Result<(f64, DVector<f64>)> {
    let f = check_finite("objective", obj.value(x)?)?;
    let g = gradient_given_value(obj, x, f, fd_step)?;
    Ok((f, g))
}

/// Gradient at `x` where `f = value(x)` is already known.
pub(crate) fn gradient_given_value<O: Objective + ?Sized>(
    obj: &mut O,
    x: &DVector<f64>,
    f: f64,
    fd_step: f64,
) -> Result<DVector<f64>> {
    if let Some(g) = obj.gradient(x)? {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(WahtorError::NonFinite("gradient".into()));
        }
        return Ok(g);
    }
    let mut g = DVector::zeros(x.len());
    let mut xp = x.clone();
    for k in 0..x.len() {
        xp[k] = x[k] + fd_step;
        let fp = check_finite("objective", obj.value(&xp)?)?;
        g[k] = (fp - f) / fd_step;
        xp[k] = x[k];
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounters {
    pub values: usize,
    pub gradients: usize,
    pub hessians: usize,
}

type ValueFn<'a> = Box<dyn FnMut(&DVector<f64>) -> Result<f64> + 'a>;
type GradientFn<'a> = Box<dyn FnMut(&DVector<f64>) -> Result<DVector<f64>> + 'a>;
type HessianFn<'a> = Box<dyn FnMut(&DVector<f64>) -> Result<DMatrix<f64>> + 'a>;

/// Closure-backed [`Objective`] that counts every callback invocation.
pub struct ObjectiveHandle<'a> {
    dim: usize,
    value: ValueFn<'a>,
    gradient: Option<GradientFn<'a>>,
    hessian: Option<HessianFn<'a>>,
    pub counters: EvalCounters,
}

impl<'a> ObjectiveHandle<'a> {
    pub fn new(dim: usize, value: impl FnMut(&DVector<f64>) -> Result<f64> + 'a) -> Self {
        Self {
            dim,
            value: Box::new(value),
            gradient: None,
            hessian: None,
            counters: EvalCounters::default(),
        }
    }

    pub fn with_gradient(
        mut self,
        g: impl FnMut(&DVector<f64>) -> Result<DVector<f64>> + 'a,
    ) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }

    pub fn with_hessian(
        mut self,
        h: impl FnMut(&DVector<f64>) -> Result<DMatrix<f64>> + 'a,
    ) -> Self {
        self.hessian = Some(Box::new(h));
        self
    }
}

impl fmt::Debug for ObjectiveHandle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveHandle")
            .field("dim", &self.dim)
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .field("counters", &self.counters)
            .finish()
    }
}

impl Objective for ObjectiveHandle<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&mut self, x: &DVector<f64>) -> Result<f64> {
        self.counters.values += 1;
        (self.value)(x)
    }

    fn gradient(&mut self, x: &DVector<f64>) -> Result<Option<DVector<f64>>> {
        match &mut self.gradient {
            Some(g) => {
                self.counters.gradients += 1;
                g(x).map(Some)
            }
            None => Ok(None),
        }
    }

    fn hessian(&mut self, x: &DVector<f64>) -> Result<Option<DMatrix<f64>>> {
        match &mut self.hessian {
            Some(h) => {
                self.counters.hessians += 1;
                h(x).map(Some)
            }
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    FunctionTolerance,
    RadiusCollapsed,
    LineSearchFailed,
    MaxIterations,
}

impl Termination {
    /// Whether the stop reflects a met tolerance rather than an exhausted budget or a
    /// failed step.
    pub fn is_converged(self) -> bool {
        matches!(
            self,
            Termination::GradientTolerance
                | Termination::FunctionTolerance
                | Termination::RadiusCollapsed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerReport {
    pub x_opt: DVector<f64>,
    pub f_opt: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    pub termination: Termination,
    /// Objective value after each accepted step, starting with `f(x0)`.
    pub history: Vec<f64>,
}
