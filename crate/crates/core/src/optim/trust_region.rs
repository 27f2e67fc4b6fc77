use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::objective::{check_finite, Objective, OptimizerReport, Termination};
use crate::error::{Result, WahtorError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRegionOptions {
    pub radius0: f64,
    pub max_radius: f64,
    /// Minimum actual/predicted reduction ratio for accepting a step.
    pub eta: f64,
    pub grad_tol: f64,
    pub min_radius: f64,
    pub max_iter: usize,
}

impl Default for TrustRegionOptions {
    fn default() -> Self {
        Self {
            radius0: 0.1,
            max_radius: 1.0,
            eta: 0.15,
            grad_tol: 1e-7,
            min_radius: 1e-12,
            max_iter: 500,
        }
    }
}

/// A function explored through steps from a movable expansion point.
pub trait LocalModel {
    fn dim(&self) -> usize;

    fn current_value(&self) -> f64;

    /// Gradient and Hessian at the current point.
    fn gradient_hessian(&mut self) -> Result<(DVector<f64>, DMatrix<f64>)>;

    fn trial_value(&mut self, step: &DVector<f64>) -> Result<f64>;

    /// Moves the expansion point by `step`, whose value was `value`.
    fn accept(&mut self, step: &DVector<f64>, value: f64) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionOutcome {
    pub f_opt: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub termination: Termination,
    pub converged: bool,
    pub accepted_steps: Vec<DVector<f64>>,
    pub history: Vec<f64>,
    pub final_radius: f64,
}

/// `τ ≥ 0` with `‖z + τd‖ = Δ`.
fn to_boundary(z: &DVector<f64>, d: &DVector<f64>, radius: f64) -> f64 {
    let a = d.dot(d);
    let b = 2.0 * z.dot(d);
    let c = z.dot(z) - radius * radius;
    (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a)
}

/// Steihaug truncated conjugate gradient for `min gᵀs + ½ sᵀBs` subject to `‖s‖ ≤ Δ`.
pub fn steihaug_cg(g: &DVector<f64>, b: &DMatrix<f64>, radius: f64) -> DVector<f64> {
    let n = g.len();
    let mut z = DVector::zeros(n);
    let mut r = g.clone();
    let tol = 1e-10 * g.norm();
    if r.norm() <= tol {
        return z;
    }
    let mut d = -&r;
    for _ in 0..2 * n.max(1) {
        let bd = b * &d;
        let dbd = d.dot(&bd);
        if dbd <= 0.0 {
            let tau = to_boundary(&z, &d, radius);
            return z + d * tau;
        }
        let rr = r.dot(&r);
        let alpha = rr / dbd;
        let z_next = &z + &d * alpha;
        if z_next.norm() >= radius {
            let tau = to_boundary(&z, &d, radius);
            return z + d * tau;
        }
        r += bd * alpha;
        z = z_next;
        if r.norm() <= tol {
            break;
        }
        let beta = r.dot(&r) / rr;
        d = -&r + d * beta;
    }
    z
}

pub fn trust_region_local<M: LocalModel + ?Sized>(
    model: &mut M,
    opts: &TrustRegionOptions,
) -> Result<TrustRegionOutcome> {
    let mut radius = opts.radius0;
    let mut f = model.current_value();
    let mut history = vec![f];
    let mut steps = Vec::new();
    let mut derivs: Option<(DVector<f64>, DMatrix<f64>)> = None;
    let mut termination = Termination::MaxIterations;
    let mut gradient_norm = f64::NAN;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if derivs.is_none() {
            let (g, h) = model.gradient_hessian()?;
            if g.iter().chain(h.iter()).any(|v| !v.is_finite()) {
                return Err(WahtorError::NonFinite("trust-region derivatives".into()));
            }
            derivs = Some((g, h));
        }
        let (g, h) = derivs.as_ref().expect("derivatives computed above");
        gradient_norm = g.amax();
        let step = if gradient_norm < opts.grad_tol {
            let eig = SymmetricEigen::new(h.clone());
            let (k, lambda) =
                eig.eigenvalues
                    .iter()
                    .enumerate()
                    .fold(
                        (0, f64::INFINITY),
                        |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc },
                    );
            if lambda >= -1e-10 {
                termination = Termination::GradientTolerance;
                break;
            }
            // stationary with negative curvature: move along it to the boundary
            let v = eig.eigenvectors.column(k).into_owned();
            let sign = if v.dot(g) > 0.0 { -1.0 } else { 1.0 };
            v * (sign * radius)
        } else {
            steihaug_cg(g, h, radius)
        };
        iterations += 1;
        let predicted = -(g.dot(&step) + 0.5 * step.dot(&(h * &step)));
        let mut accepted = false;
        if predicted > 0.0 {
            let trial = check_finite("trust-region trial", model.trial_value(&step)?)?;
            let rho = (f - trial) / predicted;
            if rho < 0.25 {
                radius *= 0.5;
            } else if rho > 0.75 && step.norm() >= 0.99 * radius {
                radius = (2.0 * radius).min(opts.max_radius);
            }
            if rho > opts.eta && trial < f {
                model.accept(&step, trial)?;
                f = trial;
                history.push(f);
                steps.push(step);
                derivs = None;
                accepted = true;
            }
        } else {
            radius *= 0.5;
        }
        if !accepted && radius < opts.min_radius {
            termination = Termination::RadiusCollapsed;
            break;
        }
    }
    Ok(TrustRegionOutcome {
        f_opt: f,
        iterations,
        gradient_norm,
        converged: termination.is_converged(),
        termination,
        accepted_steps: steps,
        history,
        final_radius: radius,
    })
}

/// Adapts an [`Objective`] with analytic gradient and Hessian to a [`LocalModel`].
struct ObjectiveModel<'o, O: Objective + ?Sized> {
    obj: &'o mut O,
    x: DVector<f64>,
    f: f64,
}

impl<O: Objective + ?Sized> LocalModel for ObjectiveModel<'_, O> {
    fn dim(&self) -> usize {
        self.x.len()
    }

    fn current_value(&self) -> f64 {
        self.f
    }

    fn gradient_hessian(&mut self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let missing = || {
            WahtorError::Capability("trust region needs an analytic gradient and Hessian".into())
        };
        let g = self.obj.gradient(&self.x)?.ok_or_else(missing)?;
        let h = self.obj.hessian(&self.x)?.ok_or_else(missing)?;
        Ok((g, h))
    }

    fn trial_value(&mut self, step: &DVector<f64>) -> Result<f64> {
        self.obj.value(&(&self.x + step))
    }

    fn accept(&mut self, step: &DVector<f64>, value: f64) -> Result<()> {
        self.x += step;
        self.f = value;
        self.obj.on_accept(&self.x, value);
        Ok(())
    }
}

pub fn trust_region_minimize<O: Objective + ?Sized>(
    obj: &mut O,
    x0: &DVector<f64>,
    opts: &TrustRegionOptions,
) -> Result<OptimizerReport> {
    let f0 = check_finite("objective", obj.value(x0)?)?;
    let mut model = ObjectiveModel {
        obj,
        x: x0.clone(),
        f: f0,
    };
    let out = trust_region_local(&mut model, opts)?;
    Ok(OptimizerReport {
        x_opt: model.x,
        f_opt: out.f_opt,
        iterations: out.iterations,
        gradient_norm: out.gradient_norm,
        converged: out.converged,
        termination: out.termination,
        history: out.history,
    })
}
