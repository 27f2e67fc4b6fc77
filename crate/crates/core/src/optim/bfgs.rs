use nalgebra::{DMatrix, DVector};

use super::objective::{
    check_finite, gradient_given_value, value_and_gradient, Objective, OptimizerReport, Termination,
};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    pub grad_tol: f64,
    pub f_tol: f64,
    pub max_iter: usize,
    /// Forward-difference step used when the objective has no gradient.
    pub fd_step: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            f_tol: 1e-6,
            max_iter: 1000,
            fd_step: 1e-7,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 30,
        }
    }
}

struct Probe {
    alpha: f64,
    f: f64,
    /// Directional derivative and gradient, filled only once the point passes Armijo.
    slope: Option<f64>,
    g: Option<DVector<f64>>,
}

struct LineSearch<'o, O: Objective + ?Sized> {
    obj: &'o mut O,
    x: &'o DVector<f64>,
    p: &'o DVector<f64>,
    f0: f64,
    slope0: f64,
    opts: &'o BfgsOptions,
    evals: usize,
}

impl<O: Objective + ?Sized> LineSearch<'_, O> {
    fn probe(&mut self, alpha: f64) -> Result<Probe> {
        self.evals += 1;
        let xt = self.x + self.p * alpha;
        let f = check_finite("objective", self.obj.value(&xt)?)?;
        Ok(Probe {
            alpha,
            f,
            slope: None,
            g: None,
        })
    }

    fn complete(&mut self, t: &mut Probe) -> Result<f64> {
        let xt = self.x + self.p * t.alpha;
        let g = gradient_given_value(self.obj, &xt, t.f, self.opts.fd_step)?;
        let slope = g.dot(self.p);
        t.slope = Some(slope);
        t.g = Some(g);
        Ok(slope)
    }

    fn armijo_fails(&self, t: &Probe) -> bool {
        t.f > self.f0 + self.opts.c1 * t.alpha * self.slope0
    }

    fn curvature_holds(&self, slope: f64) -> bool {
        slope.abs() <= -self.opts.c2 * self.slope0
    }

    /// Strong-Wolfe bracketing then zoom. `None` when no acceptable point was found.
    fn run(mut self) -> Result<Option<Probe>> {
        let mut prev = Probe {
            alpha: 0.0,
            f: self.f0,
            slope: Some(self.slope0),
            g: None,
        };
        let mut alpha = 1.0;
        for i in 0..self.opts.max_line_search {
            let mut t = self.probe(alpha)?;
            if self.armijo_fails(&t) || (i > 0 && t.f >= prev.f) {
                return self.zoom(prev, t);
            }
            let slope = self.complete(&mut t)?;
            if self.curvature_holds(slope) {
                return Ok(Some(t));
            }
            if slope >= 0.0 {
                return self.zoom(t, prev);
            }
            alpha = 2.0 * t.alpha;
            prev = t;
        }
        Ok(None)
    }

    /// `lo` always carries a slope; `hi` may not.
    fn zoom(&mut self, mut lo: Probe, mut hi: Probe) -> Result<Option<Probe>> {
        while self.evals < self.opts.max_line_search {
            if (hi.alpha - lo.alpha).abs() <= f64::EPSILON * lo.alpha.abs().max(1.0) {
                break;
            }
            let alpha = interpolate(&lo, &hi);
            let mut t = self.probe(alpha)?;
            if self.armijo_fails(&t) || t.f >= lo.f {
                hi = t;
            } else {
                let slope = self.complete(&mut t)?;
                if self.curvature_holds(slope) {
                    return Ok(Some(t));
                }
                if slope * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = t;
            }
        }
        // keep a sufficient-decrease point even if the curvature condition never held
        if lo.alpha > 0.0 && lo.f < self.f0 {
            return Ok(Some(lo));
        }
        Ok(None)
    }
}

/// Safeguarded interpolation of the minimizer between two probes: cubic when both
/// slopes are known, otherwise the quadratic through `lo`'s value and slope and `hi`'s value.
fn interpolate(lo_probe: &Probe, hi_probe: &Probe) -> f64 {
    let (a, b) = (lo_probe, hi_probe);
    let (lo, hi) = (a.alpha.min(b.alpha), a.alpha.max(b.alpha));
    let width = hi - lo;
    let sa = a.slope.unwrap_or(f64::NAN);
    let mut alpha = f64::NAN;
    match b.slope {
        Some(sb) => {
            let d1 = sa + sb - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
            let disc = d1 * d1 - sa * sb;
            if disc >= 0.0 {
                let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
                alpha = b.alpha - (b.alpha - a.alpha) * (sb + d2 - d1) / (sb - sa + 2.0 * d2);
            }
        }
        None => {
            let d = b.alpha - a.alpha;
            let curv = b.f - a.f - sa * d;
            if curv > 0.0 {
                alpha = a.alpha - sa * d * d / (2.0 * curv);
            }
        }
    }
    if !alpha.is_finite() || alpha < lo + 0.1 * width || alpha > hi - 0.1 * width {
        alpha = 0.5 * (lo + hi);
    }
    alpha
}

/// BFGS with a strong-Wolfe line search and the rank-2 inverse-Hessian update.
pub fn minimize_bfgs<O: Objective + ?Sized>(
    obj: &mut O,
    x0: &DVector<f64>,
    opts: &BfgsOptions,
) -> Result<OptimizerReport> {
    let n = x0.len();
    let mut x = x0.clone();
    let (mut f, mut g) = value_and_gradient(obj, &x, opts.fd_step)?;
    let mut h_inv = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;
    let mut history = vec![f];
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if g.amax() < opts.grad_tol {
            termination = Termination::GradientTolerance;
            break;
        }
        let mut p = -(&h_inv * &g);
        let mut slope = p.dot(&g);
        if slope >= 0.0 {
            h_inv = DMatrix::identity(n, n);
            p = -g.clone();
            slope = p.dot(&g);
        }
        let search = LineSearch {
            obj: &mut *obj,
            x: &x,
            p: &p,
            f0: f,
            slope0: slope,
            opts,
            evals: 0,
        };
        let Some((t, t_grad)) = search.run()?.and_then(|t| t.g.clone().map(|g| (t, g))) else {
            termination = Termination::LineSearchFailed;
            break;
        };
        iterations += 1;
        let s = &p * t.alpha;
        let y = &t_grad - &g;
        let df = f - t.f;
        x += &s;
        f = t.f;
        g = t_grad;
        history.push(f);
        obj.on_accept(&x, f);
        if df.abs() < opts.f_tol {
            termination = Termination::FunctionTolerance;
            break;
        }
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if !scaled {
                h_inv *= sy / y.dot(&y);
                scaled = true;
            }
            let rho = 1.0 / sy;
            let hy = &h_inv * &y;
            let yhy = y.dot(&hy);
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ, expanded
            h_inv += (&s * s.transpose()) * (rho * rho * yhy + rho)
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
    }
    Ok(OptimizerReport {
        gradient_norm: g.amax(),
        x_opt: x,
        f_opt: f,
        iterations,
        converged: termination.is_converged(),
        termination,
        history,
    })
}
