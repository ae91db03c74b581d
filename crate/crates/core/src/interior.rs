//! Primal-dual interior-point Newton method for smooth convex objectives on
//! the polytope `{x : Ax ⪯ c·1, x ⪰ 0}` with `A` an `M×K` nonnegative matrix.
//!
//! Each step solves the Newton system of the barrier-perturbed KKT conditions
//! at `t = μ·(M+K)/η`, with `η` the surrogate duality gap, reduced to the
//! `K×K` system `(∇²φ + Gᵀ diag(λ/(−f)) G) Δx = −(r_dual + Gᵀ(r_cent/f))`
//! where `G = [A; −I]` and `f = Gx − h < 0`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::solver::SolverReport;
use crate::RMatrix;

/// Smooth convex objective on the positive orthant.
pub(crate) trait Objective {
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// Tuning of the primal-dual iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorPointOptions {
    /// Growth factor of `t` relative to `(M+K)/η`.
    pub mu: f64,
    /// Surrogate gap the initial multipliers are chosen to produce.
    pub initial_gap: f64,
    pub fraction_to_boundary: f64,
    /// Stop once the dual residual is below `tol·(1 + ‖∇φ‖)` and the surrogate gap below `tol·(1 + |φ|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Required relative decrease of the residual norm per unit step.
    pub residual_slope: f64,
    pub shrink: f64,
}

impl Default for InteriorPointOptions {
    fn default() -> Self {
        InteriorPointOptions {
            mu: 50.0,
            initial_gap: 0.03,
            fraction_to_boundary: 0.999,
            tol: 1e-9,
            max_iter: 60,
            residual_slope: 0.01,
            shrink: 0.5,
        }
    }
}

struct Polytope<'a> {
    a: &'a RMatrix,
    cap: f64,
}

impl Polytope<'_> {
    fn count(&self) -> usize {
        self.a.nrows() + self.a.ncols()
    }

    /// `f = Gx − h`.
    fn slack(&self, x: &DVector<f64>) -> DVector<f64> {
        let ax = self.a * x;
        let mut f = DVector::zeros(self.count());
        let m = self.a.nrows();
        for i in 0..m {
            f[i] = ax[i] - self.cap;
        }
        for j in 0..x.len() {
            f[m + j] = -x[j];
        }
        f
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let ax = self.a * x;
        let mut out = DVector::zeros(self.count());
        out.rows_mut(0, ax.len()).copy_from(&ax);
        out.rows_mut(ax.len(), x.len()).copy_from(&(-x));
        out
    }

    fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        let m = self.a.nrows();
        let k = self.a.ncols();
        self.a.tr_mul(&v.rows(0, m).into_owned()) - v.rows(m, k)
    }

    /// `Gᵀ diag(d) G`.
    fn weighted_gram(&self, d: &DVector<f64>) -> DMatrix<f64> {
        let m = self.a.nrows();
        let k = self.a.ncols();
        let mut scaled = self.a.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= d[i];
        }
        let mut out = self.a.tr_mul(&scaled);
        for j in 0..k {
            out[(j, j)] += d[m + j];
        }
        out
    }
}

pub(crate) struct Outcome {
    pub x: DVector<f64>,
    pub report: SolverReport,
}

/// Minimizes `obj` over `{x : Ax ⪯ cap, x ⪰ 0}` from a strictly feasible `x0`.
pub(crate) fn minimize<O: Objective>(
    obj: &O,
    a: &RMatrix,
    cap: f64,
    x0: DVector<f64>,
    opts: &InteriorPointOptions,
) -> Outcome {
    let poly = Polytope { a, cap };
    let n_con = poly.count() as f64;
    let mut x = x0;
    let mut f = poly.slack(&x);
    let mut lambda = f.map(|fi| -opts.initial_gap / (n_con * fi));
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let eta = -f.dot(&lambda);
        let t = opts.mu * n_con / eta;
        let residual = |x: &DVector<f64>, f: &DVector<f64>, l: &DVector<f64>| {
            let rd = obj.gradient(x) + poly.apply_transpose(l);
            let rc = l.component_mul(f).map(|v| -v - 1.0 / t);
            (rd, rc)
        };
        let (rd, rc) = residual(&x, &f, &lambda);
        let grad_scale = 1.0 + obj.gradient(&x).norm();
        if rd.norm() < opts.tol * grad_scale && eta < opts.tol * (1.0 + obj.value(&x).abs()) {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }

        let d = lambda.zip_map(&f, |l, fi| l / -fi);
        let h = obj.hessian(&x) + poly.weighted_gram(&d);
        let rhs = -(&rd + poly.apply_transpose(&rc.component_div(&f)));
        let dx = match Cholesky::new(h.clone()) {
            Some(c) => c.solve(&rhs),
            None => match h.lu().solve(&rhs) {
                Some(v) => v,
                None => break,
            },
        };
        let gdx = poly.apply(&dx);
        let dlambda = (&rc - lambda.component_mul(&gdx)).component_div(&f);

        let mut smax: f64 = 1.0;
        for i in 0..lambda.len() {
            if dlambda[i] < 0.0 {
                smax = smax.min(-lambda[i] / dlambda[i]);
            }
            if gdx[i] > 0.0 {
                smax = smax.min(-f[i] / gdx[i]);
            }
        }
        let mut s = opts.fraction_to_boundary * smax;
        let r0 = (rd.norm_squared() + rc.norm_squared()).sqrt();
        while s > 1e-12 {
            let xs = &x + &dx * s;
            let fs = poly.slack(&xs);
            let ls = &lambda + &dlambda * s;
            let (rds, rcs) = residual(&xs, &fs, &ls);
            if (rds.norm_squared() + rcs.norm_squared()).sqrt() <= (1.0 - opts.residual_slope * s) * r0 {
                break;
            }
            s *= opts.shrink;
        }
        x += &dx * s;
        lambda += &dlambda * s;
        f = poly.slack(&x);
        iterations += 1;
    }

    let report = SolverReport {
        iterations,
        final_objective: obj.value(&x),
        equality_residual: f.rows(0, a.nrows()).max().max(0.0),
        min_x: x.min(),
        converged,
    };
    Outcome { x, report }
}
