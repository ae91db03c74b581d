//! Maximum-power-utilization (MPU) allocators.
//!
//! Both allocators return an `M×K` power matrix whose every antenna row sums
//! to exactly `1/M`, staying as close as possible to the SPC allocation `r` in
//! the sense of `‖√x − √r‖²`.
//!
//! Vectors of length `MK` use column stacking (`index = k·M + m`), which is
//! the storage order of [`RMatrix`]. The constraint `Ax = b` reads
//! `Σ_k x_mk = 1/M` for every antenna `m`.

use crate::error::{Error, Result};
use crate::solver::SolverReport;
use crate::RMatrix;

/// Projection negatives down to this value are clamped; anything lower is a failure.
const CLAMP_TOL: f64 = 1e-9;

/// SPC power allocation to be mapped onto the per-antenna constraint set.
#[derive(Debug, Clone)]
pub struct MpuProblem {
    /// Column-stacked SPC power matrix, length `MK`.
    pub r: Vec<f64>,
    pub m: usize,
    pub k: usize,
    /// `1/M`.
    pub per_antenna_cap: f64,
}

impl MpuProblem {
    pub fn new(r: Vec<f64>, m: usize, k: usize) -> Result<Self> {
        if m == 0 || k == 0 || r.len() != m * k {
            return Err(Error::Dimension(format!("r has length {}, expected {m}*{k}", r.len())));
        }
        if let Some(v) = r.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("negative SPC power {v}")));
        }
        let total: f64 = r.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("SPC powers sum to {total}, expected 1")));
        }
        Ok(MpuProblem { r, m, k, per_antenna_cap: 1.0 / m as f64 })
    }

    /// Builds the problem from an `M×K` SPC power matrix.
    pub fn from_power(p: &RMatrix) -> Result<Self> {
        Self::new(p.as_slice().to_vec(), p.nrows(), p.ncols())
    }

    /// `‖√x − √r‖²`.
    pub fn distance(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.r).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum()
    }

    /// `max_m |Σ_k x_mk − 1/M|`.
    pub fn equality_residual(&self, x: &[f64]) -> f64 {
        (0..self.m)
            .map(|a| (antenna_sum(x, self.m, self.k, a) - self.per_antenna_cap).abs())
            .fold(0.0, f64::max)
    }

    fn report(&self, x: &[f64], iterations: usize, converged: bool) -> SolverReport {
        SolverReport {
            iterations,
            final_objective: self.distance(x),
            equality_residual: self.equality_residual(x),
            min_x: x.iter().copied().fold(f64::INFINITY, f64::min),
            converged,
        }
    }
}

fn antenna_sum(x: &[f64], m: usize, k: usize, antenna: usize) -> f64 {
    (0..k).map(|u| x[u * m + antenna]).sum()
}

/// Smallest projection parameter that guarantees a nonnegative projection: `M²K/(MK−1)`.
pub fn min_a_threshold(m: usize, k: usize) -> f64 {
    let (mf, kf) = (m as f64, k as f64);
    mf * mf * kf / (mf * kf - 1.0)
}

/// Exact inverse of `G = K·I_M + E_M/M²` (`E` all ones), by the rank-one update identity.
pub fn gram_inverse_exact(m: usize, k: usize) -> RMatrix {
    let (mf, kf) = (m as f64, k as f64);
    let c = 1.0 / (mf * mf * kf * kf + mf * kf);
    RMatrix::from_fn(m, m, |i, j| if i == j { 1.0 / kf - c } else { -c })
}

/// First-order Neumann approximation `I/K − E/(M²K²)` of the same inverse.
pub fn gram_inverse_neumann(m: usize, k: usize) -> RMatrix {
    let (mf, kf) = (m as f64, k as f64);
    let c = 1.0 / (mf * mf * kf * kf);
    RMatrix::from_fn(m, m, |i, j| if i == j { 1.0 / kf - c } else { -c })
}

/// `y = G⁻¹ v` in O(M).
fn apply_gram_inverse(v: &[f64], k: usize) -> Vec<f64> {
    let mf = v.len() as f64;
    let kf = k as f64;
    let total: f64 = v.iter().sum();
    let shift = total / (mf * mf * kf * kf + mf * kf);
    v.iter().map(|vi| vi / kf - shift).collect()
}

/// Orthogonal projector onto the null space of `[A, b]`, applied to a length-`MK+1` vector.
pub fn project_null_space(v: &[f64], m: usize, k: usize) -> Result<Vec<f64>> {
    if v.len() != m * k + 1 {
        return Err(Error::Dimension(format!("vector length {}, expected {}", v.len(), m * k + 1)));
    }
    let last = v[m * k];
    let cap = 1.0 / m as f64;
    let av: Vec<f64> = (0..m).map(|a| antenna_sum(v, m, k, a) + cap * last).collect();
    let y = apply_gram_inverse(&av, k);
    let mut out = v.to_vec();
    for u in 0..k {
        for a in 0..m {
            out[u * m + a] -= y[a];
        }
    }
    out[m * k] -= cap * y.iter().sum::<f64>();
    Ok(out)
}

/// Projects `[r; −a]` onto the null space of `[A, b]` and rescales so the last entry is −1.
///
/// Costs O(MK). Negatives down to −1e-9 are clamped and the affected antenna is renormalized.
pub fn orthogonal_projection_allocate(prob: &MpuProblem, a: f64) -> Result<(RMatrix, SolverReport)> {
    let (m, k) = (prob.m, prob.k);
    let threshold = min_a_threshold(m, k);
    if !(a >= threshold) {
        return Err(Error::Parameter(format!("a = {a} is below the threshold {threshold}")));
    }
    let cap = prob.per_antenna_cap;
    let av: Vec<f64> = (0..m).map(|i| antenna_sum(&prob.r, m, k, i) - cap * a).collect();
    let y = apply_gram_inverse(&av, k);
    let last = -a - cap * y.iter().sum::<f64>();
    if !(last < 0.0) {
        return Err(Error::Numerical(format!("projected homogeneous coordinate {last} is not negative")));
    }
    let scale = -1.0 / last;
    let mut x: Vec<f64> = prob.r.iter().enumerate().map(|(i, ri)| (ri - y[i % m]) * scale).collect();

    let worst = x.iter().copied().fold(f64::INFINITY, f64::min);
    if worst < -CLAMP_TOL {
        return Err(Error::Numerical(format!("projection produced negative power {worst}")));
    }
    if worst < 0.0 {
        for i in 0..m {
            if (0..k).any(|u| x[u * m + i] < 0.0) {
                (0..k).for_each(|u| x[u * m + i] = x[u * m + i].max(0.0));
                let s = antenna_sum(&x, m, k, i);
                (0..k).for_each(|u| x[u * m + i] *= cap / s);
            }
        }
    }
    let report = prob.report(&x, 0, true);
    Ok((RMatrix::from_vec(m, k, x), report))
}

fn check_barrier_args(x: &[f64], r: &[f64]) -> Result<()> {
    if x.len() != r.len() {
        return Err(Error::Dimension(format!("x has length {}, r has {}", x.len(), r.len())));
    }
    if let Some(v) = x.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Domain(format!("barrier needs x > 0, found {v}")));
    }
    Ok(())
}

/// `t·Σ(√x − √r)² − Σ log x`.
pub fn mpu_barrier_objective(x: &[f64], r: &[f64], t: f64) -> Result<f64> {
    check_barrier_args(x, r)?;
    Ok(x.iter().zip(r).map(|(xi, ri)| t * (xi.sqrt() - ri.sqrt()).powi(2) - xi.ln()).sum())
}

/// Gradient `t(1 − √(r/x)) − 1/x` of [`mpu_barrier_objective`].
pub fn mpu_barrier_gradient(x: &[f64], r: &[f64], t: f64) -> Result<Vec<f64>> {
    check_barrier_args(x, r)?;
    Ok(x.iter().zip(r).map(|(xi, ri)| t * (1.0 - (ri / xi).sqrt()) - 1.0 / xi).collect())
}

/// Diagonal Hessian `(t/2)·√r·x^{−3/2} + 1/x²` of [`mpu_barrier_objective`].
pub fn mpu_barrier_hessian_diag(x: &[f64], r: &[f64], t: f64) -> Result<Vec<f64>> {
    check_barrier_args(x, r)?;
    Ok(x.iter().zip(r).map(|(xi, ri)| 0.5 * t * ri.sqrt() * xi.powf(-1.5) + 1.0 / (xi * xi)).collect())
}

/// Equality-constrained Newton step for [`mpu_barrier_objective`] at a feasible `x`.
///
/// Returns `(Δx, λ²)` where `λ² = Δxᵀ∇²f Δx`. The KKT system is solved per
/// antenna through its Schur complement, with the equality rows multiplied by `MK`.
pub fn mpu_newton_step(x: &[f64], r: &[f64], t: f64, m: usize, k: usize) -> Result<(Vec<f64>, f64)> {
    if x.len() != m * k {
        return Err(Error::Dimension(format!("x has length {}, expected {m}*{k}", x.len())));
    }
    let g = mpu_barrier_gradient(x, r, t)?;
    let h = mpu_barrier_hessian_diag(x, r, t)?;
    Ok(newton_direction(&g, &h, m, k))
}

fn newton_direction(g: &[f64], h: &[f64], m: usize, k: usize) -> (Vec<f64>, f64) {
    let scale = (m * k) as f64;
    let mut dx = vec![0.0; m * k];
    let mut lambda2 = 0.0;
    for a in 0..m {
        let (mut num, mut den) = (0.0, 0.0);
        for u in 0..k {
            let i = u * m + a;
            num += scale * g[i] / h[i];
            den += scale * scale / h[i];
        }
        let nu = -num / den;
        for u in 0..k {
            let i = u * m + a;
            dx[i] = -(g[i] + scale * nu) / h[i];
            lambda2 += dx[i] * dx[i] * h[i];
        }
    }
    (dx, lambda2)
}

/// How the barrier weight `t` is scheduled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BarrierStart {
    /// A single centering stage at `t = MK / gap_tol`.
    Final,
    /// `t₀ = 1/(MK·max|∇‖√x−√r‖²|)` at the start point, multiplied by `mu` per stage.
    GradientScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleNewtonOptions {
    pub start: BarrierStart,
    pub mu: f64,
    /// Stages stop once the duality-gap bound `MK/t` is below this.
    pub gap_tol: f64,
    /// Centering stops once `λ²/2`, measured on the objective divided by `t`, is below this.
    pub decrement_tol: f64,
    pub max_iter: usize,
    pub armijo_slope: f64,
    pub shrink: f64,
    /// Fraction of the distance to the boundary a step may cover.
    pub fraction_to_boundary: f64,
}

impl Default for FeasibleNewtonOptions {
    fn default() -> Self {
        FeasibleNewtonOptions {
            start: BarrierStart::Final,
            mu: 20.0,
            gap_tol: 1e-8,
            decrement_tol: 1e-9,
            max_iter: 50,
            armijo_slope: 0.1,
            shrink: 0.5,
            fraction_to_boundary: 0.99,
        }
    }
}

/// Feasible-start barrier Newton method with default options.
pub fn feasible_newton_allocate(prob: &MpuProblem) -> Result<(RMatrix, SolverReport)> {
    feasible_newton_allocate_with(prob, &FeasibleNewtonOptions::default()).map(|(p, r, _)| (p, r))
}

/// Feasible-start barrier Newton method.
///
/// Iterates stay strictly positive and satisfy `Ax = b` exactly up to rounding.
/// The third return value holds the barrier objective (divided by `t`) after every step.
pub fn feasible_newton_allocate_with(
    prob: &MpuProblem,
    opts: &FeasibleNewtonOptions,
) -> Result<(RMatrix, SolverReport, Vec<f64>)> {
    let (m, k) = (prob.m, prob.k);
    let n = (m * k) as f64;
    let (start, _) = orthogonal_projection_allocate(prob, min_a_threshold(m, k))?;
    let mut x = start.as_slice().to_vec();
    if x.iter().any(|v| *v <= 0.0) {
        let eta = 0.01;
        x.iter_mut().for_each(|v| *v = (1.0 - eta) * *v + eta / n);
    }
    let r = &prob.r;

    let final_t = n / opts.gap_tol;
    let mut t = match opts.start {
        BarrierStart::Final => final_t,
        BarrierStart::GradientScaled => {
            let gmax = x.iter().zip(r).map(|(xi, ri)| (1.0 - (ri / xi).sqrt()).abs()).fold(0.0, f64::max);
            if gmax > 0.0 { (1.0 / (n * gmax)).min(final_t) } else { final_t }
        }
    };

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    'stages: loop {
        loop {
            let (dx, lambda2) = mpu_newton_step(&x, r, t, m, k)?;
            if lambda2 / t / 2.0 < opts.decrement_tol {
                break;
            }
            if iterations >= opts.max_iter {
                break 'stages;
            }
            let g = mpu_barrier_gradient(&x, r, t)?;
            for a in 0..m {
                line_search_antenna(&mut x, &dx, &g, r, t, m, k, a, opts);
            }
            iterations += 1;
            trace.push(mpu_barrier_objective(&x, r, t)? / t);
        }
        if n / t <= opts.gap_tol * (1.0 + 1e-12) {
            converged = true;
            break;
        }
        t = (t * opts.mu).min(final_t);
    }
    let report = prob.report(&x, iterations, converged);
    Ok((RMatrix::from_vec(m, k, x), report, trace))
}

/// Backtracking on one antenna's block; blocks are independent because the Hessian is
/// diagonal and each equality row touches a single antenna.
#[allow(clippy::too_many_arguments)]
fn line_search_antenna(
    x: &mut [f64],
    dx: &[f64],
    g: &[f64],
    r: &[f64],
    t: f64,
    m: usize,
    k: usize,
    a: usize,
    opts: &FeasibleNewtonOptions,
) {
    let idx = |u: usize| u * m + a;
    let block = |s: f64| -> f64 {
        (0..k)
            .map(|u| {
                let v = x[idx(u)] + s * dx[idx(u)];
                (v.sqrt() - r[idx(u)].sqrt()).powi(2) - v.ln() / t
            })
            .sum()
    };
    let mut s: f64 = 1.0;
    for u in 0..k {
        let d = dx[idx(u)];
        if d < 0.0 {
            s = s.min(opts.fraction_to_boundary * (-x[idx(u)] / d));
        }
    }
    let slope: f64 = (0..k).map(|u| g[idx(u)] * dx[idx(u)]).sum::<f64>() / t;
    let f0 = block(0.0);
    let mut accepted = false;
    for _ in 0..60 {
        if block(s) <= f0 + opts.armijo_slope * s * slope {
            accepted = true;
            break;
        }
        s *= opts.shrink;
    }
    if accepted {
        for u in 0..k {
            x[idx(u)] += s * dx[idx(u)];
        }
    }
}
