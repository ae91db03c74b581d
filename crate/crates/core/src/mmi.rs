//! Minimum-multi-user-interference (MMI) allocators.
//!
//! Every user keeps the SPC power pattern across antennas: `p_mk = a_mk·x_k`
//! with `a_mk = p^{SPC}_mk / α_k`. Only the `K` user powers `x` are chosen,
//! subject to `Σ_k a_mk x_k ≤ 1/M` for every antenna and `x ⪰ 0`.
//! Because the pattern is kept, a ZF precoder stays interference-free.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interior::{self, Objective};
use crate::precoding::PrecoderSpc;
use crate::solver::SolverReport;
use crate::{CMatrix, RMatrix};

pub use crate::interior::InteriorPointOptions;

/// SPC allocation expressed as per-user patterns.
#[derive(Debug, Clone)]
pub struct MmiProblem {
    /// `M×K`, columns sum to 1.
    pub a_mmi: RMatrix,
    /// SPC per-user powers.
    pub alpha: Vec<f64>,
    /// Column-stacked SPC power matrix, length `MK`.
    pub r: Vec<f64>,
    /// `1/M`.
    pub per_antenna_cap: f64,
}

impl MmiProblem {
    /// Builds the problem from an `M×K` SPC power matrix.
    pub fn from_power(p: &RMatrix) -> Result<Self> {
        let (m, k) = p.shape();
        if m == 0 || k == 0 {
            return Err(Error::Dimension("empty power matrix".into()));
        }
        if let Some(v) = p.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::Domain(format!("negative SPC power {v}")));
        }
        let alpha: Vec<f64> = p.column_iter().map(|c| c.sum()).collect();
        if let Some(u) = alpha.iter().position(|a| !(*a > 0.0)) {
            return Err(Error::Degenerate(format!("user {u} has zero SPC power")));
        }
        let mut a_mmi = p.clone();
        for (mut col, al) in a_mmi.column_iter_mut().zip(&alpha) {
            col /= *al;
        }
        Ok(MmiProblem { a_mmi, alpha, r: p.as_slice().to_vec(), per_antenna_cap: 1.0 / m as f64 })
    }

    pub fn m(&self) -> usize {
        self.a_mmi.nrows()
    }

    pub fn k(&self) -> usize {
        self.a_mmi.ncols()
    }

    /// `p_mk = a_mk·x_k`.
    pub fn power_matrix(&self, x: &[f64]) -> RMatrix {
        let mut p = self.a_mmi.clone();
        for (mut col, xk) in p.column_iter_mut().zip(x) {
            col *= *xk;
        }
        p
    }

    /// `Σ_m √(a_mk·r_mk)`; equals `√α_k` when the pattern comes from `r`.
    fn root_weights(&self) -> Vec<f64> {
        let m = self.m();
        (0..self.k())
            .map(|u| (0..m).map(|i| (self.a_mmi[(i, u)] * self.r[u * m + i]).sqrt()).sum())
            .collect()
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.k() {
            return Err(Error::Dimension(format!("x has length {}, expected {}", x.len(), self.k())));
        }
        Ok(())
    }
}

/// Linear scaling: every SPC power divided by `M·max_m Σ_k p_mk`.
///
/// Returns the `M×K` power matrix and the user powers.
pub fn linear_scaling_allocate(prob: &MmiProblem) -> Result<(RMatrix, Vec<f64>)> {
    let m = prob.m();
    let p = RMatrix::from_vec(m, prob.k(), prob.r.clone());
    let qmax = p.row_iter().map(|row| row.sum()).fold(0.0, f64::max);
    if !(qmax > 0.0) {
        return Err(Error::Degenerate("all-zero SPC allocation".into()));
    }
    let scale = 1.0 / (m as f64 * qmax);
    let x = prob.alpha.iter().map(|a| a * scale).collect();
    Ok((p * scale, x))
}

/// `‖√p − √r‖²` for `p = a∘x`.
pub fn mmi_objective(prob: &MmiProblem, x: &[f64]) -> f64 {
    let m = prob.m();
    let mut total = 0.0;
    for (u, xk) in x.iter().enumerate() {
        for i in 0..m {
            let d = (prob.a_mmi[(i, u)] * xk).sqrt() - prob.r[u * m + i].sqrt();
            total += d * d;
        }
    }
    total
}

/// `t·‖√p − √r‖² − Σ_m log(1/M − (Ax)_m) − Σ_k log x_k`.
pub fn mmi_barrier_objective(prob: &MmiProblem, x: &[f64], t: f64) -> Result<f64> {
    let slack = barrier_slack(prob, x)?;
    Ok(t * mmi_objective(prob, x) - slack.iter().map(|s| s.ln()).sum::<f64>() - x.iter().map(|v| v.ln()).sum::<f64>())
}

/// Gradient of [`mmi_barrier_objective`].
pub fn mmi_barrier_gradient(prob: &MmiProblem, x: &[f64], t: f64) -> Result<Vec<f64>> {
    let slack = barrier_slack(prob, x)?;
    let q = prob.root_weights();
    let m = prob.m();
    Ok((0..prob.k())
        .map(|u| {
            let cap_term: f64 = (0..m).map(|i| prob.a_mmi[(i, u)] / slack[i]).sum();
            t * (1.0 - q[u] / x[u].sqrt()) + cap_term - 1.0 / x[u]
        })
        .collect())
}

/// Hessian `t·diag(½ q x^{−3/2}) + Σ_m a_m a_mᵀ/s_m² + diag(1/x²)` of [`mmi_barrier_objective`].
pub fn mmi_barrier_hessian(prob: &MmiProblem, x: &[f64], t: f64) -> Result<DMatrix<f64>> {
    let slack = barrier_slack(prob, x)?;
    let q = prob.root_weights();
    let mut scaled = prob.a_mmi.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row /= slack[i];
    }
    let mut h = scaled.tr_mul(&scaled);
    for u in 0..prob.k() {
        h[(u, u)] += 0.5 * t * q[u] * x[u].powf(-1.5) + 1.0 / (x[u] * x[u]);
    }
    Ok(h)
}

fn barrier_slack(prob: &MmiProblem, x: &[f64]) -> Result<Vec<f64>> {
    prob.check_x(x)?;
    if let Some(v) = x.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Domain(format!("barrier needs x > 0, found {v}")));
    }
    let ax = &prob.a_mmi * DVector::from_column_slice(x);
    let slack: Vec<f64> = ax.iter().map(|v| prob.per_antenna_cap - v).collect();
    if let Some(s) = slack.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::Domain(format!("barrier needs strict feasibility, slack {s}")));
    }
    Ok(slack)
}

struct Distance {
    q: Vec<f64>,
    offset: f64,
}

impl Objective for Distance {
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().zip(&self.q).map(|(xk, qk)| xk - 2.0 * qk * xk.sqrt()).sum::<f64>() + self.offset
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(x.len(), x.iter().zip(&self.q).map(|(xk, qk)| 1.0 - qk / xk.sqrt()))
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            x.len(),
            x.iter().zip(&self.q).map(|(xk, qk)| 0.5 * qk * xk.powf(-1.5)),
        ))
    }
}

/// Negated sum rate `−Σ log₂(1 + c_k x_k)` with `c_k = g_k/σ²_k`.
struct NegRate {
    c: Vec<f64>,
}

impl Objective for NegRate {
    fn value(&self, x: &DVector<f64>) -> f64 {
        -x.iter().zip(&self.c).map(|(xk, ck)| (ck * xk).ln_1p()).sum::<f64>() / std::f64::consts::LN_2
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            x.len(),
            x.iter().zip(&self.c).map(|(xk, ck)| -ck / (1.0 + ck * xk) / std::f64::consts::LN_2),
        )
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            x.len(),
            x.iter().zip(&self.c).map(|(xk, ck)| (ck / (1.0 + ck * xk)).powi(2) / std::f64::consts::LN_2),
        ))
    }
}

fn interior_start(prob: &MmiProblem) -> Result<DVector<f64>> {
    let (_, x_ls) = linear_scaling_allocate(prob)?;
    Ok(DVector::from_iterator(x_ls.len(), x_ls.iter().map(|v| 0.95 * v)))
}

/// Both objectives have their constrained optimum on the cap boundary, so a converged
/// interior point is scaled up until its most loaded antenna sits exactly at the cap.
fn snap_to_cap(prob: &MmiProblem, x: &mut DVector<f64>, report: &mut SolverReport) {
    let load = (&prob.a_mmi * &*x).max();
    if report.converged && load > 0.0 && load < prob.per_antenna_cap {
        *x *= prob.per_antenna_cap / load;
        report.min_x = x.min();
        report.equality_residual = ((&prob.a_mmi * &*x).max() - prob.per_antenna_cap).max(0.0);
    }
}

/// Minimizes `‖√p − √r‖²` over the MMI polytope, starting from 0.95 × linear scaling.
pub fn mmi_newton_allocate(prob: &MmiProblem) -> Result<(Vec<f64>, SolverReport)> {
    mmi_newton_allocate_with(prob, &InteriorPointOptions::default())
}

pub fn mmi_newton_allocate_with(
    prob: &MmiProblem,
    opts: &InteriorPointOptions,
) -> Result<(Vec<f64>, SolverReport)> {
    let obj = Distance { q: prob.root_weights(), offset: prob.r.iter().sum() };
    let mut out = interior::minimize(&obj, &prob.a_mmi, prob.per_antenna_cap, interior_start(prob)?, opts);
    snap_to_cap(prob, &mut out.x, &mut out.report);
    let x: Vec<f64> = out.x.iter().copied().collect();
    let mut report = out.report;
    report.final_objective = mmi_objective(prob, &x);
    Ok((x, report))
}

/// Maximizes `Σ log₂(1 + g_k x_k/σ²_k)` over the MMI polytope.
///
/// The report's objective is the negated sum rate.
pub fn waterfilling_allocate(
    prob: &MmiProblem,
    channel_gains: &[f64],
    noise: &[f64],
) -> Result<(Vec<f64>, SolverReport)> {
    waterfilling_allocate_with(prob, channel_gains, noise, &InteriorPointOptions::default())
}

pub fn waterfilling_allocate_with(
    prob: &MmiProblem,
    channel_gains: &[f64],
    noise: &[f64],
    opts: &InteriorPointOptions,
) -> Result<(Vec<f64>, SolverReport)> {
    let k = prob.k();
    if channel_gains.len() != k || noise.len() != k {
        return Err(Error::Dimension(format!(
            "{} gains and {} noise variances for {k} users",
            channel_gains.len(),
            noise.len()
        )));
    }
    if let Some(g) = channel_gains.iter().find(|g| !(**g > 0.0)) {
        return Err(Error::Domain(format!("channel gains must be positive, got {g}")));
    }
    if let Some(s) = noise.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::Domain(format!("noise variances must be positive, got {s}")));
    }
    let obj = NegRate { c: channel_gains.iter().zip(noise).map(|(g, s)| g / s).collect() };
    let mut out = interior::minimize(&obj, &prob.a_mmi, prob.per_antenna_cap, interior_start(prob)?, opts);
    snap_to_cap(prob, &mut out.x, &mut out.report);
    out.report.final_objective = obj.value(&out.x);
    Ok((out.x.iter().copied().collect(), out.report))
}

/// Effective gains `|h_kᵀ w_k|²/α_k` of an SPC precoder on the channel it was built from.
pub fn effective_gains(h: &CMatrix, spc: &PrecoderSpc) -> Vec<f64> {
    (0..spc.w.ncols())
        .map(|u| {
            let s: Complex64 = h.row(u).iter().zip(spc.w.column(u).iter()).map(|(a, b)| a * b).sum();
            s.norm_sqr() / spc.alpha[u]
        })
        .collect()
}

/// `w_k = √(x_k/α_k)·w_k^{SPC}`: user powers `x` with the SPC pattern and phases.
pub fn compose_precoder(spc: &PrecoderSpc, x: &[f64]) -> Result<CMatrix> {
    if x.len() != spc.w.ncols() {
        return Err(Error::Dimension(format!("{} powers for {} users", x.len(), spc.w.ncols())));
    }
    let mut w = spc.w.clone();
    for (u, mut col) in w.column_iter_mut().enumerate() {
        col *= Complex64::from((x[u].max(0.0) / spc.alpha[u]).sqrt());
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_allocation_is_unchanged() {
        let p = RMatrix::from_row_slice(2, 2, &[0.3, 0.2, 0.1, 0.4]);
        let prob = MmiProblem::from_power(&p).unwrap();
        let (q, x) = linear_scaling_allocate(&prob).unwrap();
        assert!((q - &p).norm() < 1e-15);
        assert!((x[0] - 0.4).abs() < 1e-15 && (x[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn hand_scaled_example() {
        // Antenna sums 0.5, 0.3, 0.2.
        let p = RMatrix::from_row_slice(3, 2, &[0.25, 0.25, 0.1, 0.2, 0.15, 0.05]);
        let prob = MmiProblem::from_power(&p).unwrap();
        let (q, _) = linear_scaling_allocate(&prob).unwrap();
        assert!((&q - &p * (2.0 / 3.0)).norm() < 1e-15);
        assert!((q.row(0).sum() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_user_is_degenerate() {
        let p = RMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.5, 0.0]);
        assert!(matches!(MmiProblem::from_power(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn single_user_takes_largest_feasible_power() {
        let p = RMatrix::from_column_slice(4, 1, &[0.4, 0.3, 0.2, 0.1]);
        let prob = MmiProblem::from_power(&p).unwrap();
        let expect = 0.25 / 0.4;
        let (x, rep) = mmi_newton_allocate(&prob).unwrap();
        assert!(rep.converged);
        assert!((x[0] - expect).abs() < 1e-7, "{}", x[0]);
        let (xw, repw) = waterfilling_allocate(&prob, &[2.0], &[0.1]).unwrap();
        assert!(repw.converged);
        assert!((xw[0] - expect).abs() < 1e-7, "{}", xw[0]);
    }

    #[test]
    fn symmetric_waterfilling_is_equal() {
        let col = [0.4, 0.3, 0.2, 0.1];
        let p = RMatrix::from_fn(4, 3, |i, _| col[i] / 3.0);
        let prob = MmiProblem::from_power(&p).unwrap();
        let (x, rep) = waterfilling_allocate(&prob, &[1.5; 3], &[0.2; 3]).unwrap();
        assert!(rep.converged);
        assert!((x[0] - x[1]).abs() < 1e-8 && (x[1] - x[2]).abs() < 1e-8);
    }

    #[test]
    fn waterfilling_rejects_bad_gains() {
        let p = RMatrix::from_column_slice(2, 1, &[0.5, 0.5]);
        let prob = MmiProblem::from_power(&p).unwrap();
        assert!(matches!(waterfilling_allocate(&prob, &[0.0], &[1.0]), Err(Error::Domain(_))));
        assert!(matches!(waterfilling_allocate(&prob, &[1.0, 1.0], &[1.0]), Err(Error::Dimension(_))));
    }
}
