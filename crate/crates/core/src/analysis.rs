//! Closed-form approximations of the power-allocation losses.

use crate::error::{Error, Result};

/// Exponents and weight of the modifying factor `f_LS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub p: f64,
    pub q: f64,
    pub beta_ls: f64,
}

impl Default for ApproxParams {
    fn default() -> Self {
        ApproxParams { p: 0.2, q: 0.25, beta_ls: 0.125 }
    }
}

/// SINR ratio between the SPC optimum and linear scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub g_linear: f64,
    pub g_db: f64,
    /// Noise-to-interference ratio used; `+∞` with ideal CSI.
    pub gamma_n2i: f64,
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn check_half(k: usize, m: usize) -> Result<()> {
    if k == 0 || 2 * k > m {
        return Err(Error::Domain(format!("need 1 <= k <= m/2, got m={m}, k={k}")));
    }
    Ok(())
}

/// Large-system value `K/(M−K)` of `Tr[(HHᴴ)⁻¹]`.
pub fn frob_pinv_approx(m: usize, k: usize) -> Result<f64> {
    if k >= m {
        return Err(Error::Domain(format!("need k < m, got m={m}, k={k}")));
    }
    Ok(k as f64 / (m - k) as f64)
}

/// `(M/2K)^p + β_LS·(M/2K)^q`.
pub fn f_ls(k: usize, m: usize, params: &ApproxParams) -> Result<f64> {
    check_half(k, m)?;
    let base = m as f64 / (2.0 * k as f64);
    Ok(base.powf(params.p) + params.beta_ls * base.powf(params.q))
}

/// `K·f_LS/((M−K)·M)`, the approximate largest squared row norm of `H†`.
pub fn qmax_approx(m: usize, k: usize, params: &ApproxParams) -> Result<f64> {
    let f = f_ls(k, m, params)?;
    Ok(k as f64 * f / ((m - k) as f64 * m as f64))
}

/// `σ²K(M−K+1)/(M(1−β²)(K−2))`; `+∞` for `β = 1`.
pub fn n2i_estimate(sigma2: f64, k: usize, m: usize, beta: f64) -> Result<f64> {
    if k <= 2 {
        return Err(Error::Domain(format!("noise-to-interference estimate needs k >= 3, got {k}")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta must lie in [0, 1], got {beta}")));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::Domain(format!("noise variance must be nonnegative, got {sigma2}")));
    }
    if beta == 1.0 {
        return Ok(f64::INFINITY);
    }
    let (kf, mf) = (k as f64, m as f64);
    Ok(sigma2 * kf * (mf - kf + 1.0) / (mf * (1.0 - beta * beta) * (kf - 2.0)))
}

/// `G = f_LS − (f_LS − 1)/(1 + γ_N2I)`; ideal CSI gives `G = f_LS`.
pub fn ls_gap_estimate(sigma2: f64, k: usize, m: usize, beta: f64, params: &ApproxParams) -> Result<GapEstimate> {
    let f = f_ls(k, m, params)?;
    let (g, gamma) = if beta == 1.0 {
        (f, f64::INFINITY)
    } else {
        let gamma = n2i_estimate(sigma2, k, m, beta)?;
        (f - (f - 1.0) / (1.0 + gamma), gamma)
    };
    Ok(GapEstimate { g_linear: g, g_db: to_db(g), gamma_n2i: gamma })
}

/// The same gap written as a single fraction; kept to cross-check [`ls_gap_estimate`].
pub fn ls_gap_expanded(sigma2: f64, k: usize, m: usize, beta: f64, params: &ApproxParams) -> Result<f64> {
    let f = f_ls(k, m, params)?;
    let (kf, mf) = (k as f64, m as f64);
    let e = mf * (1.0 - beta * beta) * (kf - 2.0);
    Ok(f - e * (f - 1.0) / (e + kf * (mf - kf + 1.0) * sigma2))
}

/// CB SPC-to-PAPC SINR ratio, `4/π`.
pub fn cb_gap_estimate() -> f64 {
    4.0 / std::f64::consts::PI
}

/// Per-user CB rate loss at high SNR, `log₂(4/π)` bits/s/Hz.
pub fn cb_rate_loss() -> f64 {
    cb_gap_estimate().log2()
}

/// `Σ_k log₂(1 + sinr_k/G)`.
pub fn ls_rate_estimate(sinr_opt: &[f64], gap: &GapEstimate) -> f64 {
    sinr_opt.iter().map(|s| (s / gap.g_linear).ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}
