//! Conjugate beamforming under per-antenna power constraints.
//!
//! Every antenna sends user `k` with the same amplitude `√(α_k/M)` and the
//! conjugate channel phase, so each antenna radiates exactly `Σ_k α_k/M = 1/M`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CMatrix;

#[derive(Debug, Clone)]
pub struct CbPapcPrecoder {
    /// `M×K` precoding matrix.
    pub w: CMatrix,
    pub alpha: Vec<f64>,
}

/// `w_mk = √(α_k/M)·exp(−j·arg h_km)`; zero channel entries get phase 0.
pub fn cb_papc_precoder(h_measured: &CMatrix, alpha: &[f64]) -> Result<CbPapcPrecoder> {
    let (k, m) = h_measured.shape();
    if alpha.len() != k || k == 0 {
        return Err(Error::Dimension(format!("{} powers for {k} users", alpha.len())));
    }
    if let Some(a) = alpha.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::Domain(format!("negative user power {a}")));
    }
    let total: f64 = alpha.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("user powers sum to {total}, expected 1")));
    }
    let w = CMatrix::from_fn(m, k, |i, u| {
        let h = h_measured[(u, i)];
        let phase = if h == Complex64::ZERO { 0.0 } else { -h.arg() };
        Complex64::from_polar((alpha[u] / m as f64).sqrt(), phase)
    });
    Ok(CbPapcPrecoder { w, alpha: alpha.to_vec() })
}
