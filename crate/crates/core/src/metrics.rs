//! SINR, sum rate and per-antenna power auditing.
//!
//! SINR is always evaluated on the ideal channel with the plain product `H·W`:
//! `γ_k = |(HW)_kk|² / (Σ_{l≠k} |(HW)_kl|² + σ²_k)`.

use crate::error::{Error, Result};
use crate::{CMatrix, RMatrix};

/// Tolerance used to count an antenna as tight against its cap.
pub const TIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct RateReport {
    pub sinr: Vec<f64>,
    /// `log₂(1 + sinr_k)` in bits/s/Hz.
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// `K×K`, entry `(k, l)` is `|h_kᵀ w_l|²`.
    pub interference_power: RMatrix,
    /// `max_m Σ_k |w_mk|² − 1/M`; reported, not enforced.
    pub papc_violation: f64,
}

/// Noise variance for a given SNR in dB, with total transmit power 1.
pub fn snr_db_to_noise(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Evaluates precoder `w` (`M×K`) on channel `h_ideal` (`K×M`).
pub fn evaluate(h_ideal: &CMatrix, w: &CMatrix, noise: &[f64]) -> Result<RateReport> {
    let (k, m) = h_ideal.shape();
    if w.shape() != (m, k) || noise.len() != k {
        return Err(Error::Dimension(format!(
            "channel {k}x{m}, precoder {:?}, noise length {}",
            w.shape(),
            noise.len()
        )));
    }
    if let Some(s) = noise.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::Domain(format!("noise variance must be positive, got {s}")));
    }
    let interference_power = (h_ideal * w).map(|z| z.norm_sqr());
    let mut sinr = Vec::with_capacity(k);
    for u in 0..k {
        let row = interference_power.row(u);
        let signal = row[u];
        let leak: f64 = row.iter().enumerate().filter(|(l, _)| *l != u).map(|(_, v)| v).sum();
        sinr.push(signal / (leak + noise[u]));
    }
    let rates: Vec<f64> = sinr.iter().map(|g| g.ln_1p() / std::f64::consts::LN_2).collect();
    let sum_rate = rates.iter().sum();
    let (papc_violation, _) = audit_papc(w, 1.0 / m as f64);
    Ok(RateReport { sinr, rates, sum_rate, interference_power, papc_violation })
}

/// Returns `(max_m Σ_k|w_mk|² − cap, number of antennas within 1e-9 of cap)`.
pub fn audit_papc(w: &CMatrix, cap: f64) -> (f64, usize) {
    let mut worst = f64::NEG_INFINITY;
    let mut tight = 0;
    for row in w.row_iter() {
        let power: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        worst = worst.max(power - cap);
        if (power - cap).abs() <= TIGHT_TOL {
            tight += 1;
        }
    }
    (worst, tight)
}
