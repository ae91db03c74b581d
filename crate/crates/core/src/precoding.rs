//! Sum-power-constrained ZF and CB precoders and their polar decomposition.

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMatrix, RMatrix};

/// Squared-diagonal ratio of the Cholesky factor above which the Gram matrix is treated as singular.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecoderKind {
    Zf,
    Cb,
}

/// SPC precoder `w = xi ∘ exp(j·theta)` with unit total power.
#[derive(Debug, Clone)]
pub struct PrecoderSpc {
    /// `M×K` precoding matrix.
    pub w: CMatrix,
    /// Entrywise magnitudes.
    pub xi: RMatrix,
    /// Entrywise phases in `(−π, π]`.
    pub theta: RMatrix,
    /// Common power scaling shared by all users.
    pub phi: f64,
    /// Per-user total power `α_k = Σ_m xi²_mk`.
    pub alpha: Vec<f64>,
    pub kind: PrecoderKind,
}

impl PrecoderSpc {
    fn from_w(w: CMatrix, phi: f64, kind: PrecoderKind) -> Self {
        let (xi, theta) = decompose(&w);
        let alpha = xi.column_iter().map(|c| c.norm_squared()).collect();
        PrecoderSpc { w, xi, theta, phi, alpha, kind }
    }

    /// `M×K` power matrix `P = xi²`.
    pub fn power(&self) -> RMatrix {
        self.xi.map(|v| v * v)
    }
}

/// `(HHᴴ)⁻¹` through a `K×K` Cholesky factorization.
pub fn gram_inverse(h: &CMatrix) -> Result<CMatrix> {
    let (k, m) = h.shape();
    if k == 0 || k > m {
        return Err(Error::Dimension(format!("need 1 <= k <= m, got {k}x{m} channel")));
    }
    let gram = h * h.adjoint();
    let chol = Cholesky::new(gram).ok_or(Error::SingularChannel(f64::INFINITY))?;
    let diag = chol.l_dirty().diagonal().map(|z| z.re);
    let cond = (diag.max() / diag.min()).powi(2);
    if !cond.is_finite() || cond > GRAM_CONDITION_LIMIT {
        return Err(Error::SingularChannel(cond));
    }
    Ok(chol.inverse())
}

/// ZF-SPC precoder `Hᴴ(HHᴴ)⁻¹·√φ` with `φ = 1/Tr[(HHᴴ)⁻¹]`.
pub fn zf_spc(h: &CMatrix) -> Result<PrecoderSpc> {
    let ginv = gram_inverse(h)?;
    let trace = ginv.trace().re;
    if !(trace > 0.0 && trace.is_finite()) {
        return Err(Error::SingularChannel(f64::INFINITY));
    }
    let phi = 1.0 / trace;
    let w = h.adjoint() * ginv * Complex64::from(phi.sqrt());
    Ok(PrecoderSpc::from_w(w, phi, PrecoderKind::Zf))
}

/// CB-SPC precoder `w_k = √φ·conj(h_k)` with `φ = 1/‖H‖_F²`.
pub fn cb_spc(h: &CMatrix) -> Result<PrecoderSpc> {
    if h.nrows() == 0 || h.ncols() == 0 {
        return Err(Error::Dimension("empty channel".into()));
    }
    if let Some(row) = (0..h.nrows()).find(|&r| h.row(r).iter().all(|z| *z == Complex64::ZERO)) {
        return Err(Error::DegenerateChannel(row));
    }
    let phi = 1.0 / h.norm_squared();
    let w = h.adjoint() * Complex64::from(phi.sqrt());
    Ok(PrecoderSpc::from_w(w, phi, PrecoderKind::Cb))
}

/// Entrywise magnitude and phase; zero entries get phase 0.
pub fn decompose(w: &CMatrix) -> (RMatrix, RMatrix) {
    let xi = w.map(|z| z.norm());
    let theta = w.map(|z| if z == Complex64::ZERO { 0.0 } else { z.arg() });
    (xi, theta)
}

/// `sqrt(p) ∘ exp(j·theta)`. Entries in `[−1e-12, 0)` are treated as 0.
pub fn compose(p: &RMatrix, theta: &RMatrix) -> Result<CMatrix> {
    if p.shape() != theta.shape() {
        return Err(Error::Dimension(format!(
            "power {:?} and phase {:?} shapes differ",
            p.shape(),
            theta.shape()
        )));
    }
    if let Some(v) = p.iter().find(|v| **v < -1e-12 || v.is_nan()) {
        return Err(Error::Domain(format!("negative power entry {v}")));
    }
    Ok(p.zip_map(theta, |pv, th| Complex64::from_polar(pv.max(0.0).sqrt(), th)))
}
