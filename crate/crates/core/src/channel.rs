//! Rayleigh channels and the scalar-correlation CSI error model.
//!
//! A measured row is `h_meas = ‖h‖ · (β·u + sqrt(1−β²)·v)` where `u` is the
//! ideal row direction and `v` a random unit vector orthogonal to `u`
//! (Hermitian inner product). Row norms are preserved, so a β sweep changes
//! directions only.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::{rng, CMatrix};

/// Ideal and measured channels linked by the correlation coefficient `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// `K×M`, rows are the true per-user channels.
    pub h_ideal: CMatrix,
    /// `K×M`, rows are what the base station believes.
    pub h_measured: CMatrix,
    pub beta: f64,
    pub seed: u64,
}

/// One circularly-symmetric complex Gaussian sample with `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn check_dims(m: usize, k: usize) -> Result<()> {
    if k == 0 || m == 0 || k > m {
        return Err(Error::Dimension(format!("need 1 <= k <= m, got m={m}, k={k}")));
    }
    Ok(())
}

/// `K×M` i.i.d. CN(0,1) matrix drawn from `seed`.
pub fn generate_channel(m: usize, k: usize, seed: u64) -> Result<CMatrix> {
    generate_channel_with(m, k, &mut rng::from_seed(seed))
}

/// Same as [`generate_channel`] with an explicit generator; entries are drawn row by row.
pub fn generate_channel_with<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Result<CMatrix> {
    check_dims(m, k)?;
    let mut h = CMatrix::zeros(k, m);
    for row in 0..k {
        for col in 0..m {
            h[(row, col)] = complex_normal(rng);
        }
    }
    Ok(h)
}

/// Applies the CSI error model with orthogonal directions drawn from `seed`.
pub fn apply_csi_error(h_ideal: &CMatrix, beta: f64, seed: u64) -> Result<ChannelSet> {
    let mut set = apply_csi_error_with(h_ideal, beta, &mut rng::from_seed(seed))?;
    set.seed = seed;
    Ok(set)
}

/// Same as [`apply_csi_error`] with an explicit generator. The returned `seed` field is 0.
pub fn apply_csi_error_with<R: Rng + ?Sized>(
    h_ideal: &CMatrix,
    beta: f64,
    rng: &mut R,
) -> Result<ChannelSet> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta must lie in [0, 1], got {beta}")));
    }
    let (k, m) = h_ideal.shape();
    let mut h_measured = h_ideal.clone();
    if beta < 1.0 {
        if m < 2 {
            return Err(Error::Dimension("CSI error with beta < 1 needs m >= 2".into()));
        }
        let mix = (1.0 - beta * beta).sqrt();
        for row in 0..k {
            let h: DVector<Complex64> = h_ideal.row(row).transpose();
            let norm = h.norm();
            if norm == 0.0 {
                return Err(Error::DegenerateChannel(row));
            }
            let u = &h / Complex64::from(norm);
            let v = orthogonal_unit(&u, rng);
            let meas = (u * Complex64::from(beta) + v * Complex64::from(mix)) * Complex64::from(norm);
            h_measured.set_row(row, &meas.transpose());
        }
    }
    Ok(ChannelSet { h_ideal: h_ideal.clone(), h_measured, beta, seed: 0 })
}

/// Random unit vector with `uᴴv = 0` for unit `u`: one Gram-Schmidt step on a Gaussian draw.
fn orthogonal_unit<R: Rng + ?Sized>(u: &DVector<Complex64>, rng: &mut R) -> DVector<Complex64> {
    loop {
        let g = DVector::from_fn(u.len(), |_, _| complex_normal(rng));
        // A second pass removes the residual component left by rounding.
        let mut v = &g - u * u.dotc(&g);
        v -= u * u.dotc(&v);
        let n = v.norm();
        if n > 1e-8 * g.norm() {
            return v / Complex64::from(n);
        }
    }
}

/// `|⟨a/‖a‖, b/‖b‖⟩|`, the normalized correlation of two rows.
pub fn row_correlation(a: &CMatrix, b: &CMatrix, row: usize) -> f64 {
    let x = a.row(row);
    let y = b.row(row);
    let ip: Complex64 = x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum();
    ip.norm() / (x.norm() * y.norm())
}
