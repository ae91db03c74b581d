//! Power allocation for zero-forcing and conjugate-beamforming precoders in
//! large-scale MU-MIMO downlink under per-antenna power constraints (PAPC).
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`]: i.i.d. Rayleigh channels and the scalar-correlation CSI error model.
//! * [`precoding`]: sum-power-constrained (SPC) ZF and CB precoders, polar decomposition.
//! * [`mpu`]: maximum-power-utilization allocators (orthogonal projection, feasible Newton).
//! * [`mmi`]: minimum-multi-user-interference allocators (linear scaling, interior-point
//!   Newton, water-filling).
//! * [`cb`]: conjugate beamforming under PAPC.
//! * [`analysis`]: closed-form approximations of the linear-scaling and CB losses.
//! * [`metrics`]: SINR, sum rate and PAPC auditing.
//! * [`harness`]: seeded Monte Carlo sweeps, CSV output and approximation validation.

// `!(x > 0.0)` guards reject NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cb;
pub mod channel;
pub mod error;
pub mod harness;
mod interior;
pub mod metrics;
pub mod mmi;
pub mod mpu;
pub mod precoding;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use solver::SolverReport;

/// Complex `K×M` channel or `M×K` precoder matrix.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
/// Real matrix, used for `M×K` power, magnitude and phase matrices.
pub type RMatrix = nalgebra::DMatrix<f64>;
