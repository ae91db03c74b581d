use rayon::prelude::*;

use super::runner::{neumaier_sum, with_pool};
use super::HarnessError;
use crate::analysis::{cb_gap_estimate, ls_gap_estimate, qmax_approx, to_db, ApproxParams};
use crate::cb::cb_papc_precoder;
use crate::channel::{apply_csi_error_with, generate_channel_with};
use crate::metrics::{evaluate, snr_db_to_noise};
use crate::mmi::{self, MmiProblem};
use crate::precoding::{cb_spc, gram_inverse, zf_spc};
use crate::rng::{substream, Purpose};
use crate::{CMatrix, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QmaxRow {
    pub m: usize,
    pub k: usize,
    pub monte_carlo: f64,
    pub approx: f64,
    /// `monte_carlo/approx − 1`.
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub m: usize,
    pub k: usize,
    pub beta: f64,
    pub snr_db: f64,
    pub measured_db: f64,
    pub estimate_db: f64,
    pub error_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbGapRow {
    pub m: usize,
    pub k: usize,
    pub beta: f64,
    pub snr_db: f64,
    pub measured_db: f64,
    pub estimate_db: f64,
    pub error_db: f64,
    /// Mean per-user rate difference SPC-CB minus PAPC-CB, bits/s/Hz.
    pub rate_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ApproxTable {
    pub qmax: Vec<QmaxRow>,
    pub ls_gap: Vec<GapRow>,
    pub cb_gap: Vec<CbGapRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxValidationConfig {
    pub m: usize,
    pub k_list: Vec<usize>,
    pub betas: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbGapMeasurement {
    /// Mean over trials and users of `SINR_SPC-CB / SINR_PAPC-CB`.
    pub gap_linear: f64,
    pub rate_loss_per_user: f64,
}

fn trial_channels(m: usize, k: usize, beta: f64, seed: u64, trial: u64) -> Result<(CMatrix, CMatrix)> {
    let h = generate_channel_with(m, k, &mut substream(seed, trial, Purpose::Channel))?;
    let set = apply_csi_error_with(&h, beta, &mut substream(seed, trial, Purpose::CsiError))?;
    Ok((set.h_ideal, set.h_measured))
}

fn mean_over_trials(
    trials: usize,
    f: impl Fn(u64) -> Result<f64> + Sync + Send,
) -> std::result::Result<f64, HarnessError> {
    let vals: Vec<f64> = with_pool(|| (0..trials).into_par_iter().map(|t| f(t as u64)).collect::<Result<Vec<_>>>())??;
    Ok(neumaier_sum(vals.into_iter()) / trials as f64)
}

/// Mean of `max_m ‖row_m(H†)‖²` over `trials` channels.
pub fn measure_qmax(m: usize, k: usize, trials: usize, seed: u64) -> std::result::Result<f64, HarnessError> {
    mean_over_trials(trials, |t| {
        let h = generate_channel_with(m, k, &mut substream(seed, t, Purpose::Channel))?;
        let pinv = h.adjoint() * gram_inverse(&h)?;
        Ok(pinv.row_iter().map(|r| r.norm_squared()).fold(0.0, f64::max))
    })
}

/// Mean over trials and users of `SINR_SPC-ZF / SINR_MMI-LS-ZF` (linear).
pub fn measure_ls_gap(
    m: usize,
    k: usize,
    beta: f64,
    snr_db: f64,
    trials: usize,
    seed: u64,
) -> std::result::Result<f64, HarnessError> {
    let noise = vec![snr_db_to_noise(snr_db); k];
    mean_over_trials(trials, |t| {
        let (h, hm) = trial_channels(m, k, beta, seed, t)?;
        let z = zf_spc(&hm)?;
        let (_, x) = mmi::linear_scaling_allocate(&MmiProblem::from_power(&z.power())?)?;
        let spc = evaluate(&h, &z.w, &noise)?;
        let ls = evaluate(&h, &mmi::compose_precoder(&z, &x)?, &noise)?;
        Ok(spc.sinr.iter().zip(&ls.sinr).map(|(a, b)| a / b).sum::<f64>() / k as f64)
    })
}

/// CB SPC-vs-PAPC SINR ratio and per-user rate loss.
pub fn measure_cb_gap(
    m: usize,
    k: usize,
    beta: f64,
    snr_db: f64,
    trials: usize,
    seed: u64,
) -> std::result::Result<CbGapMeasurement, HarnessError> {
    let noise = vec![snr_db_to_noise(snr_db); k];
    let per_trial = |t: u64| -> Result<(f64, f64)> {
        let (h, hm) = trial_channels(m, k, beta, seed, t)?;
        let spc = cb_spc(&hm)?;
        let papc = cb_papc_precoder(&hm, &spc.alpha)?;
        let a = evaluate(&h, &spc.w, &noise)?;
        let b = evaluate(&h, &papc.w, &noise)?;
        let ratio = a.sinr.iter().zip(&b.sinr).map(|(x, y)| x / y).sum::<f64>() / k as f64;
        Ok((ratio, (a.sum_rate - b.sum_rate) / k as f64))
    };
    let vals: Vec<(f64, f64)> =
        with_pool(|| (0..trials).into_par_iter().map(|t| per_trial(t as u64)).collect::<Result<Vec<_>>>())??;
    let n = trials as f64;
    Ok(CbGapMeasurement {
        gap_linear: neumaier_sum(vals.iter().map(|v| v.0)) / n,
        rate_loss_per_user: neumaier_sum(vals.iter().map(|v| v.1)) / n,
    })
}

/// Default grid: `β ∈ {0.8, 0.9, 0.95, 1}`, SNR ∈ {−10, 0, 10, 20, 30} dB.
pub fn validate_approximations(
    m: usize,
    k_list: &[usize],
    trials: usize,
    seed: u64,
) -> std::result::Result<ApproxTable, HarnessError> {
    validate_approximations_with(&ApproxValidationConfig {
        m,
        k_list: k_list.to_vec(),
        betas: vec![0.8, 0.9, 0.95, 1.0],
        snr_db: vec![-10.0, 0.0, 10.0, 20.0, 30.0],
        trials,
        seed,
    })
}

/// Monte Carlo versus closed form for Q_max, the linear-scaling gap and the CB gap.
pub fn validate_approximations_with(cfg: &ApproxValidationConfig) -> std::result::Result<ApproxTable, HarnessError> {
    let params = ApproxParams::default();
    let m = cfg.m;
    if cfg.trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    if cfg.betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
        return Err(HarnessError::Config("beta values must lie in [0, 1]".into()));
    }
    let mut table = ApproxTable::default();
    for &k in &cfg.k_list {
        if k == 0 || 2 * k > m {
            return Err(HarnessError::Config(format!("need 1 <= k <= m/2, got m={m}, k={k}")));
        }
        let approx = qmax_approx(m, k, &params)?;
        let mc = measure_qmax(m, k, cfg.trials, cfg.seed)?;
        table.qmax.push(QmaxRow { m, k, monte_carlo: mc, approx, rel_error: mc / approx - 1.0 });
        for &beta in &cfg.betas {
            for &snr_db in &cfg.snr_db {
                if k >= 3 || beta == 1.0 {
                    let est = ls_gap_estimate(snr_db_to_noise(snr_db), k, m, beta, &params)?.g_db;
                    let meas = to_db(measure_ls_gap(m, k, beta, snr_db, cfg.trials, cfg.seed)?);
                    table.ls_gap.push(GapRow { m, k, beta, snr_db, measured_db: meas, estimate_db: est, error_db: meas - est });
                }
                let cb = measure_cb_gap(m, k, beta, snr_db, cfg.trials, cfg.seed)?;
                let est = to_db(cb_gap_estimate());
                let meas = to_db(cb.gap_linear);
                table.cb_gap.push(CbGapRow {
                    m,
                    k,
                    beta,
                    snr_db,
                    measured_db: meas,
                    estimate_db: est,
                    error_db: meas - est,
                    rate_loss: cb.rate_loss_per_user,
                });
            }
        }
    }
    Ok(table)
}
