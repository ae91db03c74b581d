use super::config::{ExperimentConfig, Method};
use super::HarnessError;
use crate::analysis::{ls_gap_estimate, ls_rate_estimate, ApproxParams};
use crate::cb::cb_papc_precoder;
use crate::channel::{apply_csi_error_with, generate_channel_with};
use crate::metrics::{evaluate, snr_db_to_noise};
use crate::mmi::{self, MmiProblem};
use crate::mpu::{self, MpuProblem};
use crate::precoding::{cb_spc, compose, zf_spc, PrecoderSpc};
use crate::rng::{substream, Purpose};
use crate::{CMatrix, Result};

use rayon::prelude::*;

/// Environment variable holding the worker count; unset means one per core.
pub const WORKERS_ENV: &str = "PAPC_WORKERS";

/// Statistics of one `(method, snr, beta)` grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultCell {
    pub method: Method,
    pub snr_db: f64,
    pub beta: f64,
    /// Trials that contributed.
    pub trials: usize,
    /// Trials dropped because a solver did not converge or the channel was singular.
    pub excluded: usize,
    pub mean_sum_rate: f64,
    pub stderr: f64,
    pub mean_iters: f64,
    /// Largest `max_m Σ_k|w_mk|² − 1/M` seen; NaN for the analytic estimate.
    pub max_papc_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub m: usize,
    pub k: usize,
    /// Ordered by beta, then SNR, then method as configured.
    pub cells: Vec<ResultCell>,
}

impl ExperimentResult {
    pub fn cell(&self, method: Method, snr_db: f64, beta: f64) -> Option<&ResultCell> {
        self.cells.iter().find(|c| c.method == method && c.snr_db == snr_db && c.beta == beta)
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    sum_rate: f64,
    iters: usize,
    violation: f64,
}

/// Runs the sweep. Trial `i` draws from substreams `(seed, i, ·)`, and results are
/// reduced in trial order, so output does not depend on the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> std::result::Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let samples: Vec<Vec<Option<Sample>>> =
        with_pool(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t as u64)).collect())?;

    let mut cells = Vec::new();
    let mut idx = 0;
    for &beta in &cfg.beta {
        for &snr_db in &cfg.snr_db {
            for &method in &cfg.methods {
                let col: Vec<Sample> = samples.iter().filter_map(|s| s[idx]).collect();
                cells.push(aggregate(method, snr_db, beta, &col, cfg.trials));
                idx += 1;
            }
        }
    }
    Ok(ExperimentResult { m: cfg.m, k: cfg.k, cells })
}

pub(super) fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> std::result::Result<T, HarnessError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| HarnessError::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn aggregate(method: Method, snr_db: f64, beta: f64, col: &[Sample], total: usize) -> ResultCell {
    let n = col.len();
    let rates: Vec<f64> = col.iter().map(|s| s.sum_rate).collect();
    let mean = if n > 0 { neumaier_sum(rates.iter().copied()) / n as f64 } else { f64::NAN };
    let stderr = if n > 1 {
        let ss = neumaier_sum(rates.iter().map(|r| (r - mean) * (r - mean)));
        (ss / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    let mean_iters = if n > 0 { col.iter().map(|s| s.iters as f64).sum::<f64>() / n as f64 } else { f64::NAN };
    let max_papc_violation = col.iter().map(|s| s.violation).fold(f64::NAN, f64::max);
    ResultCell { method, snr_db, beta, trials: n, excluded: total - n, mean_sum_rate: mean, stderr, mean_iters, max_papc_violation }
}

/// Compensated summation.
pub(super) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Precoders that do not depend on the SNR, plus the ZF pieces water-filling needs.
struct Built {
    fixed: Vec<(Method, Option<(CMatrix, usize)>)>,
    zf: Option<PrecoderSpc>,
    wf: Option<(MmiProblem, Vec<f64>)>,
}

fn build(cfg: &ExperimentConfig, h_meas: &CMatrix) -> Built {
    let needs_zf = cfg.methods.iter().any(|m| m.uses_zf());
    let needs_cb = cfg.methods.iter().any(|m| !m.uses_zf());
    let zf = if needs_zf { zf_spc(h_meas).ok() } else { None };
    let cb = if needs_cb { cb_spc(h_meas).ok() } else { None };
    let mut fixed = Vec::new();
    let mut wf = None;
    for &method in &cfg.methods {
        let w = match method {
            Method::SpcCb => cb.as_ref().map(|c| (c.w.clone(), 0)),
            Method::PapcCb => cb.as_ref().and_then(|c| cb_papc_precoder(h_meas, &c.alpha).ok()).map(|p| (p.w, 0)),
            Method::WfZf => {
                wf = zf.as_ref().and_then(|z| {
                    let prob = MmiProblem::from_power(&z.power()).ok()?;
                    Some((prob, mmi::effective_gains(h_meas, z)))
                });
                None
            }
            Method::EstLsZf => None,
            _ => zf.as_ref().and_then(|z| zf_method(method, z).ok().flatten()),
        };
        fixed.push((method, w));
    }
    Built { fixed, zf, wf }
}

/// ZF-family precoder and its iteration count; `None` when the solver did not converge.
fn zf_method(method: Method, z: &PrecoderSpc) -> Result<Option<(CMatrix, usize)>> {
    let p = z.power();
    Ok(match method {
        Method::SpcZf => Some((z.w.clone(), 0)),
        Method::MpuProjZf => {
            let prob = MpuProblem::from_power(&p)?;
            let (x, rep) = mpu::orthogonal_projection_allocate(&prob, mpu::min_a_threshold(prob.m, prob.k))?;
            Some((compose(&x, &z.theta)?, rep.iterations))
        }
        Method::MpuOptZf => {
            let prob = MpuProblem::from_power(&p)?;
            let (x, rep) = mpu::feasible_newton_allocate(&prob)?;
            rep.converged.then(|| compose(&x, &z.theta).map(|w| (w, rep.iterations))).transpose()?
        }
        Method::MmiLsZf => {
            let prob = MmiProblem::from_power(&p)?;
            let (_, x) = mmi::linear_scaling_allocate(&prob)?;
            Some((mmi::compose_precoder(z, &x)?, 0))
        }
        Method::MmiOptZf => {
            let prob = MmiProblem::from_power(&p)?;
            let (x, rep) = mmi::mmi_newton_allocate(&prob)?;
            rep.converged.then(|| mmi::compose_precoder(z, &x).map(|w| (w, rep.iterations))).transpose()?
        }
        _ => None,
    })
}

fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Vec<Option<Sample>> {
    let mut out = Vec::with_capacity(cfg.beta.len() * cfg.snr_db.len() * cfg.methods.len());
    let h = generate_channel_with(cfg.m, cfg.k, &mut substream(cfg.seed, trial, Purpose::Channel))
        .expect("validated dimensions");
    let params = ApproxParams::default();
    for &beta in &cfg.beta {
        let set = apply_csi_error_with(&h, beta, &mut substream(cfg.seed, trial, Purpose::CsiError));
        let built = set.as_ref().ok().map(|s| build(cfg, &s.h_measured));
        for &snr_db in &cfg.snr_db {
            let sigma2 = snr_db_to_noise(snr_db);
            let noise = vec![sigma2; cfg.k];
            for (mi, &method) in cfg.methods.iter().enumerate() {
                let sample = built.as_ref().and_then(|b| {
                    let eval = |w: &CMatrix, iters: usize| {
                        evaluate(&h, w, &noise)
                            .ok()
                            .map(|r| Sample { sum_rate: r.sum_rate, iters, violation: r.papc_violation })
                    };
                    match method {
                        Method::WfZf => {
                            let (prob, gains) = b.wf.as_ref()?;
                            let z = b.zf.as_ref()?;
                            let (x, rep) = mmi::waterfilling_allocate(prob, gains, &noise).ok()?;
                            if !rep.converged {
                                return None;
                            }
                            eval(&mmi::compose_precoder(z, &x).ok()?, rep.iterations)
                        }
                        Method::EstLsZf => {
                            let z = b.zf.as_ref()?;
                            let sinr = evaluate(&h, &z.w, &noise).ok()?.sinr;
                            let gap = ls_gap_estimate(sigma2, cfg.k, cfg.m, beta, &params).ok()?;
                            Some(Sample { sum_rate: ls_rate_estimate(&sinr, &gap), iters: 0, violation: f64::NAN })
                        }
                        _ => {
                            let (w, iters) = b.fixed[mi].1.as_ref()?;
                            eval(w, *iters)
                        }
                    }
                });
                out.push(sample);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_is_exact_on_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(v.iter().copied()), 2.0);
    }
}
