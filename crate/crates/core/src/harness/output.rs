use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::runner::ExperimentResult;
use super::validate::ApproxTable;
use super::HarnessError;

pub const CSV_HEADER: &str =
    "method,m,k,snr_db,beta,trials,mean_sum_rate_bps_hz,stderr,mean_iters,max_papc_violation";

/// Six significant digits, fixed notation for exponents in `[-5, 6)`, scientific otherwise.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), HarnessError> {
    fs::write(path, body).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

/// Writes one row per `(method, snr, beta)` cell.
pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<(), HarnessError> {
    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    for c in &result.cells {
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{},{},{}",
            c.method,
            result.m,
            result.k,
            format_sig6(c.snr_db),
            format_sig6(c.beta),
            c.trials,
            format_sig6(c.mean_sum_rate),
            format_sig6(c.stderr),
            format_sig6(c.mean_iters),
            format_sig6(c.max_papc_violation),
        );
    }
    write_file(path, &body)
}

/// Writes the approximation tables with header `table,m,k,beta,snr_db,measured,approx,error`.
///
/// Gap tables are in dB with `error = measured − approx`; the Q_max table is linear with
/// relative error; the CB rate-loss table is in bits/s/Hz per user.
pub fn emit_approx_csv(table: &ApproxTable, path: &Path) -> Result<(), HarnessError> {
    let mut body = String::from("table,m,k,beta,snr_db,measured,approx,error\n");
    let f = format_sig6;
    for r in &table.qmax {
        let _ = writeln!(body, "qmax,{},{},,,{},{},{}", r.m, r.k, f(r.monte_carlo), f(r.approx), f(r.rel_error));
    }
    for r in &table.ls_gap {
        let _ = writeln!(
            body,
            "ls_gap_db,{},{},{},{},{},{},{}",
            r.m, r.k, f(r.beta), f(r.snr_db), f(r.measured_db), f(r.estimate_db), f(r.error_db)
        );
    }
    for r in &table.cb_gap {
        let _ = writeln!(
            body,
            "cb_gap_db,{},{},{},{},{},{},{}",
            r.m, r.k, f(r.beta), f(r.snr_db), f(r.measured_db), f(r.estimate_db), f(r.error_db)
        );
        let _ = writeln!(
            body,
            "cb_rate_loss,{},{},{},{},{},{},{}",
            r.m,
            r.k,
            f(r.beta),
            f(r.snr_db),
            f(r.rate_loss),
            f(crate::analysis::cb_rate_loss()),
            f(r.rate_loss - crate::analysis::cb_rate_loss())
        );
    }
    write_file(path, &body)
}
