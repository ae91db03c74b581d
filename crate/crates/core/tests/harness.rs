use std::collections::BTreeMap;
use std::path::Path;

use papc::harness::{emit_csv, run_experiment, ExperimentConfig, ExperimentResult, Method, CSV_HEADER};

fn config(out: &Path, pairs: &[(&str, &str)]) -> ExperimentConfig {
    let mut map: BTreeMap<String, String> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    map.insert("out".into(), out.display().to_string());
    ExperimentConfig::from_map(&map).unwrap()
}

#[test]
fn csv_is_bitwise_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let pairs = [("m", "16"), ("k", "4"), ("snr_db", "-10,10"), ("beta", "0.9,1"), ("trials", "1"), ("seed", "7")];
    for path in [&a, &b] {
        let cfg = config(path, &pairs);
        emit_csv(&run_experiment(&cfg).unwrap(), path).unwrap();
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn empty_result_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&ExperimentResult { m: 4, k: 2, cells: vec![] }, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn single_cell_round_trips_through_csv_reader() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let cfg = config(&path, &[("m", "8"), ("k", "2"), ("snr_db", "10"), ("trials", "3"), ("methods", "SPC-ZF")]);
    let result = run_experiment(&cfg).unwrap();
    emit_csv(&result, &path).unwrap();
    let cell = &result.cells[0];
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>().join(","), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(&row[0], "SPC-ZF");
    assert_eq!(row[5].parse::<usize>().unwrap(), 3);
    let rate: f64 = row[6].parse().unwrap();
    assert!((rate - cell.mean_sum_rate).abs() <= 5e-6 * cell.mean_sum_rate);
    assert!(!std::fs::read_to_string(&path).unwrap().contains('\r'));
}

#[test]
fn full_snr_sweep_has_one_row_per_method_and_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let cfg = config(&path, &[("trials", "1")]);
    assert_eq!(cfg.methods.len(), 8);
    assert_eq!(cfg.snr_db.len(), 9);
    emit_csv(&run_experiment(&cfg).unwrap(), &path).unwrap();
    let rows = csv::Reader::from_path(&path).unwrap().records().count();
    assert_eq!(rows, 72);
}

#[test]
fn mid_snr_ordering_at_128_16() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&dir.path().join("o.csv"), &[("snr_db", "10"), ("trials", "200")]);
    let res = run_experiment(&cfg).unwrap();
    let rate = |m: Method| res.cell(m, 10.0, 1.0).unwrap().mean_sum_rate;
    let (spc, mpu, opt, wf, ls) =
        (rate(Method::SpcZf), rate(Method::MpuOptZf), rate(Method::MmiOptZf), rate(Method::WfZf), rate(Method::MmiLsZf));
    assert!(spc >= mpu, "{spc} {mpu}");
    assert!(mpu >= opt, "{mpu} {opt}");
    // The MMI family forms one cluster: each member within 5% of MMI-Opt-ZF.
    for other in [wf, ls] {
        assert!((other - opt).abs() <= 0.05 * opt, "{opt} vs {other}");
    }
    for c in res.cells.iter().filter(|c| c.method.is_papc()) {
        assert!(c.max_papc_violation <= 1e-9, "{}: {}", c.method, c.max_papc_violation);
    }
}

#[test]
fn spc_zf_is_an_upper_envelope_of_zf_papc_methods() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&dir.path().join("e.csv"), &[("m", "32"), ("k", "4"), ("snr_db", "-10:10:30"), ("beta", "0.7,1"), ("trials", "60")]);
    let res = run_experiment(&cfg).unwrap();
    for c in res.cells.iter().filter(|c| c.method.is_papc() && c.method.uses_zf()) {
        let spc = res.cell(Method::SpcZf, c.snr_db, c.beta).unwrap();
        let se = (spc.stderr.powi(2) + c.stderr.powi(2)).sqrt();
        assert!(spc.mean_sum_rate >= c.mean_sum_rate - 2.0 * se, "{} at {} dB, beta {}", c.method, c.snr_db, c.beta);
    }
}
