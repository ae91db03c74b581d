use std::process::Command;

fn sim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_papc-sim"))
}

const SMALL: [&str; 10] = ["simulate", "--m", "16", "--k", "4", "--snr-db", "-10:10:10", "--trials", "6", "--beta"];

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let status = sim().args(SMALL).arg("0.9,1").arg("--out").arg(&out).env("PAPC_WORKERS", workers).status().unwrap();
        assert!(status.success());
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn exit_codes_distinguish_config_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let ok = sim().args(SMALL).arg("1").arg("--out").arg(dir.path().join("ok.csv")).status().unwrap();
    assert_eq!(ok.code(), Some(0));
    let bad_k = sim().args(["simulate", "--m", "4", "--k", "9", "--out"]).arg(dir.path().join("x.csv")).status().unwrap();
    assert_eq!(bad_k.code(), Some(2));
    let bad_beta = sim().args(SMALL).arg("1.5").arg("--out").arg(dir.path().join("y.csv")).status().unwrap();
    assert_eq!(bad_beta.code(), Some(2));
    let bad_dir = sim().args(SMALL).arg("1").arg("--out").arg(dir.path().join("missing/z.csv")).status().unwrap();
    assert_eq!(bad_dir.code(), Some(3));
    let no_config = sim().args(SMALL).arg("1").arg("--out").arg(dir.path().join("w.csv")).arg("--config").arg(dir.path().join("none.cfg")).status().unwrap();
    assert_eq!(no_config.code(), Some(3));
    let bad_workers = sim().args(SMALL).arg("1").arg("--out").arg(dir.path().join("v.csv")).env("PAPC_WORKERS", "zero").status().unwrap();
    assert_eq!(bad_workers.code(), Some(2));
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("cfg.csv");
    std::fs::write(&cfg, format!("# small run\nm = 12\nmethods = SPC-ZF,PAPC-CB\nout = {}\n", out.display())).unwrap();
    let status = sim()
        .args(SMALL)
        .arg("1")
        .arg("--out")
        .arg(dir.path().join("ignored.csv"))
        .arg("--config")
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(!dir.path().join("ignored.csv").exists());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("12")));
}

#[test]
fn validate_approx_writes_all_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("approx.csv");
    let status = sim()
        .args(["validate-approx", "--m", "32", "--k", "4,8", "--trials", "5", "--snr-db", "0,10", "--beta", "0.9,1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    for table in ["qmax", "ls_gap_db", "cb_gap_db", "cb_rate_loss"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{table},"))), "{table}");
    }
}
