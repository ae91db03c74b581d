use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use papc::harness::{
    emit_approx_csv, emit_csv, parse_key_values, parse_number_list, run_experiment, validate_approximations_with,
    ApproxValidationConfig, ExperimentConfig, HarnessError,
};

/// Monte Carlo simulator for per-antenna power allocation in MU-MIMO downlink.
///
/// Worker threads default to one per core; set PAPC_WORKERS to override.
#[derive(Parser)]
#[command(name = "papc-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sum rate versus SNR and CSI quality for the selected methods.
    Simulate(SimArgs),
    /// Compare the closed-form approximations against Monte Carlo.
    ValidateApprox(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// Antenna count.
    #[arg(long)]
    m: Option<String>,
    /// SNR grid in dB: `a:step:b`, a comma list, or one value.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// CSI correlation values (comma list or range).
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value file; its values take precedence over flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// User count.
    #[arg(long)]
    k: Option<String>,
    /// `all`, or a comma list of method names (e.g. `SPC-ZF,MMI-LS-ZF,Est-LS-ZF`).
    #[arg(long)]
    methods: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ValidateArgs {
    /// User counts: one value, a comma list, or `a:step:b`.
    #[arg(long)]
    k: Option<String>,
    #[command(flatten)]
    common: Common,
}

fn settings(common: &Common, extra: &[(&str, &Option<String>)]) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut map = BTreeMap::new();
    let flags = [
        ("m", &common.m),
        ("snr_db", &common.snr_db),
        ("beta", &common.beta),
        ("trials", &common.trials),
        ("seed", &common.seed),
    ];
    for (key, value) in flags.iter().chain(extra) {
        if let Some(v) = value {
            map.insert(key.to_string(), v.clone());
        }
    }
    if let Some(out) = &common.out {
        map.insert("out".into(), out.display().to_string());
    }
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
        map.extend(parse_key_values(&text)?);
    }
    Ok(map)
}

fn simulate(args: &SimArgs) -> Result<(), HarnessError> {
    let map = settings(&args.common, &[("k", &args.k), ("methods", &args.methods)])?;
    let cfg = ExperimentConfig::from_map(&map)?;
    let result = run_experiment(&cfg)?;
    emit_csv(&result, &cfg.output_path)?;
    let excluded: usize = result.cells.iter().map(|c| c.excluded).sum();
    eprintln!("wrote {} rows to {} ({excluded} excluded samples)", result.cells.len(), cfg.output_path.display());
    Ok(())
}

fn validate(args: &ValidateArgs) -> Result<(), HarnessError> {
    let map = settings(&args.common, &[("k", &args.k)])?;
    let allowed = ["m", "k", "snr_db", "beta", "trials", "seed", "out"];
    if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(HarnessError::Config(format!("unknown key '{key}'")));
    }
    let get = |key: &str, default: &str| map.get(key).cloned().unwrap_or_else(|| default.to_string());
    let int = |key: &str, default: &str| -> Result<u64, HarnessError> {
        let v = get(key, default);
        v.trim().parse().map_err(|_| HarnessError::Config(format!("invalid value '{v}' for {key}")))
    };
    let k_list = parse_number_list(&get("k", "24"))?
        .into_iter()
        .map(|v| if v >= 1.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(HarnessError::Config(format!("invalid k {v}"))) })
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = ApproxValidationConfig {
        m: int("m", "256")? as usize,
        k_list,
        betas: parse_number_list(&get("beta", "0.8,0.9,0.95,1.0"))?,
        snr_db: parse_number_list(&get("snr_db", "-10,0,10,20,30"))?,
        trials: int("trials", "200")? as usize,
        seed: int("seed", "42")?,
    };
    let out = map.get("out").map(PathBuf::from).ok_or_else(|| HarnessError::Config("no output path given".into()))?;
    let table = validate_approximations_with(&cfg)?;
    emit_approx_csv(&table, &out)?;
    eprintln!("wrote approximation tables to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::ValidateApprox(a) => validate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
