use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::HarnessError;

/// Precoding and allocation schemes a sweep can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    SpcZf,
    MpuProjZf,
    MpuOptZf,
    MmiLsZf,
    MmiOptZf,
    WfZf,
    SpcCb,
    PapcCb,
    /// Analytic estimate of MMI-LS-ZF from SPC-ZF SINRs; not a precoder.
    EstLsZf,
}

impl Method {
    /// The eight simulated schemes selected by `all`.
    pub const SIMULATED: [Method; 8] = [
        Method::SpcZf,
        Method::MpuProjZf,
        Method::MpuOptZf,
        Method::MmiLsZf,
        Method::MmiOptZf,
        Method::WfZf,
        Method::SpcCb,
        Method::PapcCb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SpcZf => "SPC-ZF",
            Method::MpuProjZf => "MPU-Proj-ZF",
            Method::MpuOptZf => "MPU-Opt-ZF",
            Method::MmiLsZf => "MMI-LS-ZF",
            Method::MmiOptZf => "MMI-Opt-ZF",
            Method::WfZf => "WF-ZF",
            Method::SpcCb => "SPC-CB",
            Method::PapcCb => "PAPC-CB",
            Method::EstLsZf => "Est-LS-ZF",
        }
    }

    /// Whether the scheme must respect the per-antenna cap.
    pub fn is_papc(self) -> bool {
        !matches!(self, Method::SpcZf | Method::SpcCb | Method::EstLsZf)
    }

    /// Whether the scheme is built on the ZF-SPC precoder.
    pub fn uses_zf(self) -> bool {
        !matches!(self, Method::SpcCb | Method::PapcCb)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = Method::SIMULATED.iter().chain(std::iter::once(&Method::EstLsZf));
        all.copied()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HarnessError::Config(format!("unknown method '{s}'")))
    }
}

/// Description of a Monte Carlo sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub k: usize,
    pub snr_db: Vec<f64>,
    pub beta: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub output_path: PathBuf,
}

const KNOWN_KEYS: [&str; 8] = ["m", "k", "snr_db", "beta", "trials", "seed", "methods", "out"];

impl ExperimentConfig {
    /// Builds a config from `key=value` settings; missing keys take defaults
    /// (`m=128, k=16, snr_db=-10:5:30, beta=1, trials=500, seed=42, methods=all`).
    /// `out` has no default.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, HarnessError> {
        if let Some(key) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(HarnessError::Config(format!("unknown key '{key}'")));
        }
        let get = |key: &str, default: &str| map.get(key).cloned().unwrap_or_else(|| default.to_string());
        let cfg = ExperimentConfig {
            m: parse_scalar("m", &get("m", "128"))?,
            k: parse_scalar("k", &get("k", "16"))?,
            snr_db: parse_number_list(&get("snr_db", "-10:5:30"))?,
            beta: parse_number_list(&get("beta", "1.0"))?,
            trials: parse_scalar("trials", &get("trials", "500"))?,
            seed: parse_scalar("seed", &get("seed", "42"))?,
            methods: parse_methods(&get("methods", "all"))?,
            output_path: map
                .get("out")
                .map(PathBuf::from)
                .ok_or_else(|| HarnessError::Config("no output path given".into()))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |msg: String| Err(HarnessError::Config(msg));
        if self.k == 0 || self.k > self.m {
            return err(format!("need 1 <= k <= m, got m={}, k={}", self.m, self.k));
        }
        if self.trials == 0 {
            return err("trials must be at least 1".into());
        }
        if self.methods.is_empty() {
            return err("no methods selected".into());
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return err("SNR list must be nonempty and finite".into());
        }
        if self.beta.is_empty() || self.beta.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return err("beta values must lie in [0, 1]".into());
        }
        if self.methods.contains(&Method::EstLsZf) {
            if 2 * self.k > self.m {
                return err("Est-LS-ZF needs k <= m/2".into());
            }
            if self.k <= 2 && self.beta.iter().any(|b| *b < 1.0) {
                return err("Est-LS-ZF with beta < 1 needs k >= 3".into());
            }
        }
        if self.beta.iter().any(|b| *b < 1.0) && self.m < 2 {
            return err("beta < 1 needs m >= 2".into());
        }
        Ok(())
    }
}

fn parse_scalar<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.trim().parse().map_err(|_| HarnessError::Config(format!("invalid value '{v}' for {key}")))
}

fn parse_methods(v: &str) -> Result<Vec<Method>, HarnessError> {
    let mut out: Vec<Method> = Vec::new();
    for tok in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let add: Vec<Method> =
            if tok.eq_ignore_ascii_case("all") { Method::SIMULATED.to_vec() } else { vec![tok.parse()?] };
        for m in add {
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    Ok(out)
}

/// Parses `a:step:b` (inclusive range), a comma list, or a single number.
pub fn parse_number_list(v: &str) -> Result<Vec<f64>, HarnessError> {
    let bad = || HarnessError::Config(format!("invalid number list '{v}'"));
    let parts: Vec<&str> = v.split(':').collect();
    match parts.len() {
        1 => v
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()
            .and_then(|l| if l.iter().all(|x| x.is_finite()) { Ok(l) } else { Err(bad()) }),
        3 => {
            let nums: Vec<f64> = parts.iter().map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
            let (a, step, b) = (nums[0], nums[1], nums[2]);
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            let n = ((b - a) / step + 1e-9).floor();
            if n > 1e5 {
                return Err(HarnessError::Config(format!("range '{v}' has too many points")));
            }
            Ok((0..=n as usize).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(bad()),
    }
}

/// Parses a flat `key=value` file; blank lines and `#` comments are skipped.
/// Dashes in keys are read as underscores.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key=value", no + 1)))?;
        map.insert(key.trim().replace('-', "_"), value.trim().to_string());
    }
    Ok(map)
}
