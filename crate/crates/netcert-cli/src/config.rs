//! Run configuration with the precedence CLI flags > config file > defaults.
//! The config file is plain `key = value` lines with `#` comments; the only
//! environment variable honoured is `NETCERT_OUT_DIR`, which redirects
//! relative output paths.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "table" => Ok(Self::Table),
            other => Err(format!("unknown format {other:?} (json|csv|table)")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub noise: [f64; 3],
    pub junk_dim: usize,
    pub restarts: usize,
    pub format: OutputFormat,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub tolerance_algebraic: f64,
    pub tolerance_iterative: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            noise: [1.0, 1.0, 1.0],
            junk_dim: 1,
            restarts: 64,
            format: OutputFormat::Json,
            out: None,
            tolerance_algebraic: 1e-10,
            tolerance_iterative: 1e-8,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.tolerance_algebraic <= 0.0 || self.tolerance_iterative <= 0.0 {
            return Err("tolerances must be positive".into());
        }
        for v in self.noise {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("visibility {v} outside [0,1]"));
            }
        }
        if self.junk_dim != 1 && self.junk_dim != 2 {
            return Err(format!("junk-dim {} (need 1 or 2)", self.junk_dim));
        }
        if self.restarts == 0 {
            return Err("restarts must be positive".into());
        }
        Ok(())
    }

    /// Resolve the output path: explicit `--out`, possibly redirected under
    /// `NETCERT_OUT_DIR` when relative.
    pub fn resolved_out(&self) -> Option<PathBuf> {
        let out = self.out.clone()?;
        if out.is_relative() {
            if let Ok(dir) = std::env::var("NETCERT_OUT_DIR") {
                return Some(Path::new(&dir).join(out));
            }
        }
        Some(out)
    }
}

pub fn parse_noise(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("noise needs three comma-separated visibilities, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p.trim().parse::<f64>().map_err(|e| format!("bad visibility {p:?}: {e}"))?;
    }
    Ok(out)
}

/// Parse a `key = value` config file into a map; unknown keys error.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    const KNOWN: [&str; 8] = [
        "seed",
        "noise",
        "junk-dim",
        "restarts",
        "format",
        "out",
        "tolerance-algebraic",
        "tolerance-iterative",
    ];
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
        let key = key.trim().to_string();
        if !KNOWN.contains(&key.as_str()) {
            return Err(format!("config line {}: unknown key {key:?}", n + 1));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Overlay config-file values onto defaults (CLI flags are applied on top
/// by the caller).
pub fn apply_config_file(cfg: &mut RunConfig, map: &BTreeMap<String, String>) -> Result<(), String> {
    for (key, value) in map {
        match key.as_str() {
            "seed" => cfg.seed = value.parse().map_err(|e| format!("seed: {e}"))?,
            "noise" => cfg.noise = parse_noise(value)?,
            "junk-dim" => cfg.junk_dim = value.parse().map_err(|e| format!("junk-dim: {e}"))?,
            "restarts" => cfg.restarts = value.parse().map_err(|e| format!("restarts: {e}"))?,
            "format" => cfg.format = value.parse()?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            "tolerance-algebraic" => {
                cfg.tolerance_algebraic =
                    value.parse().map_err(|e| format!("tolerance-algebraic: {e}"))?
            }
            "tolerance-iterative" => {
                cfg.tolerance_iterative =
                    value.parse().map_err(|e| format!("tolerance-iterative: {e}"))?
            }
            _ => unreachable!("filtered by parse_config_file"),
        }
    }
    Ok(())
}
