//! JSON run configuration for `apcone run`.

use std::path::{Path, PathBuf};

use apcone::builtins::Start;
use apcone::PlaneSpec;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PlaneRef {
    Builtin(String),
    Spec(PlaneSpec),
}

/// `0.1`, `[a, b, c]` or `"slowest-curve:0.1"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum StartRef {
    Scalar(f64),
    Coeffs(Vec<f64>),
    Text(String),
}

impl StartRef {
    pub fn resolve(&self) -> Result<Start, String> {
        match self {
            StartRef::Scalar(t) => Ok(Start::Coeffs(vec![*t])),
            StartRef::Coeffs(xs) => Ok(Start::Coeffs(xs.clone())),
            StartRef::Text(s) => s.parse().map_err(|e| format!("start: {e}")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub plane: PlaneRef,
    /// Branch of a builtin example.
    #[serde(default)]
    pub variant: Option<String>,
    /// Omitted: seeded random start near the anchor.
    #[serde(default)]
    pub start: Option<StartRef>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub tol: f64,
    #[serde(default)]
    pub stride: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if cfg.tol < 0.0 {
            return Err("tol must be non-negative".into());
        }
        if let PlaneRef::Spec(spec) = &cfg.plane {
            spec.validate().map_err(|e| e.to_string())?;
        }
        Ok(cfg)
    }

    /// CSV destination: `out`, else the config path with a `.csv` extension.
    pub fn out_path(&self, config: &Path) -> PathBuf {
        self.out.clone().unwrap_or_else(|| config.with_extension("csv"))
    }
}
