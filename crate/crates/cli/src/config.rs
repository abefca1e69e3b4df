//! JSON run configuration: scenario parameters plus run controls.
//! File values are overridden by command-line flags (flags win).

use std::path::Path;

use serde::{Deserialize, Serialize};
use vne_core::ScenarioParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub eps: f64,
    pub r: f64,
    pub n_k: usize,
    pub dim: usize,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub record_every: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub x_points: usize,
    pub tol_scale: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            eps: 1.0,
            r: 0.5,
            n_k: 2,
            dim: 16,
            alpha: 5.0,
            c1: 0.0,
            c2: 0.0,
            t0: -25.0,
            t1: 60.0,
            dt: 1e-3,
            record_every: 20,
            x_min: -8.0,
            x_max: 8.0,
            x_points: 321,
            tol_scale: 1.0,
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))
    }

    /// Used by tooling and the round-trip test; the CLI itself only reads.
    #[allow(dead_code)]
    pub fn save(&self, path: &Path) -> Result<(), String> {
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(path, text)
            .map_err(|e| format!("cannot write config {}: {e}", path.display()))
    }

    pub fn params(&self) -> ScenarioParams {
        ScenarioParams {
            eps: self.eps,
            r: self.r,
            n_k: self.n_k,
            dim: self.dim,
            alpha: self.alpha,
            c1: self.c1,
            c2: self.c2,
        }
    }

    pub fn x_grid(&self) -> Vec<f64> {
        let n = self.x_points.max(2);
        (0..n)
            .map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let cfg = ScenarioConfig { alpha: 7.25, dim: 12, dt: 5e-4, ..Default::default() };
        let dir = std::env::temp_dir().join("vne-config-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.json");
        cfg.save(&path).unwrap();
        let loaded = ScenarioConfig::load(&path).unwrap();
        assert_eq!(cfg, loaded);
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<ScenarioConfig>("{\"bogus\": 1}");
        assert!(err.is_err());
    }
}
