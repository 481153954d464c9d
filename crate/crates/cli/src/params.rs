use nofic_core::channel::{db_to_linear, ChannelCoefficients};
use nofic_core::ChannelParameters;
use serde::Deserialize;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub snr_fwd_1: f64,
    pub snr_fwd_2: f64,
    pub inr_12: f64,
    pub inr_21: f64,
    pub snr_bwd_1: f64,
    pub snr_bwd_2: f64,
    /// `db` or `linear`.
    pub units: String,
}

impl ParamsFile {
    pub fn to_params(&self) -> Result<ChannelParameters, CliError> {
        let raw = [
            ("snr_fwd_1", self.snr_fwd_1),
            ("snr_fwd_2", self.snr_fwd_2),
            ("inr_12", self.inr_12),
            ("inr_21", self.inr_21),
            ("snr_bwd_1", self.snr_bwd_1),
            ("snr_bwd_2", self.snr_bwd_2),
        ];
        let db = match self.units.as_str() {
            "db" => true,
            "linear" => false,
            other => return Err(CliError::Invalid(format!("units: expected `db` or `linear`, got `{other}`"))),
        };
        let mut v = [0.0; 6];
        for (k, (name, x)) in raw.into_iter().enumerate() {
            if !x.is_finite() {
                return Err(CliError::Invalid(format!("{name}: value must be finite")));
            }
            v[k] = if db { db_to_linear(x) } else { x };
        }
        Ok(ChannelParameters::from_array(v)?)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    let msg = e.to_string();
    CliError::Invalid(format!("{}: {}", path.display(), msg.lines().next().unwrap_or("")))
}

pub fn load_params(path: &Path) -> Result<ChannelParameters, CliError> {
    let text = read(path)?;
    let file: ParamsFile = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    file.to_params()
}

pub fn load_coefficients(path: &Path) -> Result<ChannelCoefficients, CliError> {
    let text = read(path)?;
    // Gain validation runs during deserialization and names the field.
    serde_json::from_str(&text).map_err(|e| json_error(path, e))
}

/// Parses `start:stop:step`. The stop is included when it lies within half a
/// step of the last grid point.
pub fn parse_range(field: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Invalid(format!("{field}: {why} in `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let mut v = [0.0; 3];
    for (k, p) in parts.iter().enumerate() {
        v[k] = p.trim().parse::<f64>().map_err(|_| bad("not a number"))?;
        if !v[k].is_finite() {
            return Err(bad("not finite"));
        }
    }
    let [start, stop, step] = v;
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop is below start"));
    }
    let n = ((stop - start) / step + 0.5).floor() as usize + 1;
    Ok((0..n).map(|k| start + k as f64 * step).collect())
}

pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Rounds to six decimals for structured output.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}
