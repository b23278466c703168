use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::error_analysis::DeviationSampling;
use crate::Complex64;

/// One experiment, read from a JSON document with exactly these keys.
///
/// ```json
/// {"eta": [0.001, 0.0], "g": 0.05, "eps": 0.001, "delta_n_mag": 0.0,
///  "delta_f_mag": 0.001, "samples": 100000, "seed": 42,
///  "sweep": {"param": "g", "start": 0.01, "stop": 1.5707963267948966,
///            "count": 50, "spacing": "linear"}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `[re, im]`.
    pub eta: [f64; 2],
    pub g: f64,
    pub eps: f64,
    pub delta_n_mag: f64,
    pub delta_f_mag: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
    #[serde(default)]
    pub delta_f_mode: DeltaFMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Sweeps `|η|`, keeping the configured phase (real axis if `η = 0`).
    Eta,
    G,
    Eps,
    DeltaFMag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaFMode {
    #[default]
    UniformAngle,
    Gaussian,
}

impl From<DeltaFMode> for DeviationSampling {
    fn from(m: DeltaFMode) -> Self {
        match m {
            DeltaFMode::UniformAngle => DeviationSampling::UniformAngle,
            DeltaFMode::Gaussian => DeviationSampling::Gaussian,
        }
    }
}

fn config_err(field: &str, reason: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("field `{field}`: {reason}"))
}

fn check_magnitude(field: &str, v: f64) -> Result<(), HarnessError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(config_err(
            field,
            format!("{v} must be finite and non-negative"),
        ))
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io_at(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !self.eta.iter().all(|v| v.is_finite()) {
            return Err(config_err("eta", "components must be finite"));
        }
        check_magnitude("g", self.g)?;
        check_magnitude("eps", self.eps)?;
        check_magnitude("delta_n_mag", self.delta_n_mag)?;
        check_magnitude("delta_f_mag", self.delta_f_mag)?;
        if self.samples == 0 {
            return Err(config_err("samples", "must be at least 1"));
        }
        if let Some(axis) = &self.sweep {
            if axis.count < 2 {
                return Err(config_err("sweep.count", format!("{} < 2", axis.count)));
            }
            check_magnitude("sweep.start", axis.start)?;
            check_magnitude("sweep.stop", axis.stop)?;
            if axis.spacing == Spacing::Log && (axis.start <= 0.0 || axis.stop <= 0.0) {
                return Err(config_err(
                    "sweep.spacing",
                    "log spacing needs positive start and stop",
                ));
            }
        }
        Ok(())
    }

    pub fn eta_complex(&self) -> Complex64 {
        Complex64::new(self.eta[0], self.eta[1])
    }

    /// The configured point alone when there is no sweep.
    pub fn points(&self) -> Vec<ExperimentConfig> {
        let Some(axis) = self.sweep else {
            return vec![self.clone()];
        };
        axis.values()
            .into_iter()
            .map(|v| self.with_param(axis.param, v))
            .collect()
    }

    fn with_param(&self, param: SweepParam, value: f64) -> ExperimentConfig {
        let mut c = self.clone();
        c.sweep = None;
        match param {
            SweepParam::Eta => {
                let eta = self.eta_complex();
                let phase = if eta.norm() > 0.0 {
                    eta / eta.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                };
                let v = phase * value;
                c.eta = [v.re, v.im];
            }
            SweepParam::G => c.g = value,
            SweepParam::Eps => c.eps = value,
            SweepParam::DeltaFMag => c.delta_f_mag = value,
        }
        c
    }
}

impl SweepAxis {
    /// Endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i + 1 == self.count {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => {
                        (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"eta": [0.001, 0.0], "g": 0.05, "eps": 0.001, "delta_n_mag": 0.0,
        "delta_f_mag": 0.001, "samples": 100, "seed": 7"#;

    fn with(extra: &str) -> String {
        format!("{BASE}{extra}}}")
    }

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::from_json_str(&with("")).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.delta_f_mode, DeltaFMode::UniformAngle);
        assert_eq!(c.points(), vec![c.clone()]);
    }

    #[test]
    fn unknown_key_names_line_and_field() {
        let text = "{\n  \"eta\": [0.1, 0.0],\n  \"gee\": 0.1\n}";
        let msg = ExperimentConfig::from_json_str(text)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("line 3") && msg.contains("gee"), "{msg}");
    }

    #[test]
    fn rejects_invalid_values() {
        for extra in [
            r#", "sweep": {"param": "g", "start": 0.1, "stop": 0.2, "count": 1}"#,
            r#", "sweep": {"param": "g", "start": 0.0, "stop": 0.2, "count": 5, "spacing": "log"}"#,
            r#", "sweep": {"param": "delta_n_mag", "start": 0.1, "stop": 0.2, "count": 5}"#,
        ] {
            let err = ExperimentConfig::from_json_str(&with(extra)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{extra}");
        }
        let neg = BASE.replace("\"eps\": 0.001", "\"eps\": -0.001");
        let msg = ExperimentConfig::from_json_str(&format!("{neg}}}"))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("`eps`"), "{msg}");
        let zero = BASE.replace("\"samples\": 100", "\"samples\": 0");
        assert!(ExperimentConfig::from_json_str(&format!("{zero}}}")).is_err());
    }

    #[test]
    fn sweep_points() {
        let c = ExperimentConfig::from_json_str(&with(
            r#", "sweep": {"param": "eta", "start": 0.001, "stop": 1.0, "count": 4, "spacing": "log"}"#,
        ))
        .unwrap();
        let etas: Vec<f64> = c.points().iter().map(|p| p.eta[0]).collect();
        assert_eq!(etas[0], 0.001);
        assert_eq!(etas[3], 1.0);
        assert!((etas[1] - 0.01).abs() < 1e-15 && (etas[2] - 0.1).abs() < 1e-14);
        assert!(c.points().iter().all(|p| p.sweep.is_none()));

        let axis = SweepAxis {
            param: SweepParam::G,
            start: 0.0,
            stop: 1.0,
            count: 5,
            spacing: Spacing::Linear,
        };
        assert_eq!(axis.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn eta_sweep_keeps_phase() {
        let mut c = ExperimentConfig::from_json_str(&with("")).unwrap();
        c.eta = [0.0, 0.5];
        let p = c.with_param(SweepParam::Eta, 0.2);
        assert!(p.eta[0].abs() < 1e-17 && (p.eta[1] - 0.2).abs() < 1e-16);
    }
}
