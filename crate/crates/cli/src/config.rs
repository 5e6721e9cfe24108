//! TOML description of a gas and the numerical tolerances used with it.

use std::path::Path;

use serde::Deserialize;
use thermolen::eos::GAS_CONSTANT;
use thermolen::{HeatCapacityModel, MetricConfig, QuadratureConfig, VirialEos};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Virial,
    QuasiIdeal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvKind {
    /// `parameters = [c_v]`
    Constant,
    /// `parameters = [a, b]` for `c_v = a + b·T`
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvModel {
    pub kind: CvKind,
    pub parameters: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub quad_rel_tol: Option<f64>,
    pub quad_abs_tol: Option<f64>,
    pub quad_max_depth: Option<u32>,
    pub metric_rel_tol: Option<f64>,
    pub null_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EosConfig {
    #[serde(default = "default_gas_constant")]
    pub gas_constant: f64,
    pub model: Model,
    /// `B, C, …`; empty for the ideal gas.
    #[serde(default)]
    pub coefficients: Vec<f64>,
    pub excluded_volume: Option<f64>,
    /// Defaults to the monatomic value `1.5 R`.
    pub cv_model: Option<CvModel>,
    #[serde(rename = "coeff_dT")]
    pub coeff_dt: Option<Vec<f64>>,
    #[serde(rename = "coeff_d2T")]
    pub coeff_d2t: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_gas_constant() -> f64 {
    GAS_CONSTANT
}

impl EosConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Usage(e.message().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        match self.model {
            Model::QuasiIdeal => {
                if self.excluded_volume.is_none() {
                    return Err(CliError::Usage("model \"quasi_ideal\" requires excluded_volume".into()));
                }
                if !self.coefficients.is_empty() || self.coeff_dt.is_some() || self.coeff_d2t.is_some() {
                    return Err(CliError::Usage(
                        "model \"quasi_ideal\" takes no virial coefficients or their derivatives".into(),
                    ));
                }
            }
            Model::Virial => {
                if self.excluded_volume.is_some() {
                    return Err(CliError::Usage("excluded_volume applies only to model \"quasi_ideal\"".into()));
                }
            }
        }
        if let Some(cv) = &self.cv_model {
            let expected = match cv.kind {
                CvKind::Constant => 1,
                CvKind::Linear => 2,
            };
            if cv.parameters.len() != expected {
                return Err(CliError::Usage(format!(
                    "cv_model {:?} takes {expected} parameter(s), got {}",
                    cv.kind,
                    cv.parameters.len()
                )));
            }
        }
        Ok(())
    }

    pub fn eos(&self) -> Result<VirialEos, CliError> {
        let eos = match self.model {
            Model::QuasiIdeal => VirialEos::quasi_ideal(self.gas_constant, self.excluded_volume.unwrap_or(0.0))?,
            Model::Virial => {
                let eos = VirialEos::virial(self.gas_constant, self.coefficients.clone())?;
                match &self.coeff_dt {
                    Some(dt) => eos.with_temperature_derivatives(dt.clone(), self.coeff_d2t.clone())?,
                    None if self.coeff_d2t.is_some() => {
                        return Err(CliError::Usage("coeff_d2T given without coeff_dT".into()));
                    }
                    None => eos,
                }
            }
        };
        Ok(eos)
    }

    pub fn cv_model(&self) -> HeatCapacityModel {
        match &self.cv_model {
            None => HeatCapacityModel::monatomic(self.gas_constant),
            Some(CvModel { kind: CvKind::Constant, parameters }) => HeatCapacityModel::Constant(parameters[0]),
            Some(CvModel { kind: CvKind::Linear, parameters }) => {
                HeatCapacityModel::LinearInT { intercept: parameters[0], slope: parameters[1] }
            }
        }
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig, CliError> {
        let d = QuadratureConfig::default();
        let t = &self.tolerances;
        let cfg = QuadratureConfig {
            rel_tol: t.quad_rel_tol.unwrap_or(d.rel_tol),
            abs_tol: t.quad_abs_tol.unwrap_or(d.abs_tol),
            max_depth: t.quad_max_depth.unwrap_or(d.max_depth),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn metric(&self) -> MetricConfig {
        let d = MetricConfig::default();
        MetricConfig { rel_tol: self.tolerances.metric_rel_tol.unwrap_or(d.rel_tol), ..d }
    }

    pub fn null_tol(&self) -> f64 {
        self.tolerances.null_tol.unwrap_or(self.metric().rel_tol)
    }
}
