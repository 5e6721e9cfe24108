//! Response functions `(c_v, c_p, α, κ_T)` feeding the metric.

use crate::eos::{StatePoint, VirialEos};
use crate::error::{Error, Result};

/// Heat capacities and mechanical coefficients at one state point.
///
/// `c_p` is always derived from `c_v` through `c_p − c_v = vTα²/κ_T`, except
/// through [`ResponseSet::from_parts`], which accepts arbitrary values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseSet {
    pub c_v: f64,
    pub c_p: f64,
    pub alpha: f64,
    pub kappa_t: f64,
}

impl ResponseSet {
    pub fn new(c_v: f64, alpha: f64, kappa_t: f64, s: StatePoint) -> Result<Self> {
        if !(c_v.is_finite() && alpha.is_finite() && kappa_t.is_finite()) {
            return Err(Error::Domain("response functions must be finite".into()));
        }
        if kappa_t == 0.0 {
            return Err(Error::Domain("isothermal compressibility must be non-zero".into()));
        }
        let c_p = c_v + s.volume * s.temperature * alpha * alpha / kappa_t;
        Ok(Self { c_v, c_p, alpha, kappa_t })
    }

    /// Unchecked construction; used for hand-built, possibly unstable inputs.
    pub fn from_parts(c_v: f64, c_p: f64, alpha: f64, kappa_t: f64) -> Self {
        Self { c_v, c_p, alpha, kappa_t }
    }

    /// `c_p − c_v − vTα²/κ_T`.
    pub fn mayer_residual(&self, s: StatePoint) -> f64 {
        self.c_p - self.c_v - s.volume * s.temperature * self.alpha * self.alpha / self.kappa_t
    }

    /// `κ_T > 0` and `c_v > 0`.
    pub fn is_stable(&self) -> bool {
        self.kappa_t > 0.0 && self.c_v > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatCapacityModel {
    Constant(f64),
    /// `c_v = intercept + slope·T`.
    LinearInT {
        intercept: f64,
        slope: f64,
    },
}

impl HeatCapacityModel {
    /// Monatomic ideal-gas value `(3/2)R`.
    pub fn monatomic(gas_constant: f64) -> Self {
        HeatCapacityModel::Constant(1.5 * gas_constant)
    }

    pub fn c_v(&self, temperature: f64) -> f64 {
        match *self {
            HeatCapacityModel::Constant(c) => c,
            HeatCapacityModel::LinearInT { intercept, slope } => intercept + slope * temperature,
        }
    }
}

/// Derives the response functions of a virial (or quasi-ideal) gas.
pub fn from_eos(eos: &VirialEos, s: StatePoint, cv_model: HeatCapacityModel) -> Result<ResponseSet> {
    let dp_dv = eos.dp_dv(s)?;
    if dp_dv >= 0.0 {
        return Err(Error::Stability { temperature: s.temperature, lo: s.volume, hi: s.volume });
    }
    let dp_dt = eos.dp_dt(s)?;
    let v = s.volume;
    let kappa_t = -1.0 / (v * dp_dv);
    let alpha = -dp_dt / (v * dp_dv);
    let c_v = cv_model.c_v(s.temperature);
    if !(c_v.is_finite() && c_v > 0.0) {
        return Err(Error::Config(format!(
            "heat capacity model gives non-positive c_v = {c_v} at T = {}",
            s.temperature
        )));
    }
    ResponseSet::new(c_v, alpha, kappa_t, s)
}

/// Anything that can supply response functions along a path.
pub trait ResponseSource {
    fn response_at(&self, s: StatePoint) -> Result<ResponseSet>;
}

/// Response functions derived from an equation of state.
#[derive(Debug, Clone)]
pub struct EosResponse {
    pub eos: VirialEos,
    pub cv_model: HeatCapacityModel,
}

impl ResponseSource for EosResponse {
    fn response_at(&self, s: StatePoint) -> Result<ResponseSet> {
        from_eos(&self.eos, s, self.cv_model)
    }
}

impl<F> ResponseSource for F
where
    F: Fn(StatePoint) -> Result<ResponseSet>,
{
    fn response_at(&self, s: StatePoint) -> Result<ResponseSet> {
        self(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::GAS_CONSTANT;
    use approx::assert_relative_eq;

    const R: f64 = GAS_CONSTANT;

    fn sp(t: f64, v: f64) -> StatePoint {
        StatePoint::new(t, v).unwrap()
    }

    #[test]
    fn ideal_gas_response() {
        let eos = VirialEos::ideal(R).unwrap();
        let r = from_eos(&eos, sp(300.0, 0.02), HeatCapacityModel::monatomic(R)).unwrap();
        assert_relative_eq!(r.alpha, 1.0 / 300.0, max_relative = 1e-14);
        assert_relative_eq!(r.kappa_t, 8.018_603_159_329_645e-6, max_relative = 1e-14);
        assert_relative_eq!(r.c_p, 2.5 * R, max_relative = 1e-14);
        let p = eos.pressure(sp(300.0, 0.02)).unwrap();
        assert_relative_eq!(r.alpha * 300.0, 1.0, max_relative = 1e-12);
        assert_relative_eq!(r.kappa_t * p, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn quasi_ideal_response() {
        let b = 3e-5;
        let eos = VirialEos::quasi_ideal(R, b).unwrap();
        let (t, v) = (410.0, 0.004);
        let r = from_eos(&eos, sp(t, v), HeatCapacityModel::monatomic(R)).unwrap();
        assert_relative_eq!(r.kappa_t, (v - b) * (v - b) / (v * R * t), max_relative = 1e-13);
        assert_relative_eq!(r.alpha, (v - b) / (v * t), max_relative = 1e-13);
    }

    #[test]
    fn constant_coefficients_give_alpha_over_kappa_equal_p_over_t() {
        let eos = VirialEos::virial(R, vec![-1e-4, 2e-8, -3e-12])
            .unwrap()
            .with_temperature_derivatives(vec![0.0; 3], None)
            .unwrap();
        let s = sp(275.0, 0.003);
        let r = from_eos(&eos, s, HeatCapacityModel::monatomic(R)).unwrap();
        assert_relative_eq!(r.alpha / r.kappa_t, eos.pressure(s).unwrap() / 275.0, max_relative = 1e-12);
        assert_relative_eq!(r.kappa_t, -1.0 / (s.volume * eos.dp_dv(s).unwrap()), max_relative = 1e-12);
        assert!(r.mayer_residual(s).abs() <= 1e-9 * r.c_p);
    }

    #[test]
    fn coefficient_temperature_slope_enters_alpha() {
        let eos = VirialEos::virial(R, vec![-1e-4]).unwrap().with_temperature_derivatives(vec![2e-7], None).unwrap();
        let s = sp(300.0, 0.01);
        let r = from_eos(&eos, s, HeatCapacityModel::monatomic(R)).unwrap();
        let dp_dt = R / 0.01 + R * (-1e-4 + 300.0 * 2e-7) / 1e-4;
        let dp_dv = eos.dp_dv(s).unwrap();
        assert_relative_eq!(r.alpha, -dp_dt / (0.01 * dp_dv), max_relative = 1e-13);
    }

    #[test]
    fn missing_derivatives_is_config_error() {
        let eos = VirialEos::virial(R, vec![-1e-4]).unwrap();
        let r = from_eos(&eos, sp(300.0, 0.02), HeatCapacityModel::monatomic(R));
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn unstable_state_rejected() {
        // 1 + 2B/v < 0 at v = 1e-4 for B = -1e-4.
        let eos = VirialEos::virial(R, vec![-1e-4]).unwrap().with_temperature_derivatives(vec![0.0], None).unwrap();
        let r = from_eos(&eos, sp(300.0, 1e-4), HeatCapacityModel::monatomic(R));
        assert!(matches!(r, Err(Error::Stability { .. })));
    }

    #[test]
    fn linear_heat_capacity() {
        let m = HeatCapacityModel::LinearInT { intercept: 10.0, slope: 0.01 };
        assert_relative_eq!(m.c_v(300.0), 13.0);
    }
}
