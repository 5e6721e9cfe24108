//! Virial equation of state truncated at order `n`,
//!
//! ```text
//! p = RT/v + RT·B/v² + RT·C/v³ + … + RT·Z/vⁿ
//! ```
//!
//! and the quasi-ideal (excluded volume) variant `p = RT/(v − b)`.
//!
//! Coefficients are the values at the isotherm of interest. Their temperature
//! derivatives are optional and only read by [`crate::response`].

use crate::error::{Error, Result};

/// Default molar gas constant, J·mol⁻¹·K⁻¹.
pub const GAS_CONSTANT: f64 = 8.314;

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 8;

/// Labels of the expansion coefficients, `X₁ = 1, X₂ = B, X₃ = C, …`.
pub const COEFFICIENT_LABELS: [&str; MAX_ORDER] = ["1", "B", "C", "D", "E", "F", "G", "H"];

/// A point `(T, v)` on the equilibrium surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePoint {
    pub temperature: f64,
    pub volume: f64,
}

impl StatePoint {
    pub fn new(temperature: f64, volume: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
        }
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::Domain(format!("molar volume must be positive, got {volume}")));
        }
        Ok(Self { temperature, volume })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirialEos {
    gas_constant: f64,
    /// `B, C, …`; empty for the ideal and quasi-ideal gas.
    coefficients: Vec<f64>,
    excluded_volume: Option<f64>,
    coeff_dt: Option<Vec<f64>>,
    coeff_d2t: Option<Vec<f64>>,
}

impl VirialEos {
    pub fn ideal(gas_constant: f64) -> Result<Self> {
        Self::virial(gas_constant, Vec::new())
    }

    /// Virial gas of order `coefficients.len() + 1`.
    pub fn virial(gas_constant: f64, coefficients: Vec<f64>) -> Result<Self> {
        check_gas_constant(gas_constant)?;
        if coefficients.len() + 1 > MAX_ORDER {
            return Err(Error::Config(format!(
                "virial order {} exceeds the maximum of {MAX_ORDER}",
                coefficients.len() + 1
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::Config(format!("non-finite virial coefficient {c}")));
        }
        Ok(Self { gas_constant, coefficients, excluded_volume: None, coeff_dt: None, coeff_d2t: None })
    }

    pub fn quasi_ideal(gas_constant: f64, excluded_volume: f64) -> Result<Self> {
        check_gas_constant(gas_constant)?;
        if !(excluded_volume.is_finite() && excluded_volume >= 0.0) {
            return Err(Error::Config(format!("excluded volume must be non-negative, got {excluded_volume}")));
        }
        Ok(Self {
            gas_constant,
            coefficients: Vec::new(),
            excluded_volume: Some(excluded_volume),
            coeff_dt: None,
            coeff_d2t: None,
        })
    }

    /// Attaches first (and optionally second) temperature derivatives of the
    /// coefficients, one entry per coefficient.
    pub fn with_temperature_derivatives(mut self, coeff_dt: Vec<f64>, coeff_d2t: Option<Vec<f64>>) -> Result<Self> {
        let n = self.coefficients.len();
        if coeff_dt.len() != n {
            return Err(Error::Config(format!(
                "expected {n} coefficient temperature derivatives, got {}",
                coeff_dt.len()
            )));
        }
        if let Some(d2) = &coeff_d2t {
            if d2.len() != n {
                return Err(Error::Config(format!("expected {n} second temperature derivatives, got {}", d2.len())));
            }
        }
        self.coeff_dt = Some(coeff_dt);
        self.coeff_d2t = coeff_d2t;
        Ok(self)
    }

    pub fn gas_constant(&self) -> f64 {
        self.gas_constant
    }

    /// Truncation order `n`; 1 for the ideal and quasi-ideal gas.
    pub fn order(&self) -> usize {
        self.coefficients.len() + 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn excluded_volume(&self) -> Option<f64> {
        self.excluded_volume
    }

    pub fn coeff_dt(&self) -> Option<&[f64]> {
        self.coeff_dt.as_deref()
    }

    pub fn coeff_d2t(&self) -> Option<&[f64]> {
        self.coeff_d2t.as_deref()
    }

    pub fn is_quasi_ideal(&self) -> bool {
        self.excluded_volume.is_some()
    }

    /// `X₁ = 1, X₂ = B, …, Xₙ = Z`.
    pub fn expansion(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(1.0).chain(self.coefficients.iter().copied())
    }

    /// Validates a volume on an isotherm: `v > 0`, and `v > b` for the
    /// quasi-ideal gas.
    pub fn check_state(&self, s: StatePoint) -> Result<()> {
        let s = StatePoint::new(s.temperature, s.volume)?;
        if let Some(b) = self.excluded_volume {
            if s.volume <= b {
                return Err(Error::Domain(format!("molar volume {} must exceed the excluded volume {b}", s.volume)));
            }
        }
        Ok(())
    }

    pub fn pressure(&self, s: StatePoint) -> Result<f64> {
        self.check_state(s)?;
        let rt = self.gas_constant * s.temperature;
        let v = s.volume;
        if let Some(b) = self.excluded_volume {
            return Ok(rt / (v - b));
        }
        let mut p = rt / v;
        let mut vk = v;
        for &x in &self.coefficients {
            vk *= v;
            p += rt * x / vk;
        }
        Ok(p)
    }

    /// `(∂p/∂v)_T`, differentiated term by term.
    pub fn dp_dv(&self, s: StatePoint) -> Result<f64> {
        self.check_state(s)?;
        let rt = self.gas_constant * s.temperature;
        let v = s.volume;
        if let Some(b) = self.excluded_volume {
            let d = v - b;
            return Ok(-rt / (d * d));
        }
        let mut vk = v * v;
        let mut dp = -rt / vk;
        for (k, &x) in self.coefficients.iter().enumerate() {
            vk *= v;
            dp -= (k + 2) as f64 * rt * x / vk;
        }
        Ok(dp)
    }

    /// `(∂p/∂T)_v`, including the coefficient temperature derivatives.
    ///
    /// Requires [`Self::with_temperature_derivatives`] whenever the expansion
    /// has coefficients beyond the ideal term.
    pub fn dp_dt(&self, s: StatePoint) -> Result<f64> {
        self.check_state(s)?;
        let r = self.gas_constant;
        let t = s.temperature;
        let v = s.volume;
        if let Some(b) = self.excluded_volume {
            return Ok(r / (v - b));
        }
        if self.coefficients.is_empty() {
            return Ok(r / v);
        }
        let dt = self.coeff_dt.as_deref().ok_or_else(|| {
            Error::Config("(dp/dT)_v needs temperature derivatives of the virial coefficients".into())
        })?;
        let mut dp = r / v;
        let mut vk = v;
        for (&x, &dx) in self.coefficients.iter().zip(dt) {
            vk *= v;
            dp += r * (x + t * dx) / vk;
        }
        Ok(dp)
    }

    /// `1 + 2B/v + 3C/v² + … + nZ/vⁿ⁻¹`, so that `−(∂p/∂v)_T = (RT/v²)·σ(v)`.
    ///
    /// Only meaningful for the virial family.
    pub fn stiffness_factor(&self, v: f64) -> f64 {
        let mut acc = 1.0;
        let mut vk = 1.0;
        for (k, &x) in self.coefficients.iter().enumerate() {
            vk *= v;
            acc += (k + 2) as f64 * x / vk;
        }
        acc
    }

    /// `∫_{v1}^{v2} p dv` at temperature `t`, from the exact antiderivative.
    pub fn work(&self, t: f64, v1: f64, v2: f64) -> Result<f64> {
        self.check_state(StatePoint::new(t, v1)?)?;
        self.check_state(StatePoint::new(t, v2)?)?;
        if v1 > v2 {
            return Ok(-self.ordered_work(t, v2, v1));
        }
        Ok(self.ordered_work(t, v1, v2))
    }

    fn ordered_work(&self, t: f64, v1: f64, v2: f64) -> f64 {
        let rt = self.gas_constant * t;
        if let Some(b) = self.excluded_volume {
            return rt * ((v2 - v1) / (v1 - b)).ln_1p();
        }
        let mut bracket = ((v2 - v1) / v1).ln_1p();
        let (mut p1, mut p2) = (1.0, 1.0);
        for (k, &x) in self.coefficients.iter().enumerate() {
            p1 *= v1;
            p2 *= v2;
            let m = (k + 1) as f64;
            bracket += x / m * (1.0 / p1 - 1.0 / p2);
        }
        rt * bracket
    }

    /// `f(T, v) − f(T, v_ref)`; the additive function of temperature cancels.
    pub fn helmholtz_relative(&self, t: f64, v_ref: f64, v: f64) -> Result<f64> {
        Ok(-self.work(t, v_ref, v)?)
    }
}

fn check_gas_constant(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("gas constant must be positive, got {r}")))
    }
}
