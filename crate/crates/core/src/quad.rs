//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Each panel is integrated with the 15-point Kronrod rule and the embedded
//! 7-point Gauss rule; `|K15 − G7|` is the panel error estimate. The panel with
//! the largest estimate is bisected until the summed estimate meets the
//! tolerance. Panel values are summed in order of their left endpoint, so the
//! result depends only on the inputs.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on `[0, 1]`; odd indices are the Gauss points.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for `XGK[1], XGK[3], XGK[5]` and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Hard cap on the number of live panels.
const MAX_PANELS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any panel.
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, max_depth: 60 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::Config("quadrature max_depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::Domain(format!("integrand is not finite at x = {x}")))
        }
    };

    let fc = eval(centre)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let rounding = 50.0 * f64::EPSILON * abs_sum * half.abs();
    let err = ((kronrod - gauss) * half).abs().max(rounding);
    Ok((value, err))
}

/// Integrates `f` over `[a, b]`.
///
/// Integrand errors propagate unchanged; a non-finite integrand value is a
/// domain error. `a == b` yields zero without evaluating `f`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration bounds must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, err_estimate: 0.0, evaluations: 0 });
    }
    if a > b {
        return Err(Error::Domain(format!("integration bounds out of order: [{a}, {b}]")));
    }

    let (value, err) = gauss_kronrod(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err, depth: 0 });

    loop {
        let (total, total_err) = summarize(&heap);
        let tolerance = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tolerance {
            return Ok(Quadrature { value: total, err_estimate: total_err, evaluations });
        }

        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        let splittable = worst.depth < cfg.max_depth && worst.a < mid && mid < worst.b;
        if !splittable || heap.len() + 2 > MAX_PANELS {
            return Err(Error::NonConvergence { value: total, err_estimate: total_err, tolerance });
        }

        let (v1, e1) = gauss_kronrod(&mut f, worst.a, mid)?;
        let (v2, e2) = gauss_kronrod(&mut f, mid, worst.b)?;
        evaluations += 30;
        let depth = worst.depth + 1;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1, depth });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2, depth });
    }
}

fn summarize(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ok(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<f64> {
        move |x| Ok(f(x))
    }

    #[test]
    fn reciprocal_gives_ln2() {
        let q = integrate(ok(|x| 1.0 / x), 1.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert!((q.value - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn quadratic_is_exact() {
        let q = integrate(ok(|x| x * x), 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(q.value, 1.0 / 3.0, max_relative = 4.0 * f64::EPSILON);
        assert_eq!(q.evaluations, 15);
    }

    #[test]
    fn empty_interval_is_zero() {
        let q = integrate(ok(|_| panic!("must not evaluate")), 2.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert!(matches!(integrate(ok(|x| x), 1.0, 0.0, &QuadratureConfig::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate(
            |x| if x > 0.5 { Err(Error::Domain("boom".into())) } else { Ok(x) },
            0.0,
            1.0,
            &QuadratureConfig::default(),
        );
        assert_eq!(r.unwrap_err(), Error::Domain("boom".into()));
        let r = integrate(ok(|x| 1.0 / (x - 0.5)), 0.0, 1.0, &QuadratureConfig::default());
        assert!(r.is_err());
    }

    #[test]
    fn depth_limit_reports_non_convergence() {
        let cfg = QuadratureConfig { max_depth: 1, ..Default::default() };
        let r = integrate(ok(|x: f64| x.sqrt()), 0.0, 1.0, &cfg);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = QuadratureConfig { rel_tol: 0.0, ..Default::default() };
        assert!(matches!(integrate(ok(|x| x), 0.0, 1.0, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (10.0 * x).sin() * (-x).exp();
        let a = integrate(ok(f), 0.0, 7.0, &QuadratureConfig::default()).unwrap();
        let b = integrate(ok(f), 0.0, 7.0, &QuadratureConfig::default()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.err_estimate.to_bits(), b.err_estimate.to_bits());
    }
}
