//! Thermodynamic length under the Helmholtz potential metric.
//!
//! Along an isotherm only `η22 = 1/(v·κ_T) = −(∂p/∂v)_T` survives, so
//!
//! ```text
//! L^T = ∫ √(−(∂p/∂v)_T) dv
//! ```
//!
//! For the virial family `−(∂p/∂v)_T = (RT/v²)·σ(v)` with
//! `σ(v) = 1 + 2B/v + 3C/v² + …`, and the length is available in closed form
//! for the ideal, quasi-ideal, second- and third-order gases. Every length can
//! also be computed by quadrature, which serves as the reference for the closed
//! forms.
//!
//! General paths `(T(ξ), v(ξ))` are handled by [`path_length`], which splits
//! the path wherever the causal character of the tangent changes.

use std::fmt;

use crate::eos::{StatePoint, VirialEos, COEFFICIENT_LABELS};
use crate::error::{Error, Result};
use crate::metric::Character;
use crate::quad::{integrate, QuadratureConfig};
use crate::response::ResponseSource;

/// Uniform samples used to scan an isotherm for loss of mechanical stability.
const STABILITY_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthMethod {
    ClosedForm,
    Quadrature,
    TheoremDecomposition,
}

impl fmt::Display for LengthMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthMethod::ClosedForm => "closed_form",
            LengthMethod::Quadrature => "quadrature",
            LengthMethod::TheoremDecomposition => "theorem_decomposition",
        })
    }
}

/// `Forward` when the requested interval has `v1 <= v2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reversed,
}

/// Which decomposition of the isotherm length to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremForm {
    /// Boundary work term, integration-by-parts correction and the
    /// lower-order coefficient integrals.
    WorkForm,
    /// One integral per expansion coefficient.
    CoefficientSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub name: String,
    pub value: f64,
}

impl Term {
    fn new(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthReport {
    /// Non-negative magnitude of the length.
    pub value: f64,
    pub method: LengthMethod,
    pub err_estimate: f64,
    /// `∫ p dv` from `v1` to `v2` in the requested direction.
    pub work: f64,
    pub decomposition: Vec<Term>,
    pub orientation: Orientation,
}

/// Both printed closed forms of the second-order length, plus the split into
/// the ideal-gas length and the interaction correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderForms {
    /// Work-based expression: `W/√(RT) + √(RT)[ln(…) − B(v2−v1)/(v1v2) − 2(ρ2−ρ1)]`.
    pub work_form: f64,
    /// `2√(RT)[ln((√(v2+2B)+√v2)/(√(v1+2B)+√v1)) − (ρ2−ρ1)]`.
    pub root_form: f64,
    /// `√(RT)·ln(v2/v1)`.
    pub ideal: f64,
    /// `√(RT)[ln((1+B/v2+ρ2)/(1+B/v1+ρ1)) − 2(ρ2−ρ1)]`.
    pub interaction: f64,
    /// `ideal + 2√(RT)[ln((ρ2+1)/(ρ1+1)) − (ρ2−ρ1)]`, the `ρᵢ = √(1+2B/vᵢ)` form.
    pub compact: f64,
}

fn ordered(v1: f64, v2: f64) -> (f64, f64, Orientation) {
    if v1 <= v2 {
        (v1, v2, Orientation::Forward)
    } else {
        (v2, v1, Orientation::Reversed)
    }
}

fn check_interval(eos: &VirialEos, t: f64, v1: f64, v2: f64) -> Result<()> {
    eos.check_state(StatePoint::new(t, v1)?)?;
    eos.check_state(StatePoint::new(t, v2)?)
}

/// Confirms `(∂p/∂v)_T < 0` on `[lo, hi]` by uniform sampling, and brackets
/// the first unstable sub-interval by bisection when it fails.
pub fn check_isotherm_stability(eos: &VirialEos, t: f64, lo: f64, hi: f64) -> Result<()> {
    let stable = |v: f64| -> Result<bool> { Ok(eos.dp_dv(StatePoint::new(t, v)?)? < 0.0) };
    let n = if lo == hi { 0 } else { STABILITY_SAMPLES };
    let grid = |i: usize| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };

    let Some(first_bad) =
        (0..=n).map(|i| stable(grid(i)).map(|ok| (i, ok))).find(|r| matches!(r, Ok((_, false)) | Err(_)))
    else {
        return Ok(());
    };
    let (i, _) = first_bad?;

    let start = if i == 0 { lo } else { bisect_boundary(&stable, grid(i - 1), grid(i), true)? };
    let mut end = hi;
    for j in i + 1..=n {
        if stable(grid(j))? {
            end = bisect_boundary(&stable, grid(j - 1), grid(j), false)?;
            break;
        }
    }
    Err(Error::Stability { temperature: t, lo: start, hi: end })
}

/// Narrows `[a, b]` around the point where `pred` changes value; `pred(a)` is
/// `a_value`. Returns the endpoint on the unstable side.
fn bisect_boundary<P>(pred: &P, mut a: f64, mut b: f64, a_value: bool) -> Result<f64>
where
    P: Fn(f64) -> Result<bool>,
{
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            break;
        }
        if pred(mid)? == a_value {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(if a_value { b } else { a })
}

fn oriented_report(
    eos: &VirialEos,
    t: f64,
    v1: f64,
    v2: f64,
    compute: impl FnOnce(f64, f64) -> Result<(f64, f64, LengthMethod, Vec<Term>)>,
) -> Result<LengthReport> {
    check_interval(eos, t, v1, v2)?;
    let (lo, hi, orientation) = ordered(v1, v2);
    let work = eos.work(t, v1, v2)?;
    if lo == hi {
        let (_, _, method, _) = compute(lo, hi)?;
        return Ok(LengthReport {
            value: 0.0,
            method,
            err_estimate: 0.0,
            work,
            decomposition: Vec::new(),
            orientation,
        });
    }
    let (value, err_estimate, method, decomposition) = compute(lo, hi)?;
    Ok(LengthReport { value, method, err_estimate, work, decomposition, orientation })
}

/// `∫ √(−(∂p/∂v)_T) dv` by adaptive quadrature of the exact derivative.
pub fn isotherm_length_quadrature(
    eos: &VirialEos,
    t: f64,
    v1: f64,
    v2: f64,
    cfg: &QuadratureConfig,
) -> Result<LengthReport> {
    oriented_report(eos, t, v1, v2, |lo, hi| {
        check_isotherm_stability(eos, t, lo, hi)?;
        let q = integrate(|v| Ok((-eos.dp_dv(StatePoint::new(t, v)?)?).sqrt()), lo, hi, cfg)?;
        Ok((q.value, q.err_estimate, LengthMethod::Quadrature, Vec::new()))
    })
}

/// Closed-form isotherm length for the ideal (`n = 1`), quasi-ideal, `n = 2`
/// and `n = 3` gases.
///
/// The third-order expression is evaluated as written and is only as trustworthy
/// as its comparison against quadrature in [`crate::verify`].
pub fn isotherm_length_closed(eos: &VirialEos, t: f64, v1: f64, v2: f64) -> Result<LengthReport> {
    let order = eos.order();
    if order > 3 {
        return Err(Error::UnsupportedOrder { order });
    }
    oriented_report(eos, t, v1, v2, |lo, hi| {
        check_isotherm_stability(eos, t, lo, hi)?;
        let sqrt_rt = (eos.gas_constant() * t).sqrt();
        let (value, decomposition) = if let Some(b) = eos.excluded_volume() {
            let value = sqrt_rt * ((hi - lo) / (lo - b)).ln_1p();
            (value, vec![Term::new("ideal", value), Term::new("interaction", 0.0)])
        } else {
            match order {
                1 => {
                    let value = sqrt_rt * ((hi - lo) / lo).ln_1p();
                    (value, vec![Term::new("ideal", value), Term::new("interaction", 0.0)])
                }
                2 => {
                    let forms = second_order_forms(eos, t, lo, hi)?;
                    (forms.compact, vec![Term::new("ideal", forms.ideal), Term::new("interaction", forms.interaction)])
                }
                _ => {
                    let value = third_order_closed(eos, t, lo, hi)?;
                    let ideal = sqrt_rt * ((hi - lo) / lo).ln_1p();
                    (value, vec![Term::new("ideal", ideal), Term::new("interaction", value - ideal)])
                }
            }
        };
        Ok((value, 0.0, LengthMethod::ClosedForm, decomposition))
    })
}

/// Evaluates the second-order closed forms on `v1 < v2`.
pub fn second_order_forms(eos: &VirialEos, t: f64, v1: f64, v2: f64) -> Result<SecondOrderForms> {
    if eos.order() != 2 || eos.is_quasi_ideal() {
        return Err(Error::Config("second-order forms need a virial gas with exactly one coefficient".into()));
    }
    check_interval(eos, t, v1, v2)?;
    let b = eos.coefficients()[0];
    let s1 = 1.0 + 2.0 * b / v1;
    let s2 = 1.0 + 2.0 * b / v2;
    // σ(v) = 1 + 2B/v is monotone in v, so the endpoints bound it.
    if !(s1 > 0.0 && s2 > 0.0) {
        return Err(Error::ClosedFormDomain(format!("1 + 2B/v must stay positive on [{v1}, {v2}] (B = {b})")));
    }
    let rt = eos.gas_constant() * t;
    let sqrt_rt = rt.sqrt();
    let (rho1, rho2) = (s1.sqrt(), s2.sqrt());
    // ρ2 − ρ1 without cancellation.
    let rho_diff = 2.0 * b * (v1 - v2) / (v1 * v2 * (rho1 + rho2));

    let work = eos.work(t, v1, v2)?;
    let log_term = ((1.0 + b / v2 + rho2) / (1.0 + b / v1 + rho1)).ln();
    let work_form = work / sqrt_rt + sqrt_rt * (log_term - b * (v2 - v1) / (v1 * v2) - 2.0 * (rho2 - rho1));
    let root_form = 2.0 * sqrt_rt * (((v2 + 2.0 * b).sqrt() + v2.sqrt()) / ((v1 + 2.0 * b).sqrt() + v1.sqrt())).ln()
        - 2.0 * sqrt_rt * (rho2 - rho1);
    let ideal = sqrt_rt * ((v2 - v1) / v1).ln_1p();
    let interaction = sqrt_rt * (log_term - 2.0 * rho_diff);
    let compact = ideal + 2.0 * sqrt_rt * (((rho2 + 1.0) / (rho1 + 1.0)).ln() - rho_diff);
    Ok(SecondOrderForms { work_form, root_form, ideal, interaction, compact })
}

/// Third-order closed form on `v1 < v2`, after checking that every square
/// root and logarithm in it is real.
fn third_order_closed(eos: &VirialEos, t: f64, v1: f64, v2: f64) -> Result<f64> {
    let (b, c) = (eos.coefficients()[0], eos.coefficients()[1]);
    if !(c > 0.0) {
        return Err(Error::ClosedFormDomain(format!("requires C > 0, got C = {c}")));
    }
    let quadratic = |v: f64| v * v + 2.0 * b * v + 3.0 * c;
    let v_min = (-b).clamp(v1, v2);
    if !(quadratic(v_min) > 0.0 && quadratic(v1) > 0.0 && quadratic(v2) > 0.0) {
        return Err(Error::ClosedFormDomain(format!("v² + 2Bv + 3C must stay positive on [{v1}, {v2}]")));
    }
    let r3c = (3.0 * c).sqrt();
    let root = |v: f64| quadratic(v).sqrt();
    let first = |v: f64| root(v) + v + b;
    let second = |v: f64| r3c * root(v) - b * v - 3.0 * c;
    let (f1, f2, g1, g2) = (first(v1), first(v2), second(v1), second(v2));
    if !(f1 > 0.0 && f2 > 0.0) {
        return Err(Error::ClosedFormDomain("√(v²+2Bv+3C) + v + B must be positive".into()));
    }
    if !(g1 * g2 > 0.0) {
        return Err(Error::ClosedFormDomain(
            "√(3C)·√(v²+2Bv+3C) − Bv − 3C changes sign or vanishes on the interval".into(),
        ));
    }
    let sigma = |v: f64| (1.0 + 2.0 * b / v + 3.0 * c / (v * v)).sqrt();
    let bracket = (f2 / f1).ln() + b / r3c * ((g2 / g1).ln() - (v2 / v1).ln()) - (sigma(v2) - sigma(v1));
    Ok((eos.gas_constant() * t).sqrt() * bracket)
}

/// `dζ/dv` for `ζ = σ(v)^{−1/2}`, the integration-by-parts variable:
/// `Σ_k k(k−1)/2 · X_k v^{−k} / σ^{3/2}`.
pub fn by_parts_slope(eos: &VirialEos, v: f64) -> f64 {
    let sigma = eos.stiffness_factor(v);
    let mut num = 0.0;
    let mut vk = v;
    for (k, x) in eos.expansion().enumerate().skip(1) {
        vk *= v;
        let k = (k + 1) as f64;
        num += 0.5 * k * (k - 1.0) * x / vk;
    }
    num / (sigma * sigma.sqrt())
}

/// The same slope written over the common polynomial denominator,
/// `(B v^{2n−4} + 3C v^{2n−5} + 6D v^{2n−6} + …) / (v^{(n−1)/2} (v^{n−1} + 2B v^{n−2} + 3C v^{n−3} + …)^{3/2})`.
pub fn by_parts_slope_expanded(eos: &VirialEos, v: f64) -> f64 {
    let n = eos.order() as i32;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, x) in eos.expansion().enumerate() {
        let k = k as i32 + 1;
        num += f64::from(k * (k - 1) / 2) * x * v.powi(2 * n - 2 - k);
        den += f64::from(k) * x * v.powi(n - k);
    }
    num / (v.powf(f64::from(n - 1) / 2.0) * den.powf(1.5))
}

/// Evaluates one of the two decompositions of the isotherm length, integrating
/// each term by quadrature and reporting the terms individually.
pub fn isotherm_length_theorem(
    eos: &VirialEos,
    t: f64,
    v1: f64,
    v2: f64,
    form: TheoremForm,
    cfg: &QuadratureConfig,
) -> Result<LengthReport> {
    if eos.is_quasi_ideal() {
        return Err(Error::Config("length decompositions apply to the virial family only".into()));
    }
    oriented_report(eos, t, v1, v2, |lo, hi| {
        check_isotherm_stability(eos, t, lo, hi)?;
        let (value, err, terms) = match form {
            TheoremForm::CoefficientSum => coefficient_sum(eos, t, lo, hi, cfg)?,
            TheoremForm::WorkForm => work_form(eos, t, lo, hi, cfg)?,
        };
        Ok((value, err, LengthMethod::TheoremDecomposition, terms))
    })
}

/// `∫ X_k v^{−k} / √σ(v) dv` over `[lo, hi]`.
fn coefficient_integral(eos: &VirialEos, k: i32, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let x = if k == 1 { 1.0 } else { eos.coefficients()[k as usize - 2] };
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    let q = integrate(|v| Ok(x * v.powi(-k) / eos.stiffness_factor(v).sqrt()), lo, hi, cfg)?;
    Ok((q.value, q.err_estimate))
}

fn coefficient_sum(eos: &VirialEos, t: f64, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<(f64, f64, Vec<Term>)> {
    let sqrt_rt = (eos.gas_constant() * t).sqrt();
    let mut terms = Vec::with_capacity(eos.order());
    let (mut total, mut err) = (0.0, 0.0);
    for k in 1..=eos.order() as i32 {
        let (value, e) = coefficient_integral(eos, k, lo, hi, cfg)?;
        let value = sqrt_rt * f64::from(k) * value;
        total += value;
        err += sqrt_rt * f64::from(k) * e;
        terms.push(Term::new(COEFFICIENT_LABELS[k as usize - 1], value));
    }
    Ok((total, err, terms))
}

fn work_form(eos: &VirialEos, t: f64, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<(f64, f64, Vec<Term>)> {
    let n = eos.order();
    let sqrt_rt = (eos.gas_constant() * t).sqrt();
    let scale = n as f64 / sqrt_rt;

    // Running work W(v) = ∫_{lo}^{v} p dv′ vanishes at the lower endpoint.
    let boundary = scale * eos.work(t, lo, hi)? / eos.stiffness_factor(hi).sqrt();
    let mut terms = vec![Term::new("boundary", boundary)];
    let (mut total, mut err) = (boundary, 0.0);

    if n > 1 {
        let q = integrate(|v| Ok(eos.work(t, lo, v)? * by_parts_slope(eos, v)), lo, hi, cfg)?;
        let by_parts = -scale * q.value;
        total += by_parts;
        err += scale * q.err_estimate;
        terms.push(Term::new("by_parts", by_parts));
    }
    for k in 1..n as i32 {
        let (value, e) = coefficient_integral(eos, k, lo, hi, cfg)?;
        let weight = sqrt_rt * (n as i32 - k) as f64;
        total -= weight * value;
        err += weight * e;
        terms.push(Term::new(format!("coefficient_{}", COEFFICIENT_LABELS[k as usize - 1]), -weight * value));
    }
    Ok((total, err, terms))
}

/// A parametrized path `ξ ↦ (T(ξ), v(ξ))` with its exact tangent.
pub trait PathSpec {
    fn bounds(&self) -> (f64, f64);
    /// `(T, v)` at `ξ`.
    fn point(&self, xi: f64) -> (f64, f64);
    /// `(dT/dξ, dv/dξ)` at `ξ`.
    fn tangent(&self, xi: f64) -> (f64, f64);
}

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

pub struct ParametricPath {
    pub temperature: ScalarFn,
    pub volume: ScalarFn,
    pub d_temperature: ScalarFn,
    pub d_volume: ScalarFn,
    pub xi_i: f64,
    pub xi_f: f64,
}

impl ParametricPath {
    /// `T = t`, `v = v1 + ξ(v2 − v1)`, `ξ ∈ [0, 1]`.
    pub fn isotherm(t: f64, v1: f64, v2: f64) -> Self {
        Self {
            temperature: Box::new(move |_| t),
            volume: Box::new(move |xi| v1 + xi * (v2 - v1)),
            d_temperature: Box::new(|_| 0.0),
            d_volume: Box::new(move |_| v2 - v1),
            xi_i: 0.0,
            xi_f: 1.0,
        }
    }

    /// `v = v`, `T = t1 + ξ(t2 − t1)`, `ξ ∈ [0, 1]`.
    pub fn isochore(v: f64, t1: f64, t2: f64) -> Self {
        Self {
            temperature: Box::new(move |xi| t1 + xi * (t2 - t1)),
            volume: Box::new(move |_| v),
            d_temperature: Box::new(move |_| t2 - t1),
            d_volume: Box::new(|_| 0.0),
            xi_i: 0.0,
            xi_f: 1.0,
        }
    }

    /// Straight line between two states, `ξ ∈ [0, 1]`.
    pub fn segment(from: (f64, f64), to: (f64, f64)) -> Self {
        let (t1, v1) = from;
        let (t2, v2) = to;
        Self {
            temperature: Box::new(move |xi| t1 + xi * (t2 - t1)),
            volume: Box::new(move |xi| v1 + xi * (v2 - v1)),
            d_temperature: Box::new(move |_| t2 - t1),
            d_volume: Box::new(move |_| v2 - v1),
            xi_i: 0.0,
            xi_f: 1.0,
        }
    }
}

impl PathSpec for ParametricPath {
    fn bounds(&self) -> (f64, f64) {
        (self.xi_i, self.xi_f)
    }

    fn point(&self, xi: f64) -> (f64, f64) {
        ((self.temperature)(xi), (self.volume)(xi))
    }

    fn tangent(&self, xi: f64) -> (f64, f64) {
        ((self.d_temperature)(xi), (self.d_volume)(xi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub quad: QuadratureConfig,
    /// Initial uniform samples used to locate character changes.
    pub samples: usize,
    /// `q` is null when `|q|` is below this fraction of the magnitude of its terms.
    pub null_tol: f64,
    /// Boundary bisection stops at this fraction of the parameter span.
    pub bisect_tol: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self { quad: QuadratureConfig::default(), samples: 64, null_tol: 1e-12, bisect_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    pub xi_start: f64,
    pub xi_end: f64,
    pub character: Character,
    /// `∫ √|q| dξ` over the segment.
    pub magnitude: f64,
    pub err_estimate: f64,
}

/// Signed line element `q(ξ)` and the magnitude of its terms.
fn path_form<S: ResponseSource + ?Sized, P: PathSpec + ?Sized>(source: &S, path: &P, xi: f64) -> Result<(f64, f64)> {
    let (t, v) = path.point(xi);
    let (dt, dv) = path.tangent(xi);
    let s = StatePoint::new(t, v)?;
    let r = source.response_at(s)?;
    let t11 = -r.c_v / t * dt * dt;
    let t12 = -2.0 * r.alpha / r.kappa_t * dt * dv;
    let t22 = dv * dv / (v * r.kappa_t);
    let q = t11 + t12 + t22;
    if !q.is_finite() {
        return Err(Error::Domain(format!("line element is not finite at ξ = {xi}")));
    }
    Ok((q, t11.abs() + t12.abs() + t22.abs()))
}

/// Splits the path into maximal segments of constant causal character and
/// integrates `√|q|` over each. Values of `q` within the null tolerance count
/// as zero.
pub fn path_length<S, P>(source: &S, path: &P, cfg: &PathConfig) -> Result<Vec<PathSegment>>
where
    S: ResponseSource + ?Sized,
    P: PathSpec + ?Sized,
{
    let (xi_i, xi_f) = path.bounds();
    if !(xi_i.is_finite() && xi_f.is_finite() && xi_i < xi_f) {
        return Err(Error::Domain(format!("path parameter range [{xi_i}, {xi_f}] is empty or invalid")));
    }
    if cfg.samples < 1 {
        return Err(Error::Config("path sampling needs at least one interval".into()));
    }
    let character = |xi: f64| -> Result<Character> {
        let (q, m) = path_form(source, path, xi)?;
        Ok(Character::of(q, cfg.null_tol * m))
    };

    let span = xi_f - xi_i;
    let n = cfg.samples;
    let grid = |i: usize| if i == n { xi_f } else { xi_i + span * i as f64 / n as f64 };
    let chars = (0..=n).map(|i| character(grid(i))).collect::<Result<Vec<_>>>()?;

    // (start, end, character) with bisected boundaries.
    let width_tol = cfg.bisect_tol * span;
    let mut pieces: Vec<(f64, f64, Character)> = Vec::new();
    let mut start = xi_i;
    for i in 1..=n {
        if chars[i] == chars[i - 1] {
            continue;
        }
        let (mut a, mut b) = (grid(i - 1), grid(i));
        while b - a > width_tol {
            let mid = 0.5 * (a + b);
            if !(a < mid && mid < b) {
                break;
            }
            if character(mid)? == chars[i - 1] {
                a = mid;
            } else {
                b = mid;
            }
        }
        let boundary = 0.5 * (a + b);
        pieces.push((start, boundary, chars[i - 1]));
        start = boundary;
    }
    pieces.push((start, xi_f, chars[n]));

    // Isolated zeros leave slivers no wider than the bisection tolerance.
    let mut merged: Vec<(f64, f64, Character)> = Vec::new();
    for (a, b, c) in pieces {
        if b - a <= 4.0 * width_tol && !merged.is_empty() {
            merged.last_mut().unwrap().1 = b;
            continue;
        }
        match merged.last_mut() {
            Some(last) if last.2 == c => last.1 = b,
            _ => merged.push((a, b, c)),
        }
    }

    merged
        .into_iter()
        .map(|(a, b, c)| {
            let q = integrate(
                |xi| {
                    let (q, m) = path_form(source, path, xi)?;
                    Ok(if q.abs() <= cfg.null_tol * m { 0.0 } else { q.abs().sqrt() })
                },
                a,
                b,
                &cfg.quad,
            )?;
            Ok(PathSegment { xi_start: a, xi_end: b, character: c, magnitude: q.value, err_estimate: q.err_estimate })
        })
        .collect()
}
