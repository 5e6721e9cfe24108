//! Hessian metric of the molar Helmholtz potential in `(T, v)` coordinates,
//!
//! ```text
//!        ⎛ −c_v/T    −α/κ_T   ⎞
//!   η =  ⎜                    ⎟
//!        ⎝ −α/κ_T   1/(v·κ_T) ⎠
//! ```
//!
//! with its eigen-decomposition `η = P·Λ·P⁻¹` in closed form. On mechanically
//! stable states the metric has one negative and one positive eigenvalue, so
//! the tangent space is Lorentzian and vectors split into volume-like
//! (`q > 0`), temperature-like (`q < 0`) and null directions.
//!
//! The eigenvalues and eigenvectors use the textbook quadratic-formula
//! expressions rearranged to avoid subtractive cancellation: `η22` exceeds
//! `|η11|` by many orders of magnitude for gases, and the naive small root
//! loses most of its digits.

use std::fmt;

use crate::eos::StatePoint;
use crate::error::{Error, Result};
use crate::response::ResponseSet;

/// Below this ratio `|η12| / max(|η11|, |η22|)` the metric is treated as
/// diagonal and the eigenvectors are the coordinate axes.
const DIAGONAL_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    /// Relative tolerance for zero eigenvalues and null vectors, scaled by the
    /// largest metric entry (eigenvalues) or by the magnitude of the terms of
    /// the quadratic form (vectors).
    pub rel_tol: f64,
    /// Return degenerate metrics instead of failing.
    pub allow_degenerate: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, allow_degenerate: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Lorentzian,
    Degenerate,
    Riemannian,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::Lorentzian => "lorentzian",
            Signature::Degenerate => "degenerate",
            Signature::Riemannian => "riemannian",
        })
    }
}

/// Causal character of a tangent vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Character {
    VolumeLike,
    TemperatureLike,
    NullLike,
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Character::VolumeLike => "volume_like",
            Character::TemperatureLike => "temperature_like",
            Character::NullLike => "null_like",
        })
    }
}

impl Character {
    /// Classifies `q` against a non-negative null threshold.
    pub fn of(q: f64, threshold: f64) -> Self {
        if q.abs() <= threshold {
            Character::NullLike
        } else if q > 0.0 {
            Character::VolumeLike
        } else {
            Character::TemperatureLike
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub dt: f64,
    pub dv: f64,
    pub character: Character,
    /// `η_ij tⁱ tʲ`.
    pub q: f64,
}

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct MetricAtPoint {
    pub state: StatePoint,
    pub response: ResponseSet,
    pub eta11: f64,
    pub eta12: f64,
    pub eta22: f64,
    pub det: f64,
    pub delta: f64,
    /// Smaller eigenvalue.
    pub lambda1: f64,
    pub lambda2: f64,
    pub xi1: Vec2,
    pub xi2: Vec2,
    /// Columns are `xi1`, `xi2`.
    pub p: Mat2,
    pub p_inv: Mat2,
    pub lambda: Mat2,
    pub rel_tol: f64,
}

/// Relative deviations of the metric from the identities it must satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `det` against `−c_p/(T·v·κ_T)`.
    pub det_response: f64,
    /// `det` against `λ1·λ2`.
    pub det_eigen: f64,
    /// `c_p − c_v − vTα²/κ_T`, relative to `c_p`.
    pub mayer: f64,
    /// `max |P·Λ·P⁻¹ − η|`, relative to `max |η|`.
    pub reconstruction: f64,
    /// `max |P·P⁻¹ − I|`.
    pub inverse: f64,
    /// `Δ` from the response functions against `(η11 − η22)² + 4η12²`.
    pub delta: f64,
}

/// `η11·η22 − η12²` is zero relative to the size of its two products. Comparing
/// the small eigenvalue with the largest entry instead would call ordinary gas
/// states degenerate, since `η22/|η11|` routinely exceeds `1e10`.
fn is_singular(det: f64, a: f64, c: f64, d: f64, tol: f64) -> bool {
    det.abs() <= tol * ((a * d).abs() + c * c)
}

impl MetricAtPoint {
    pub fn assemble(r: &ResponseSet, s: StatePoint) -> Result<Self> {
        Self::assemble_with(r, s, &MetricConfig::default())
    }

    pub fn assemble_with(r: &ResponseSet, s: StatePoint, cfg: &MetricConfig) -> Result<Self> {
        let s = StatePoint::new(s.temperature, s.volume)?;
        let finite = [r.c_v, r.c_p, r.alpha, r.kappa_t].iter().all(|x| x.is_finite());
        if !finite || r.kappa_t == 0.0 {
            return Err(Error::Domain("response functions must be finite with non-zero compressibility".into()));
        }
        if !(cfg.rel_tol > 0.0) {
            return Err(Error::Config(format!("metric tolerance must be positive, got {}", cfg.rel_tol)));
        }

        let (t, v) = (s.temperature, s.volume);
        let a = -r.c_v / t;
        let c = -r.alpha / r.kappa_t;
        let d = 1.0 / (v * r.kappa_t);

        let det = a * d - c * c;
        let g = 1.0 / (v * r.kappa_t) + r.c_v / t;
        let delta = g * g + 4.0 * (r.alpha / r.kappa_t).powi(2);
        let root = delta.sqrt();

        let trace = a + d;
        let (lambda1, lambda2) = if trace == 0.0 {
            (-0.5 * root, 0.5 * root)
        } else {
            let big = 0.5 * (trace + root.copysign(trace));
            let small = det / big;
            (big.min(small), big.max(small))
        };

        if is_singular(det, a, c, d, cfg.rel_tol) && !cfg.allow_degenerate {
            return Err(Error::Degenerate(format!(
                "eigenvalue is zero within tolerance (λ1 = {lambda1:e}, λ2 = {lambda2:e})"
            )));
        }

        let (xi1, xi2) = if c.abs() < DIAGONAL_THRESHOLD * a.abs().max(d.abs()) {
            if a <= d {
                ([1.0, 0.0], [0.0, 1.0])
            } else {
                ([0.0, 1.0], [-1.0, 0.0])
            }
        } else {
            // Second component of ξ1 = (1, k): k = (λ1 − η11)/η12.
            let k = if g >= 0.0 { -2.0 * c / (g + root) } else { (g - root) / (2.0 * c) };
            ([1.0, k], [-k, 1.0])
        };
        let p = [[xi1[0], xi2[0]], [xi1[1], xi2[1]]];
        let p_inv = inverse(&p);
        let lambda = [[lambda1, 0.0], [0.0, lambda2]];

        Ok(Self {
            state: s,
            response: *r,
            eta11: a,
            eta12: c,
            eta22: d,
            det,
            delta,
            lambda1,
            lambda2,
            xi1,
            xi2,
            p,
            p_inv,
            lambda,
            rel_tol: cfg.rel_tol,
        })
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.eta11, self.eta12], [self.eta12, self.eta22]]
    }

    /// Largest absolute metric entry.
    pub fn scale(&self) -> f64 {
        self.eta11.abs().max(self.eta12.abs()).max(self.eta22.abs())
    }

    /// Degenerate when the determinant vanishes relative to its own terms;
    /// otherwise its sign decides.
    pub fn signature(&self) -> Signature {
        if is_singular(self.det, self.eta11, self.eta12, self.eta22, self.rel_tol) {
            Signature::Degenerate
        } else if self.det < 0.0 {
            Signature::Lorentzian
        } else {
            Signature::Riemannian
        }
    }

    /// `q = η_ij tⁱ tʲ` and the sum of the absolute values of its terms.
    pub fn quadratic_form(&self, dt: f64, dv: f64) -> (f64, f64) {
        let t11 = self.eta11 * dt * dt;
        let t12 = 2.0 * self.eta12 * dt * dv;
        let t22 = self.eta22 * dv * dv;
        (t11 + t12 + t22, t11.abs() + t12.abs() + t22.abs())
    }

    /// Causal character of `(dT, dv)`. The vector is null when `|q|` is below
    /// `tol` times the magnitude of the terms of `q`, which keeps the test
    /// independent of the vector's length and of the units of `T` and `v`.
    pub fn classify_vector(&self, dt: f64, dv: f64, tol: f64) -> Result<TangentVector> {
        if dt == 0.0 && dv == 0.0 {
            return Err(Error::ZeroVector);
        }
        if !(dt.is_finite() && dv.is_finite()) {
            return Err(Error::Domain("tangent vector must be finite".into()));
        }
        let (q, magnitude) = self.quadratic_form(dt, dv);
        Ok(TangentVector { dt, dv, character: Character::of(q, tol * magnitude), q })
    }

    /// Slopes `dv/dT` of the two null directions, in ascending order.
    pub fn null_directions(&self) -> Result<[f64; 2]> {
        let sig = self.signature();
        if sig != Signature::Lorentzian {
            return Err(Error::Signature(sig));
        }
        // Roots of η22·x² + 2η12·x + η11 = 0; the discriminant is −det > 0.
        let disc = (self.eta12 * self.eta12 - self.eta11 * self.eta22).sqrt();
        let (x1, x2) = if self.eta12 == 0.0 {
            let x = disc / self.eta22;
            (-x, x)
        } else {
            let w = -(self.eta12 + disc.copysign(self.eta12));
            (w / self.eta22, self.eta11 / w)
        };
        Ok([x1.min(x2), x1.max(x2)])
    }

    /// Rescales `xi` to unit length under the metric: returns `ξ/√|q|` and the
    /// sign of `q`, so that `η(u, u) = sign`.
    pub fn pseudo_normalize(&self, xi: Vec2) -> Result<(Vec2, f64)> {
        if xi == [0.0, 0.0] {
            return Err(Error::ZeroVector);
        }
        let (q, magnitude) = self.quadratic_form(xi[0], xi[1]);
        if q.abs() <= self.rel_tol * magnitude {
            return Err(Error::NullVector { q });
        }
        let norm = q.abs().sqrt();
        Ok(([xi[0] / norm, xi[1] / norm], q.signum()))
    }

    pub fn residuals(&self) -> IdentityResiduals {
        let r = &self.response;
        let (t, v) = (self.state.temperature, self.state.volume);
        let det_expected = -r.c_p / (t * v * r.kappa_t);
        let eta = self.matrix();
        let rebuilt = mul(&mul(&self.p, &self.lambda), &self.p_inv);
        let ident = mul(&self.p, &self.p_inv);
        let direct_delta = (self.eta11 - self.eta22).powi(2) + 4.0 * self.eta12 * self.eta12;
        IdentityResiduals {
            det_response: rel_diff(self.det, det_expected),
            det_eigen: rel_diff(self.det, self.lambda1 * self.lambda2),
            mayer: (r.mayer_residual(self.state) / r.c_p).abs(),
            reconstruction: max_abs_diff(&rebuilt, &eta) / self.scale(),
            inverse: max_abs_diff(&ident, &[[1.0, 0.0], [0.0, 1.0]]),
            delta: rel_diff(self.delta, direct_delta),
        }
    }

    /// `‖η·ξ − λ·ξ‖ / (‖η‖·‖ξ‖)` for both eigenpairs, Frobenius norm for `η`.
    pub fn eigen_residuals(&self) -> [f64; 2] {
        let eta = self.matrix();
        let eta_norm = (self.eta11.powi(2) + 2.0 * self.eta12.powi(2) + self.eta22.powi(2)).sqrt();
        let one = |xi: Vec2, lam: f64| {
            let r0 = eta[0][0] * xi[0] + eta[0][1] * xi[1] - lam * xi[0];
            let r1 = eta[1][0] * xi[0] + eta[1][1] * xi[1] - lam * xi[1];
            r0.hypot(r1) / (eta_norm * xi[0].hypot(xi[1]))
        };
        [one(self.xi1, self.lambda1), one(self.xi2, self.lambda2)]
    }
}

fn inverse(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

pub fn mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn max_abs_diff(x: &Mat2, y: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((x[i][j] - y[i][j]).abs());
        }
    }
    m
}

fn rel_diff(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs().max(y.abs())
    }
}
