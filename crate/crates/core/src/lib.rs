//! Thermodynamic length on the Helmholtz potential surface of a simple fluid.
//!
//! The crate builds the Hessian metric of the molar Helmholtz potential
//! `f(T, v)` from the response functions `(c_v, c_p, α, κ_T)`, analyses its
//! Lorentzian structure, and computes thermodynamic length along isotherms of
//! virial gases, both in closed form and by adaptive quadrature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eos;
pub mod error;
pub mod length;
pub mod metric;
pub mod quad;
pub mod response;
pub mod verify;

pub use eos::{StatePoint, VirialEos, GAS_CONSTANT};
pub use error::{Error, Result};
pub use length::{LengthMethod, LengthReport, TheoremForm};
pub use metric::{Character, MetricAtPoint, MetricConfig, Signature, TangentVector};
pub use quad::{integrate, Quadrature, QuadratureConfig};
pub use response::{HeatCapacityModel, ResponseSet, ResponseSource};
