//! Closed-form and decomposition lengths checked against direct quadrature on a
//! grid of isotherms and volume intervals.
//!
//! Each row compares one candidate value with its reference and receives a
//! verdict. A row is skipped, not failed, when the cell lies outside the
//! domain of the formula (an unstable interval, or a closed form whose square
//! roots or logarithms would be complex there).

use std::fmt;

use crate::eos::VirialEos;
use crate::error::{Error, Result};
use crate::length::{
    isotherm_length_closed, isotherm_length_quadrature, isotherm_length_theorem, second_order_forms, TheoremForm,
};
use crate::quad::QuadratureConfig;

/// Agreement required of a closed form or decomposition with quadrature.
pub const ORACLE_TOL: f64 = 1e-8;
/// Agreement required of exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Agreement required of the third-order closed form with quadrature.
pub const THIRD_ORDER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// Ideal gas: closed-form length times `√(RT)` against the work.
    IdealLengthWork,
    /// Ideal gas: quadrature length times `√(RT)` against the work.
    IdealQuadratureWork,
    QuasiIdealLengthWork,
    QuasiIdealQuadratureWork,
    /// Second order: work-based expression against quadrature.
    SecondOrderWorkForm,
    /// Second order: square-root expression against quadrature.
    SecondOrderRootForm,
    /// Second order: work-based against square-root expression.
    SecondOrderFormsAgree,
    /// Second order: ideal part plus interaction term against the total.
    SecondOrderSplit,
    /// Third-order closed form against quadrature.
    ThirdOrderClosed,
    TheoremWorkForm,
    TheoremCoefficientSum,
}

impl Formula {
    pub fn id(&self) -> &'static str {
        match self {
            Formula::IdealLengthWork => "ideal-length-work",
            Formula::IdealQuadratureWork => "ideal-quadrature-work",
            Formula::QuasiIdealLengthWork => "quasi-ideal-length-work",
            Formula::QuasiIdealQuadratureWork => "quasi-ideal-quadrature-work",
            Formula::SecondOrderWorkForm => "virial2-work-form",
            Formula::SecondOrderRootForm => "virial2-root-form",
            Formula::SecondOrderFormsAgree => "virial2-forms-agree",
            Formula::SecondOrderSplit => "virial2-split",
            Formula::ThirdOrderClosed => "virial3-closed",
            Formula::TheoremWorkForm => "theorem-work-form",
            Formula::TheoremCoefficientSum => "theorem-coefficient-sum",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Formula::IdealLengthWork
            | Formula::IdealQuadratureWork
            | Formula::QuasiIdealLengthWork
            | Formula::QuasiIdealQuadratureWork
            | Formula::SecondOrderFormsAgree
            | Formula::SecondOrderSplit => IDENTITY_TOL,
            Formula::ThirdOrderClosed => THIRD_ORDER_TOL,
            Formula::SecondOrderWorkForm
            | Formula::SecondOrderRootForm
            | Formula::TheoremWorkForm
            | Formula::TheoremCoefficientSum => ORACLE_TOL,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Flag,
    Skip(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Flag => "FLAG",
            Verdict::Skip(_) => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub formula: Formula,
    pub temperature: f64,
    pub v1: f64,
    pub v2: f64,
    pub candidate: f64,
    pub reference: f64,
    pub rel_dev: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl VerifyRow {
    /// Explanation attached to FLAG and SKIP rows.
    pub fn note(&self) -> String {
        match (&self.verdict, self.formula) {
            (Verdict::Flag, Formula::ThirdOrderClosed) => {
                "closed-form discrepancy: third-order expression disagrees with quadrature".into()
            }
            (Verdict::Flag, _) => "deviation exceeds tolerance".into(),
            (Verdict::Skip(reason), _) => reason.clone(),
            (Verdict::Pass, _) => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyGrid {
    pub temperatures: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

impl Default for VerifyGrid {
    /// `T ∈ {100, 300, 1000}` K and `v2/v1 ∈ {1.5, 2, 10}` from `v1 = 0.012`.
    fn default() -> Self {
        Self {
            temperatures: vec![100.0, 300.0, 1000.0],
            intervals: vec![(0.012, 0.018), (0.012, 0.024), (0.012, 0.12)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn count(&self, label: &str) -> usize {
        self.rows.iter().filter(|r| r.verdict.label() == label).count()
    }

    pub fn all_pass(&self) -> bool {
        self.count("FLAG") == 0
    }

    /// True when every flagged row belongs to the third-order closed form.
    pub fn flags_only_third_order(&self) -> bool {
        self.rows.iter().filter(|r| r.verdict == Verdict::Flag).all(|r| r.formula == Formula::ThirdOrderClosed)
    }
}

pub fn rel_dev(candidate: f64, reference: f64) -> f64 {
    if candidate == reference {
        0.0
    } else {
        (candidate - reference).abs() / reference.abs().max(candidate.abs())
    }
}

fn judged(formula: Formula, t: f64, v1: f64, v2: f64, candidate: f64, reference: f64) -> VerifyRow {
    let dev = rel_dev(candidate, reference);
    let tolerance = formula.tolerance();
    let verdict = if dev <= tolerance { Verdict::Pass } else { Verdict::Flag };
    VerifyRow { formula, temperature: t, v1, v2, candidate, reference, rel_dev: dev, tolerance, verdict }
}

fn skipped(formula: Formula, t: f64, v1: f64, v2: f64, reason: String) -> VerifyRow {
    VerifyRow {
        formula,
        temperature: t,
        v1,
        v2,
        candidate: f64::NAN,
        reference: f64::NAN,
        rel_dev: f64::NAN,
        tolerance: formula.tolerance(),
        verdict: Verdict::Skip(reason),
    }
}

/// Errors that put a cell outside a formula's domain rather than signalling a
/// numerical failure.
fn is_domain_miss(e: &Error) -> bool {
    matches!(e, Error::Stability { .. } | Error::ClosedFormDomain(_) | Error::Domain(_))
}

/// Runs every applicable comparison for `eos` on each grid cell.
pub fn run(eos: &VirialEos, grid: &VerifyGrid, cfg: &QuadratureConfig) -> Result<VerifyReport> {
    let mut rows = Vec::new();
    for &t in &grid.temperatures {
        for &(v1, v2) in &grid.intervals {
            cell(eos, t, v1, v2, cfg, &mut rows)?;
        }
    }
    Ok(VerifyReport { rows })
}

fn cell(eos: &VirialEos, t: f64, v1: f64, v2: f64, cfg: &QuadratureConfig, rows: &mut Vec<VerifyRow>) -> Result<()> {
    let applicable = formulas_for(eos);
    let quad = match isotherm_length_quadrature(eos, t, v1, v2, cfg) {
        Ok(r) => r,
        Err(e) if is_domain_miss(&e) => {
            rows.extend(applicable.iter().map(|&f| skipped(f, t, v1, v2, e.to_string())));
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let sqrt_rt = (eos.gas_constant() * t).sqrt();

    for formula in applicable {
        let outcome: Result<(f64, f64)> = match formula {
            Formula::IdealLengthWork | Formula::QuasiIdealLengthWork => {
                isotherm_length_closed(eos, t, v1, v2).map(|r| (r.value * sqrt_rt, r.work))
            }
            Formula::IdealQuadratureWork | Formula::QuasiIdealQuadratureWork => Ok((quad.value * sqrt_rt, quad.work)),
            Formula::SecondOrderWorkForm => second_order_forms(eos, t, v1, v2).map(|f| (f.work_form, quad.value)),
            Formula::SecondOrderRootForm => second_order_forms(eos, t, v1, v2).map(|f| (f.root_form, quad.value)),
            Formula::SecondOrderFormsAgree => second_order_forms(eos, t, v1, v2).map(|f| (f.work_form, f.root_form)),
            Formula::SecondOrderSplit => isotherm_length_closed(eos, t, v1, v2)
                .map(|r| (r.decomposition.iter().map(|term| term.value).sum(), r.value)),
            Formula::ThirdOrderClosed => isotherm_length_closed(eos, t, v1, v2).map(|r| (r.value, quad.value)),
            Formula::TheoremWorkForm => {
                isotherm_length_theorem(eos, t, v1, v2, TheoremForm::WorkForm, cfg).map(|r| (r.value, quad.value))
            }
            Formula::TheoremCoefficientSum => {
                isotherm_length_theorem(eos, t, v1, v2, TheoremForm::CoefficientSum, cfg).map(|r| (r.value, quad.value))
            }
        };
        match outcome {
            Ok((candidate, reference)) => rows.push(judged(formula, t, v1, v2, candidate, reference)),
            Err(e) if is_domain_miss(&e) => rows.push(skipped(formula, t, v1, v2, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

fn formulas_for(eos: &VirialEos) -> Vec<Formula> {
    if eos.is_quasi_ideal() {
        return vec![Formula::QuasiIdealLengthWork, Formula::QuasiIdealQuadratureWork];
    }
    let mut out = match eos.order() {
        1 => vec![Formula::IdealLengthWork, Formula::IdealQuadratureWork],
        2 => vec![
            Formula::SecondOrderWorkForm,
            Formula::SecondOrderRootForm,
            Formula::SecondOrderFormsAgree,
            Formula::SecondOrderSplit,
        ],
        3 => vec![Formula::ThirdOrderClosed],
        _ => Vec::new(),
    };
    out.extend([Formula::TheoremWorkForm, Formula::TheoremCoefficientSum]);
    out
}
