use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thermolen::eos::StatePoint;
use thermolen::length::{
    check_isotherm_stability, isotherm_length_closed, isotherm_length_quadrature, isotherm_length_theorem,
    LengthReport, Orientation,
};
use thermolen::metric::MetricConfig;
use thermolen::response::from_eos;
use thermolen::verify::{self, Verdict, VerifyGrid};
use thermolen::{integrate, Error, MetricAtPoint, Signature, TheoremForm};

use crate::config::EosConfig;
use crate::text::{block, sig6};
use crate::{Cli, CliError, Command, Format, Method, EXIT_FLAG};

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Length { gas, v1, v2, method } => {
            let cfg = EosConfig::load(&gas.config)?;
            emit(fmt, &length(&cfg, gas.t, *v1, *v2, *method)?)?;
        }
        Command::Metric { gas, v, dt, dv } => {
            let cfg = EosConfig::load(&gas.config)?;
            let vector = dt.zip(*dv);
            emit(fmt, &metric(&cfg, gas.t, *v, vector)?)?;
        }
        Command::Verify { config, grid } => {
            let cfg = EosConfig::load(config)?;
            let grid = match grid {
                Some(spec) => parse_grid(spec)?,
                None => VerifyGrid::default(),
            };
            let out = verify(&cfg, &grid)?;
            emit(fmt, &out)?;
            if out.flag > 0 {
                return Ok(EXIT_FLAG);
            }
        }
        Command::Sweep { gas, vmin, vmax, steps, out } => {
            let cfg = EosConfig::load(&gas.config)?;
            let csv = sweep(&cfg, gas.t, *vmin, *vmax, *steps)?;
            write_output(out.as_deref(), &csv)?;
        }
        Command::Work { gas, v1, v2 } => {
            let cfg = EosConfig::load(&gas.config)?;
            emit(fmt, &work(&cfg, gas.t, *v1, *v2)?)?;
        }
        Command::Classify { gas, v, dt, dv } => {
            let cfg = EosConfig::load(&gas.config)?;
            emit(fmt, &classify(&cfg, gas.t, *v, *dt, *dv)?)?;
        }
    }
    Ok(0)
}

/// A report printable either as aligned text or as JSON.
pub trait Report: Serialize {
    fn human(&self) -> String;
}

fn emit<R: Report>(fmt: Format, report: &R) -> Result<(), CliError> {
    let text = match fmt {
        Format::Human => report.human(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    write_output(None, &text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermOut {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthOut {
    pub temperature: f64,
    pub v1: f64,
    pub v2: f64,
    pub length: f64,
    pub method: String,
    pub err_estimate: f64,
    pub work: f64,
    pub orientation: String,
    pub decomposition: Vec<TermOut>,
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::Forward => "forward",
        Orientation::Reversed => "reversed",
    }
}

pub fn length(cfg: &EosConfig, t: f64, v1: f64, v2: f64, method: Method) -> Result<LengthOut, CliError> {
    let eos = cfg.eos()?;
    let quad = cfg.quadrature()?;
    let report: LengthReport = match method {
        Method::Closed => isotherm_length_closed(&eos, t, v1, v2)?,
        Method::Quadrature => isotherm_length_quadrature(&eos, t, v1, v2, &quad)?,
        Method::TheoremWork => isotherm_length_theorem(&eos, t, v1, v2, TheoremForm::WorkForm, &quad)?,
        Method::TheoremSum => isotherm_length_theorem(&eos, t, v1, v2, TheoremForm::CoefficientSum, &quad)?,
        Method::Auto => match isotherm_length_closed(&eos, t, v1, v2) {
            Err(Error::UnsupportedOrder { .. } | Error::ClosedFormDomain(_)) => {
                isotherm_length_quadrature(&eos, t, v1, v2, &quad)?
            }
            other => other?,
        },
    };
    Ok(LengthOut {
        temperature: t,
        v1,
        v2,
        length: report.value,
        method: report.method.to_string(),
        err_estimate: report.err_estimate,
        work: report.work,
        orientation: orientation_name(report.orientation).into(),
        decomposition: report.decomposition.into_iter().map(|t| TermOut { name: t.name, value: t.value }).collect(),
    })
}

impl Report for LengthOut {
    fn human(&self) -> String {
        let mut rows = vec![
            ("T".into(), sig6(self.temperature)),
            ("v1".into(), sig6(self.v1)),
            ("v2".into(), sig6(self.v2)),
            ("length".into(), sig6(self.length)),
            ("method".into(), self.method.clone()),
            ("error estimate".into(), sig6(self.err_estimate)),
            ("work".into(), sig6(self.work)),
            ("orientation".into(), self.orientation.clone()),
        ];
        for term in &self.decomposition {
            rows.push((format!("term {}", term.name), sig6(term.value)));
        }
        block(&rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseOut {
    pub c_v: f64,
    pub c_p: f64,
    pub alpha: f64,
    pub kappa_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualsOut {
    pub det_response: f64,
    pub det_eigen: f64,
    pub mayer: f64,
    pub reconstruction: f64,
    pub inverse: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorOut {
    #[serde(rename = "dT")]
    pub dt: f64,
    pub dv: f64,
    pub q: f64,
    pub character: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricOut {
    pub temperature: f64,
    pub v: f64,
    pub response: ResponseOut,
    pub eta11: f64,
    pub eta12: f64,
    pub eta22: f64,
    pub det: f64,
    pub delta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub xi1: [f64; 2],
    pub xi2: [f64; 2],
    pub signature: String,
    /// `dv/dT` along the two null directions; absent unless lorentzian.
    pub null_slopes: Option<[f64; 2]>,
    pub residuals: ResidualsOut,
    pub vector: Option<VectorOut>,
}

fn assemble(cfg: &EosConfig, t: f64, v: f64) -> Result<MetricAtPoint, CliError> {
    let eos = cfg.eos()?;
    let s = StatePoint::new(t, v)?;
    let r = from_eos(&eos, s, cfg.cv_model())?;
    let mcfg = MetricConfig { allow_degenerate: true, ..cfg.metric() };
    Ok(MetricAtPoint::assemble_with(&r, s, &mcfg)?)
}

fn null_slopes(m: &MetricAtPoint) -> Option<[f64; 2]> {
    (m.signature() == Signature::Lorentzian).then(|| m.null_directions().ok()).flatten()
}

fn vector_out(m: &MetricAtPoint, dt: f64, dv: f64, tol: f64) -> Result<VectorOut, CliError> {
    let tv = m.classify_vector(dt, dv, tol)?;
    Ok(VectorOut { dt, dv, q: tv.q, character: tv.character.to_string() })
}

pub fn metric(cfg: &EosConfig, t: f64, v: f64, vector: Option<(f64, f64)>) -> Result<MetricOut, CliError> {
    let m = assemble(cfg, t, v)?;
    let res = m.residuals();
    let vector = vector.map(|(dt, dv)| vector_out(&m, dt, dv, cfg.null_tol())).transpose()?;
    let r = m.response;
    Ok(MetricOut {
        temperature: t,
        v,
        response: ResponseOut { c_v: r.c_v, c_p: r.c_p, alpha: r.alpha, kappa_t: r.kappa_t },
        eta11: m.eta11,
        eta12: m.eta12,
        eta22: m.eta22,
        det: m.det,
        delta: m.delta,
        lambda1: m.lambda1,
        lambda2: m.lambda2,
        xi1: m.xi1,
        xi2: m.xi2,
        signature: m.signature().to_string(),
        null_slopes: null_slopes(&m),
        residuals: ResidualsOut {
            det_response: res.det_response,
            det_eigen: res.det_eigen,
            mayer: res.mayer,
            reconstruction: res.reconstruction,
            inverse: res.inverse,
            delta: res.delta,
        },
        vector,
    })
}

fn pair(x: [f64; 2]) -> String {
    format!("({}, {})", sig6(x[0]), sig6(x[1]))
}

fn vector_rows(rows: &mut Vec<(String, String)>, v: &VectorOut) {
    rows.push(("vector (dT, dv)".into(), pair([v.dt, v.dv])));
    rows.push(("q".into(), sig6(v.q)));
    rows.push(("character".into(), v.character.clone()));
}

impl Report for MetricOut {
    fn human(&self) -> String {
        let r = &self.response;
        let res = &self.residuals;
        let mut rows = vec![
            ("T".into(), sig6(self.temperature)),
            ("v".into(), sig6(self.v)),
            ("c_v".into(), sig6(r.c_v)),
            ("c_p".into(), sig6(r.c_p)),
            ("alpha".into(), sig6(r.alpha)),
            ("kappa_T".into(), sig6(r.kappa_t)),
            ("eta11".into(), sig6(self.eta11)),
            ("eta12".into(), sig6(self.eta12)),
            ("eta22".into(), sig6(self.eta22)),
            ("det".into(), sig6(self.det)),
            ("Delta".into(), sig6(self.delta)),
            ("lambda1".into(), sig6(self.lambda1)),
            ("lambda2".into(), sig6(self.lambda2)),
            ("xi1".into(), pair(self.xi1)),
            ("xi2".into(), pair(self.xi2)),
            ("signature".into(), self.signature.clone()),
        ];
        if let Some(s) = self.null_slopes {
            rows.push(("null slopes dv/dT".into(), pair(s)));
        }
        rows.extend([
            ("residual det vs -c_p/(T v kappa_T)".into(), sig6(res.det_response)),
            ("residual det vs lambda1 lambda2".into(), sig6(res.det_eigen)),
            ("residual Mayer".into(), sig6(res.mayer)),
            ("residual P Lambda P^-1 vs eta".into(), sig6(res.reconstruction)),
            ("residual P P^-1 vs I".into(), sig6(res.inverse)),
            ("residual Delta".into(), sig6(res.delta)),
        ]);
        if let Some(v) = &self.vector {
            vector_rows(&mut rows, v);
        }
        block(&rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOut {
    pub temperature: f64,
    pub v: f64,
    pub vector: VectorOut,
    pub signature: String,
    pub null_slopes: Option<[f64; 2]>,
}

pub fn classify(cfg: &EosConfig, t: f64, v: f64, dt: f64, dv: f64) -> Result<ClassifyOut, CliError> {
    let m = assemble(cfg, t, v)?;
    Ok(ClassifyOut {
        temperature: t,
        v,
        vector: vector_out(&m, dt, dv, cfg.null_tol())?,
        signature: m.signature().to_string(),
        null_slopes: null_slopes(&m),
    })
}

impl Report for ClassifyOut {
    fn human(&self) -> String {
        let mut rows = vec![("T".into(), sig6(self.temperature)), ("v".into(), sig6(self.v))];
        vector_rows(&mut rows, &self.vector);
        rows.push(("signature".into(), self.signature.clone()));
        if let Some(s) = self.null_slopes {
            rows.push(("null slopes dv/dT".into(), pair(s)));
        }
        block(&rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkOut {
    pub temperature: f64,
    pub v1: f64,
    pub v2: f64,
    /// `∫ p dv` from `v1` to `v2`.
    pub work: f64,
    /// `f(T, v2) − f(T, v1)`.
    pub helmholtz_change: f64,
}

pub fn work(cfg: &EosConfig, t: f64, v1: f64, v2: f64) -> Result<WorkOut, CliError> {
    let eos = cfg.eos()?;
    let w = eos.work(t, v1, v2)?;
    Ok(WorkOut { temperature: t, v1, v2, work: w, helmholtz_change: eos.helmholtz_relative(t, v1, v2)? })
}

impl Report for WorkOut {
    fn human(&self) -> String {
        block(&[
            ("T".into(), sig6(self.temperature)),
            ("v1".into(), sig6(self.v1)),
            ("v2".into(), sig6(self.v2)),
            ("work".into(), sig6(self.work)),
            ("helmholtz change".into(), sig6(self.helmholtz_change)),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRowOut {
    pub formula: String,
    pub temperature: f64,
    pub v1: f64,
    pub v2: f64,
    /// Absent on skipped rows.
    pub candidate: Option<f64>,
    pub reference: Option<f64>,
    pub rel_dev: Option<f64>,
    pub tolerance: f64,
    pub verdict: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOut {
    pub rows: Vec<VerifyRowOut>,
    pub pass: usize,
    pub flag: usize,
    pub skip: usize,
    /// True when every FLAG row is a third-order closed-form discrepancy.
    pub flags_only_third_order: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn verify(cfg: &EosConfig, grid: &VerifyGrid) -> Result<VerifyOut, CliError> {
    let eos = cfg.eos()?;
    let report = verify::run(&eos, grid, &cfg.quadrature()?)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let skipped = matches!(r.verdict, Verdict::Skip(_));
            let keep = |x: f64| if skipped { None } else { finite(x) };
            VerifyRowOut {
                formula: r.formula.id().into(),
                temperature: r.temperature,
                v1: r.v1,
                v2: r.v2,
                candidate: keep(r.candidate),
                reference: keep(r.reference),
                rel_dev: keep(r.rel_dev),
                tolerance: r.tolerance,
                verdict: r.verdict.label().into(),
                note: r.note(),
            }
        })
        .collect();
    Ok(VerifyOut {
        rows,
        pass: report.count("PASS"),
        flag: report.count("FLAG"),
        skip: report.count("SKIP"),
        flags_only_third_order: report.flags_only_third_order(),
    })
}

impl Report for VerifyOut {
    fn human(&self) -> String {
        let opt = |x: Option<f64>| x.map(sig6).unwrap_or_else(|| "-".into());
        let header = ["formula", "T", "v1", "v2", "candidate", "reference", "rel_dev", "tol", "verdict"];
        let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            let mut line = vec![
                r.formula.clone(),
                sig6(r.temperature),
                sig6(r.v1),
                sig6(r.v2),
                opt(r.candidate),
                opt(r.reference),
                opt(r.rel_dev),
                sig6(r.tolerance),
                r.verdict.clone(),
            ];
            if !r.note.is_empty() {
                line.push(r.note.clone());
            }
            table.push(line);
        }
        let widths: Vec<usize> =
            (0..header.len()).map(|i| table.iter().map(|l| l[i].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for line in &table {
            let cells: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(i, c)| match widths.get(i) {
                    Some(&w) => format!("{c:<w$}"),
                    None => c.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        let _ = writeln!(out, "\n{} PASS, {} FLAG, {} SKIP", self.pass, self.flag, self.skip);
        if self.flag > 0 && self.flags_only_third_order {
            let _ = writeln!(out, "all FLAG rows are third-order closed-form discrepancies against quadrature");
        }
        out
    }
}

/// `T=100,300;v=0.012:0.018,0.012:0.024`, either part optional.
pub fn parse_grid(spec: &str) -> Result<VerifyGrid, CliError> {
    let bad = |msg: String| CliError::Usage(format!("invalid --grid {spec:?}: {msg}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
    let mut grid = VerifyGrid::default();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, list) = part.split_once('=').ok_or_else(|| bad(format!("missing '=' in {part:?}")))?;
        match key.trim() {
            "T" => grid.temperatures = list.split(',').map(num).collect::<Result<_, _>>()?,
            "v" => {
                grid.intervals = list
                    .split(',')
                    .map(|iv| {
                        let (a, b) = iv.split_once(':').ok_or_else(|| bad(format!("interval {iv:?} needs v1:v2")))?;
                        Ok((num(a)?, num(b)?))
                    })
                    .collect::<Result<_, CliError>>()?;
            }
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
    }
    if grid.temperatures.is_empty() || grid.intervals.is_empty() {
        return Err(bad("empty list".into()));
    }
    Ok(grid)
}

pub const SWEEP_HEADER: &str = "v,p,dp_dv,integrand,L_cumulative,W_cumulative";

/// CSV rows at `vmin + i·(vmax − vmin)/steps`. The cumulative length is the
/// ordered sum of quadratures over consecutive grid cells; the cumulative work
/// is exact.
pub fn sweep(cfg: &EosConfig, t: f64, vmin: f64, vmax: f64, steps: usize) -> Result<String, CliError> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !(vmin > 0.0 && vmax > vmin && vmax.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < vmin < vmax, got vmin = {vmin}, vmax = {vmax}")));
    }
    let eos = cfg.eos()?;
    let quad = cfg.quadrature()?;
    check_isotherm_stability(&eos, t, vmin, vmax)?;
    let integrand = |v: f64| -> thermolen::Result<f64> { Ok((-eos.dp_dv(StatePoint::new(t, v)?)?).sqrt()) };

    let h = (vmax - vmin) / steps as f64;
    let grid = |i: usize| if i == steps { vmax } else { vmin + i as f64 * h };
    let mut out = String::with_capacity(64 * (steps + 2));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    let mut length = 0.0;
    for i in 0..=steps {
        let v = grid(i);
        if i > 0 {
            length += integrate(integrand, grid(i - 1), v, &quad)?.value;
        }
        let s = StatePoint::new(t, v)?;
        let dp_dv = eos.dp_dv(s)?;
        let _ = writeln!(
            out,
            "{v:e},{:e},{dp_dv:e},{:e},{length:e},{:e}",
            eos.pressure(s)?,
            (-dp_dv).sqrt(),
            eos.work(t, vmin, v)?
        );
    }
    Ok(out)
}
