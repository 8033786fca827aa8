//! Experiment runners. Each turns a validated plan into a CSV table and a
//! one-line summary; rows always follow grid order.

use temporal_core::bell::{lg_parameter, tchsh_max};
use temporal_core::causal::{causal_tsr_series, CausalScenario, CausalVerdict};
use temporal_core::matcore::DensityMatrix;
use temporal_core::pdm::{build_pdm, f_function};
use temporal_core::steering::{classical_pair, classical_tsr_theorem_check, make_assemblage, tsr, ClassicalCheck};
use temporal_core::sweep::{self, bisect_vanishing};
use temporal_core::Error as CoreError;

use crate::config::{CausalPlan, ClassicalPlan, HierarchyPlan, LgPlan, Plan};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{0}")]
    Check(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(&'static str),
    Flag(bool),
}

/// Full round-trip precision: 17 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Num(v) => format_number(*v),
            Self::Text(s) => (*s).to_string(),
            Self::Flag(b) => u8::from(*b).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
    }

    /// Numeric column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| *h == name)?;
        self.rows
            .iter()
            .map(|r| match r[idx] {
                Cell::Num(v) => Some(v),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanishingTimes {
    pub chsh: Option<f64>,
    pub tsr: Option<f64>,
    pub f: Option<f64>,
}

impl VanishingTimes {
    /// `t_CHSH < t_TSR < t_f`, or `None` if any time was not bracketed.
    pub fn ordered(&self) -> Option<bool> {
        Some(self.chsh? < self.tsr? && self.tsr? < self.f?)
    }

    pub fn summary(&self) -> String {
        let show = |v: Option<f64>| v.map_or_else(|| "none".to_string(), format_number);
        let ordering = match self.ordered() {
            Some(true) => "holds",
            Some(false) => "violated",
            None => "undetermined",
        };
        format!(
            "vanishing times: t_chsh={} t_tsr={} t_f={} ordering={ordering}",
            show(self.chsh),
            show(self.tsr),
            show(self.f)
        )
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub summary: String,
    /// Hierarchy runs only.
    pub vanishing: Option<VanishingTimes>,
}

pub fn run(plan: &Plan) -> Result<Report, RunError> {
    match plan {
        Plan::Hierarchy(p) => run_hierarchy(p),
        Plan::Causal(p) => run_causal(p),
        Plan::Classical(p) => run_classical(p),
        Plan::Lg(p) => run_lg(p),
    }
}

fn mixed() -> DensityMatrix {
    DensityMatrix::maximally_mixed(vec![2])
}

fn hierarchy_tsr(p: &HierarchyPlan, t: f64) -> Result<f64, CoreError> {
    let sol = tsr(&make_assemblage(&mixed(), &p.settings, &p.channel, t)?);
    if !sol.is_optimal() {
        return Err(CoreError::SolverFailed(format!("TSR {:?} at t = {t}", sol.status)));
    }
    Ok(sol.value)
}

fn hierarchy_f(p: &HierarchyPlan, t: f64) -> Result<f64, CoreError> {
    Ok(f_function(&build_pdm(&p.channel, &mixed(), t)?))
}

/// Columns `t, f, tsr, tchsh_max` (the last normalized to [0, 1]) and the
/// bisected vanishing time of each quantifier.
pub fn run_hierarchy(p: &HierarchyPlan) -> Result<Report, RunError> {
    let rows = sweep::map(&p.grid, |&t| -> Result<Vec<Cell>, CoreError> {
        Ok(vec![
            Cell::Num(t),
            Cell::Num(hierarchy_f(p, t)?),
            Cell::Num(hierarchy_tsr(p, t)?),
            Cell::Num(tchsh_max(&p.channel, t)?),
        ])
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(solver_or_core)?;

    let (lo, hi) = (p.grid[0], p.grid[p.grid.len() - 1]);
    let vanish = |g: &dyn Fn(f64) -> Result<f64, CoreError>| {
        bisect_vanishing(g, lo, hi, p.tol.vanishing, p.tol.bisection).map_err(solver_or_core)
    };
    let times = VanishingTimes {
        chsh: vanish(&|t| tchsh_max(&p.channel, t))?,
        tsr: vanish(&|t| hierarchy_tsr(p, t))?,
        f: vanish(&|t| hierarchy_f(p, t))?,
    };
    Ok(Report {
        table: Table {
            header: vec!["t", "f", "tsr", "tchsh_max"],
            rows,
        },
        summary: times.summary(),
        vanishing: Some(times),
    })
}

fn solver_or_core(e: CoreError) -> RunError {
    match e {
        CoreError::SolverFailed(msg) => RunError::Solver(msg),
        other => RunError::Core(other),
    }
}

fn verdict(detected: bool) -> CausalVerdict {
    if detected {
        CausalVerdict::DirectCauseDetected
    } else {
        CausalVerdict::CommonCauseConsistent
    }
}

fn causal_series(s: &CausalScenario, grid: &[f64], label: &str) -> Result<Vec<f64>, RunError> {
    let series = causal_tsr_series(s, grid)?;
    if let Some(bad) = series.iter().find(|p| !p.optimal) {
        return Err(RunError::Solver(format!("{label} TSR not optimal at t = {}", bad.t)));
    }
    Ok(series.into_iter().map(|p| p.tsr).collect())
}

/// Columns `t, tsr_common, tsr_direct, verdict_common, verdict_direct`.
/// Each verdict covers the series up to and including its row, so the last
/// row holds the verdict for the whole grid.
pub fn run_causal(p: &CausalPlan) -> Result<Report, RunError> {
    let common = causal_series(&p.common, &p.grid, "common-cause")?;
    let direct = causal_series(&p.direct, &p.grid, "direct-cause")?;
    let (mut seen_common, mut seen_direct) = (false, false);
    let mut rows = Vec::with_capacity(p.grid.len());
    for ((&t, &c), &d) in p.grid.iter().zip(&common).zip(&direct) {
        seen_common |= c > p.tol.verdict;
        seen_direct |= d > p.tol.verdict;
        rows.push(vec![
            Cell::Num(t),
            Cell::Num(c),
            Cell::Num(d),
            Cell::Text(verdict(seen_common).as_str()),
            Cell::Text(verdict(seen_direct).as_str()),
        ]);
    }
    Ok(Report {
        table: Table {
            header: vec!["t", "tsr_common", "tsr_direct", "verdict_common", "verdict_direct"],
            rows,
        },
        summary: format!(
            "verdicts: common={} direct={}",
            verdict(seen_common),
            verdict(seen_direct)
        ),
        vanishing: None,
    })
}

/// Columns `alpha, beta, tsr, tsw, trace_distance`; every row must satisfy
/// `|tsr − trace_distance| ≤ tol.classical`.
pub fn run_classical(p: &ClassicalPlan) -> Result<Report, RunError> {
    let checks = sweep::map(&p.pairs, |&(a, b)| classical_tsr_theorem_check(&classical_pair(a, b)?))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(checks.len());
    for (k, (&(a, b), c)) in p.pairs.iter().zip(&checks).enumerate() {
        worst = worst.max(check_classical_row(k, (a, b), c, p.tol.classical)?);
        rows.push(vec![
            Cell::Num(a),
            Cell::Num(b),
            Cell::Num(c.tsr),
            Cell::Num(c.tsw),
            Cell::Num(c.trace_distance),
        ]);
    }
    Ok(Report {
        table: Table {
            header: vec!["alpha", "beta", "tsr", "tsw", "trace_distance"],
            rows,
        },
        summary: format!(
            "rows={} max |tsr - trace_distance|={}",
            checks.len(),
            format_number(worst)
        ),
        vanishing: None,
    })
}

/// Returns `|tsr − trace_distance|` for a row that passes.
fn check_classical_row(k: usize, (a, b): (f64, f64), c: &ClassicalCheck, tol: f64) -> Result<f64, RunError> {
    if !c.optimal {
        return Err(RunError::Solver(format!("row {k} (alpha={a}, beta={b}) not optimal")));
    }
    let dev = (c.tsr - c.trace_distance).abs();
    if dev > tol {
        return Err(RunError::Check(format!(
            "row {k} (alpha={a}, beta={b}): |tsr - trace_distance| = {dev:e} exceeds {tol:e}"
        )));
    }
    Ok(dev)
}

/// Columns `tau, K, violation` with equal spacings `t12 = t23 = tau`;
/// `violation` is 1 where `K` exceeds 1 by more than `tol.lg`.
pub fn run_lg(p: &LgPlan) -> Result<Report, RunError> {
    let ks = sweep::map(&p.grid, |&tau| {
        lg_parameter(&p.channel, &p.initial_state, p.observable, tau, tau)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut best = (f64::NEG_INFINITY, 0.0);
    let mut violations = 0;
    let rows = p
        .grid
        .iter()
        .zip(&ks)
        .map(|(&tau, &k)| {
            if k > best.0 {
                best = (k, tau);
            }
            let flagged = k > 1.0 + p.tol.lg;
            violations += usize::from(flagged);
            vec![Cell::Num(tau), Cell::Num(k), Cell::Flag(flagged)]
        })
        .collect();
    Ok(Report {
        table: Table {
            header: vec!["tau", "K", "violation"],
            rows,
        },
        summary: format!(
            "max K={} at tau={} violations={violations}",
            format_number(best.0),
            format_number(best.1)
        ),
        vanishing: None,
    })
}
