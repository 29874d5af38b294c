//! One- and two-parameter sweeps. Every grid point is solved from scratch;
//! points run in parallel and rows come back in grid order.

use rayon::prelude::*;

use crate::equilibria::{find_all, Family};
use crate::error::Result;
use crate::export::{csv_num, csv_opt, csv_row};
use crate::integrator::{default_settle_horizon, settle_with, IntegrationConfig};
use crate::model::{reproduction_numbers, ModelParams, SystemState};
use crate::numerics::Verdict;
use crate::scenario::{Analysis, SweepSpec};
use crate::stability::classify;

/// Flatness threshold of the settle analysis.
pub const SETTLE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Equilibrium(Family),
    /// The grid point has no equilibrium at all.
    None,
    /// Long-run state of the scenario's initial condition.
    Settle { settled: bool },
}

impl RowKind {
    pub fn label(self) -> &'static str {
        match self {
            RowKind::Equilibrium(f) => f.as_str(),
            RowKind::None => "none",
            RowKind::Settle { .. } => "settle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Value of the first parameter, and of the second if any.
    pub values: Vec<f64>,
    pub kind: RowKind,
    pub state: Option<SystemState>,
    pub verdict: Option<Verdict>,
    pub max_real: Option<f64>,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub r_im: Option<f64>,
}

impl SweepRow {
    fn empty(values: Vec<f64>, kind: RowKind) -> Self {
        Self { values, kind, state: None, verdict: None, max_real: None, r0: None, r1: None, r_im: None }
    }

    pub fn family(&self) -> Option<Family> {
        match self.kind {
            RowKind::Equilibrium(f) => Some(f),
            _ => None,
        }
    }

    fn verdict_text(&self) -> &'static str {
        match (self.kind, self.verdict) {
            (RowKind::Settle { settled: true }, _) => "settled",
            (RowKind::Settle { settled: false }, _) => "unsettled",
            (_, Some(v)) => v.as_str(),
            (_, None) => "",
        }
    }
}

/// Parameter sets of the grid, first axis outermost.
pub fn grid_points(base: &ModelParams, spec: &SweepSpec) -> Result<Vec<(Vec<f64>, ModelParams)>> {
    let mut out = Vec::new();
    for a in spec.axis.grid.values() {
        let pa = base.with(&spec.axis.parameter, a)?;
        match &spec.second {
            None => out.push((vec![a], pa)),
            Some(axis) => {
                for b in axis.grid.values() {
                    out.push((vec![a, b], pa.with(&axis.parameter, b)?));
                }
            }
        }
    }
    Ok(out)
}

fn evaluate_point(
    values: Vec<f64>,
    p: &ModelParams,
    spec: &SweepSpec,
    x0: &SystemState,
    integration: &IntegrationConfig,
) -> Result<Vec<SweepRow>> {
    p.ensure_valid()?;
    let mut rows = Vec::new();
    let stability = spec.wants(Analysis::Stability);
    let repro = spec.wants(Analysis::Repro);
    if stability || repro || spec.wants(Analysis::Equilibria) {
        let catalog = find_all(p)?;
        if catalog.equilibria.is_empty() {
            rows.push(SweepRow::empty(values.clone(), RowKind::None));
        }
        for eq in &catalog.equilibria {
            let mut row = SweepRow::empty(values.clone(), RowKind::Equilibrium(eq.family));
            row.state = Some(eq.point);
            if stability {
                let r = classify(eq, p)?;
                row.verdict = Some(r.verdict);
                row.max_real = Some(r.max_real);
            }
            if repro && eq.point.t == 0.0 {
                let rn = reproduction_numbers(&eq.point, p)?;
                row.r0 = rn.r0.value;
                row.r1 = rn.r1.value;
                row.r_im = rn.r_im.and_then(|r| r.value);
            }
            rows.push(row);
        }
    }
    if spec.wants(Analysis::Settle) {
        let horizon = default_settle_horizon(p);
        let out = settle_with(x0, p, horizon, 0.1 * horizon, SETTLE_EPS, integration)?;
        let mut row = SweepRow::empty(values, RowKind::Settle { settled: out.settled });
        row.state = Some(out.limit);
        rows.push(row);
    }
    Ok(rows)
}

/// All rows, grid-major and in catalog order within a grid point.
pub fn run_sweep(
    base: &ModelParams,
    spec: &SweepSpec,
    x0: &SystemState,
    integration: &IntegrationConfig,
) -> Result<Vec<SweepRow>> {
    spec.validate(base)?;
    let points = grid_points(base, spec)?;
    let per_point: Vec<Result<Vec<SweepRow>>> = points
        .into_par_iter()
        .map(|(values, p)| evaluate_point(values, &p, spec, x0, integration))
        .collect();
    let mut rows = Vec::new();
    for r in per_point {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn sweep_header(spec: &SweepSpec) -> String {
    let mut cols = vec![spec.axis.parameter.as_str()];
    if let Some(s) = &spec.second {
        cols.push(&s.parameter);
    }
    cols.extend(["family", "N", "T", "I", "E", "M", "verdict", "maxRe", "R0", "R1", "R_IM"]);
    csv_row(cols)
}

pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = sweep_header(spec);
    for r in rows {
        let mut fields: Vec<String> = r.values.iter().map(|&v| csv_num(v)).collect();
        fields.push(r.kind.label().into());
        match r.state {
            Some(x) => fields.extend(x.to_array().map(csv_num)),
            None => fields.extend(std::iter::repeat_n(String::new(), 5)),
        }
        fields.push(r.verdict_text().into());
        fields.extend([csv_opt(r.max_real), csv_opt(r.r0), csv_opt(r.r1), csv_opt(r.r_im)]);
        out.push_str(&csv_row(fields));
    }
    out
}
