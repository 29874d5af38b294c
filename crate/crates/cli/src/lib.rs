//! Command layer of the `erbc` binary. Each command loads a scenario, calls
//! the library, and writes text files named after the scenario label.

pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use erbc_core::bifurcation::{run_bifurcation, BifurcationReport};
use erbc_core::equilibria::Catalog;
use erbc_core::export::{csv_num, csv_opt, csv_row, to_json};
use erbc_core::integrator::integrate;
use erbc_core::numerics::Verdict;
use erbc_core::scenario::{Analysis, Axis, BifurcationSpec, Grid, Scenario, Spacing, SweepSpec};
use erbc_core::stability::{departure_check, empirical_check, EmpiricalCheck, ProbeOptions};
use erbc_core::sweep::{run_sweep, sweep_csv, SweepRow};
use erbc_core::validation::{run_validation, ValidationReport};
use erbc_core::{classify, find_all, Family, ModelError, StabilityReport, Trajectory};

pub const DEFAULT_SCENARIO: &str = include_str!("../default.scenario.json");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("one or more validation suites failed")]
    SuiteFailed,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::Io { .. } => 3,
            CliError::SuiteFailed => 1,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParams(_) | ModelError::InvalidInput(_) => CliError::Input(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "erbc", version, about = "ER+ breast cancer treatment model: simulation, equilibria, stability, sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the scenario and write the trajectory.
    Simulate(Common),
    /// Locate every equilibrium and write the catalog.
    Equilibria(Common),
    /// Classify every equilibrium.
    Stability(StabilityArgs),
    /// Re-solve over a grid of one or two parameters.
    Sweep(SweepArgs),
    /// Localize stability changes along one parameter.
    Bifurcate(BifurcateArgs),
    /// Run the seeded cross-check suites.
    Validate(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Json
    }
    fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario JSON; the bundled default when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Also write SVG charts.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: Common,
    /// Integrate seeded perturbations around each classified equilibrium.
    #[arg(long)]
    pub probe: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Parameter to vary; the scenario's sweep block is used when omitted.
    #[arg(long)]
    pub param: Option<String>,
    /// Explicit grid, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<f64>,
    /// Even grid `min:max:count`, optionally `:log`.
    #[arg(long)]
    pub range: Option<String>,
    /// Second parameter for a two-dimensional grid.
    #[arg(long)]
    pub param2: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values2: Vec<f64>,
    #[arg(long)]
    pub range2: Option<String>,
    /// Any of equilibria, stability, repro, settle.
    #[arg(long, value_delimiter = ',')]
    pub analyses: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Parameter to scan; the scenario's bifurcation block is used when omitted.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub stdout: String,
}

pub fn load_scenario(path: Option<&Path>) -> Result<Scenario> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display())))?,
        None => DEFAULT_SCENARIO.to_string(),
    };
    Ok(Scenario::from_json(&text)?)
}

struct Sink {
    dir: PathBuf,
    label: String,
    written: Vec<PathBuf>,
}

impl Sink {
    fn new(out: Option<&Path>, label: &str) -> Result<Self> {
        let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
        Ok(Self { dir, label: label.to_string(), written: Vec::new() })
    }

    fn write(&mut self, suffix: &str, content: &str) -> Result<()> {
        let path = self.dir.join(format!("{}_{suffix}", self.label));
        fs::write(&path, content).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.written.push(path);
        Ok(())
    }
}

fn json_text<T: serde::Serialize + ?Sized>(v: &T) -> Result<String> {
    to_json(v).map_err(|e| CliError::Numeric(format!("JSON encoding failed: {e}")))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Equilibria(c) => equilibria(c),
        Command::Stability(a) => stability(a),
        Command::Sweep(a) => sweep(a),
        Command::Bifurcate(a) => bifurcate(a),
        Command::Validate(c) => validate(c),
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = csv_row(["t", "N", "T", "I", "E", "M"]);
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![csv_num(*t)];
        row.extend(x.to_array().map(csv_num));
        out.push_str(&csv_row(row));
    }
    out
}

fn trajectory_svg(label: &str, traj: &Trajectory) -> String {
    let names = ["N", "T", "I", "E", "M"];
    let series: Vec<svg::Series> = (0..5)
        .map(|k| svg::Series {
            name: names[k],
            x: traj.times.clone(),
            y: traj.states.iter().map(|s| s.to_array()[k]).collect(),
        })
        .collect();
    svg::line_chart(label, "t (days)", &series)
}

fn simulate(c: &Common) -> Result<Outcome> {
    let sc = load_scenario(c.scenario.as_deref())?;
    let traj = integrate(&sc.initial_state, &sc.params, &sc.integration_config())?;
    let mut sink = Sink::new(c.out.as_deref(), &sc.label)?;
    sink.write("trajectory.csv", &trajectory_csv(&traj))?;
    if c.svg {
        sink.write("trajectory.svg", &trajectory_svg(&sc.label, &traj))?;
    }
    Ok(Outcome { written: sink.written, stdout: String::new() })
}

fn existence_flag(f: Family) -> &'static str {
    match f {
        Family::TumorFree => "lemma1",
        Family::Dead1 => "lemma2",
        Family::Dead2 => "lemma3",
        Family::Coexisting => "lemma4",
    }
}

pub fn catalog_csv(cat: &Catalog) -> String {
    let mut out = csv_row(["family", "N", "T", "I", "E", "M", "residual", "provenance", "existence"]);
    for eq in &cat.equilibria {
        let mut row = vec![eq.family.as_str().to_string()];
        row.extend(eq.point.to_array().map(csv_num));
        row.push(csv_num(eq.residual));
        row.push(serde_json::to_value(eq.provenance).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
        row.push(eq.flag(existence_flag(eq.family)).map(|c| c.holds.to_string()).unwrap_or_default());
        out.push_str(&csv_row(row));
    }
    out
}

pub fn catalog_json(label: &str, cat: &Catalog) -> Result<String> {
    json_text(&json!({
        "label": label,
        "equilibria": cat.equilibria,
        "diagnostics": cat.diagnostics,
    }))
}

fn equilibria(c: &Common) -> Result<Outcome> {
    let sc = load_scenario(c.scenario.as_deref())?;
    let cat = find_all(&sc.params)?;
    let mut sink = Sink::new(c.out.as_deref(), &sc.label)?;
    if c.format.json() {
        sink.write("equilibria.json", &catalog_json(&sc.label, &cat)?)?;
        sink.write("reduced.json", &json_text(&cat.reduced)?)?;
    }
    if c.format.csv() {
        sink.write("equilibria.csv", &catalog_csv(&cat))?;
    }
    Ok(Outcome { written: sink.written, stdout: String::new() })
}

fn agreement_text(a: Option<bool>) -> String {
    a.map(|b| b.to_string()).unwrap_or_default()
}

pub const SUMMARY_HEADER: [&str; 7] = ["family", "verdict", "maxRe", "R0", "R1", "R_IM", "agreement"];

pub fn stability_summary_csv(reports: &[StabilityReport]) -> String {
    let mut out = csv_row(SUMMARY_HEADER);
    for r in reports {
        let (r0, r1, r_im) = match &r.repro {
            Some(rn) => (rn.r0.value, rn.r1.value, rn.r_im.and_then(|x| x.value)),
            None => (None, None, None),
        };
        out.push_str(&csv_row([
            r.equilibrium.family.as_str().to_string(),
            r.verdict.as_str().to_string(),
            csv_num(r.max_real),
            csv_opt(r0),
            csv_opt(r1),
            csv_opt(r_im),
            agreement_text(r.agreement.hurwitz),
        ]));
    }
    out
}

pub fn stability_json(index: usize, r: &StabilityReport, probe: Option<&EmpiricalCheck>) -> Result<String> {
    let eig: Vec<Value> = r.eigenvalues.roots.iter().map(|z| json!({"re": z.re, "im": z.im})).collect();
    let repro = r.repro.map(|rn| {
        json!({
            "R0": rn.r0,
            "R1": rn.r1,
            "R_IM": rn.r_im,
        })
    });
    let mut doc = json!({
        "index": index,
        "equilibrium": r.equilibrium,
        "verdict": r.verdict,
        "max_real": r.max_real,
        "eigenvalues": eig,
        "jacobian": r.jacobian,
        "char_coeffs": r.char_coeffs,
        "hurwitz": r.hurwitz,
        "reproduction_numbers": repro,
        "theorem_checks": r.theorem_checks,
        "derived_checks": r.derived_checks,
        "agreement": r.agreement,
    });
    if let Some(p) = probe {
        doc["perturbation_check"] = json!(p);
    }
    json_text(&doc)
}

fn stability(a: &StabilityArgs) -> Result<Outcome> {
    let c = &a.common;
    let sc = load_scenario(c.scenario.as_deref())?;
    let seed = c.seed.unwrap_or(sc.seed);
    let cat = find_all(&sc.params)?;
    let reports = cat.equilibria.iter().map(|eq| classify(eq, &sc.params)).collect::<erbc_core::Result<Vec<_>>>()?;
    let mut sink = Sink::new(c.out.as_deref(), &sc.label)?;
    if c.format.json() {
        let opts = ProbeOptions { seed, ..Default::default() };
        for (i, r) in reports.iter().enumerate() {
            let probe = if a.probe {
                match r.verdict {
                    Verdict::Stable => Some(empirical_check(r, &sc.params, &opts)?),
                    Verdict::Unstable => Some(departure_check(r, &sc.params, &opts)?),
                    Verdict::Inconclusive => None,
                }
            } else {
                None
            };
            sink.write(&format!("stability_{i}.json"), &stability_json(i, r, probe.as_ref())?)?;
        }
    }
    if c.format.csv() {
        sink.write("stability_summary.csv", &stability_summary_csv(&reports))?;
    }
    Ok(Outcome { written: sink.written, stdout: String::new() })
}

fn parse_range(s: &str) -> Result<Grid> {
    let bad = || CliError::Input(format!("range `{s}` must be min:max:count or min:max:count:log"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let min = parts[0].trim().parse().map_err(|_| bad())?;
    let max = parts[1].trim().parse().map_err(|_| bad())?;
    let count = parts[2].trim().parse().map_err(|_| bad())?;
    let spacing = match parts.get(3).map(|s| s.trim()) {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(_) => return Err(bad()),
    };
    Ok(Grid::Range { min, max, count, spacing })
}

fn axis_from_flags(param: &str, values: &[f64], range: Option<&str>) -> Result<Axis> {
    let grid = match (values.is_empty(), range) {
        (false, None) => Grid::Values(values.to_vec()),
        (true, Some(r)) => parse_range(r)?,
        _ => return Err(CliError::Input(format!("give exactly one of --values or --range for `{param}`"))),
    };
    Ok(Axis { parameter: param.to_string(), grid })
}

fn parse_analysis(s: &str) -> Result<Analysis> {
    serde_json::from_value(Value::String(s.trim().to_string()))
        .map_err(|_| CliError::Input(format!("unknown analysis `{s}` (expected equilibria, stability, repro or settle)")))
}

/// Sweep specification from flags, falling back to the scenario.
pub fn sweep_spec(a: &SweepArgs, sc: &Scenario) -> Result<SweepSpec> {
    let mut spec = match &a.param {
        Some(p) => {
            let mut s = SweepSpec::new(axis_from_flags(p, &a.values, a.range.as_deref())?);
            if let Some(p2) = &a.param2 {
                s.second = Some(axis_from_flags(p2, &a.values2, a.range2.as_deref())?);
            }
            s
        }
        None => sc
            .sweep
            .clone()
            .ok_or_else(|| CliError::Input("no --param given and the scenario has no sweep block".into()))?,
    };
    if !a.analyses.is_empty() {
        spec.analyses = a.analyses.iter().map(|s| parse_analysis(s)).collect::<Result<_>>()?;
    }
    spec.validate(&sc.params)?;
    Ok(spec)
}

fn sweep_svgs(spec: &SweepSpec, rows: &[SweepRow]) -> (String, String) {
    let mut xs: Vec<f64> = rows.iter().map(|r| r.values[0]).collect();
    xs.dedup();
    let first_of = |f: Family, x: f64| rows.iter().find(|r| r.values[0] == x && r.family() == Some(f));
    let mut stab = Vec::new();
    for f in Family::ALL {
        let y: Vec<f64> = xs.iter().map(|&x| first_of(f, x).and_then(|r| r.max_real).unwrap_or(f64::NAN)).collect();
        if y.iter().any(|v| v.is_finite()) {
            stab.push(svg::Series { name: f.as_str(), x: xs.clone(), y });
        }
    }
    let pick = |g: fn(&SweepRow) -> Option<f64>| -> Vec<f64> {
        xs.iter().map(|&x| first_of(Family::TumorFree, x).and_then(g).unwrap_or(f64::NAN)).collect()
    };
    let repro = vec![
        svg::Series { name: "R0", x: xs.clone(), y: pick(|r| r.r0) },
        svg::Series { name: "R1", x: xs.clone(), y: pick(|r| r.r1) },
    ];
    let p = &spec.axis.parameter;
    (
        svg::line_chart(&format!("max Re(lambda) vs {p}"), p, &stab),
        svg::line_chart(&format!("tumor-free R0, R1 vs {p}"), p, &repro),
    )
}

fn sweep(a: &SweepArgs) -> Result<Outcome> {
    let c = &a.common;
    let sc = load_scenario(c.scenario.as_deref())?;
    let spec = sweep_spec(a, &sc)?;
    let rows = run_sweep(&sc.params, &spec, &sc.initial_state, &sc.integration_config())?;
    let mut sink = Sink::new(c.out.as_deref(), &sc.label)?;
    sink.write("sweep.csv", &sweep_csv(&spec, &rows))?;
    if c.svg && spec.second.is_none() {
        let (stab, repro) = sweep_svgs(&spec, &rows);
        sink.write("sweep.svg", &stab)?;
        sink.write("sweep_repro.svg", &repro)?;
    }
    Ok(Outcome { written: sink.written, stdout: String::new() })
}

pub fn bifurcation_spec(a: &BifurcateArgs, sc: &Scenario) -> Result<BifurcationSpec> {
    let base = sc.bifurcation.clone();
    let parameter = a
        .param
        .clone()
        .or_else(|| base.as_ref().map(|b| b.parameter.clone()))
        .ok_or_else(|| CliError::Input("no --param given and the scenario has no bifurcation block".into()))?;
    let from_base = |f: fn(&BifurcationSpec) -> f64| base.as_ref().filter(|b| b.parameter == parameter).map(f);
    let min = a.min.or_else(|| from_base(|b| b.min)).ok_or_else(|| CliError::Input("--min is required".into()))?;
    let max = a.max.or_else(|| from_base(|b| b.max)).ok_or_else(|| CliError::Input("--max is required".into()))?;
    let points = a
        .points
        .or_else(|| base.as_ref().filter(|b| b.parameter == parameter).map(|b| b.points))
        .unwrap_or(erbc_core::scenario::DEFAULT_BIFURCATION_POINTS);
    let spec = BifurcationSpec { parameter, min, max, points };
    spec.validate(&sc.params)?;
    Ok(spec)
}

pub fn bifurcation_json(label: &str, rep: &BifurcationReport) -> Result<String> {
    json_text(&json!({ "label": label, "report": rep }))
}

fn bifurcate(a: &BifurcateArgs) -> Result<Outcome> {
    let c = &a.common;
    let sc = load_scenario(c.scenario.as_deref())?;
    let spec = bifurcation_spec(a, &sc)?;
    let rep = run_bifurcation(&sc.params, &spec)?;
    let mut sink = Sink::new(c.out.as_deref(), &sc.label)?;
    sink.write("bifurcation.json", &bifurcation_json(&sc.label, &rep)?)?;
    Ok(Outcome { written: sink.written, stdout: String::new() })
}

fn validate(c: &Common) -> Result<Outcome> {
    let seed = match (c.seed, &c.scenario) {
        (Some(s), _) => s,
        (None, Some(_)) => load_scenario(c.scenario.as_deref())?.seed,
        (None, None) => 0,
    };
    let report: ValidationReport = run_validation(seed);
    let text = report.to_text();
    let mut written = Vec::new();
    if let Some(dir) = &c.out {
        let mut sink = Sink::new(Some(dir), "validation")?;
        sink.write("report.txt", &text)?;
        written = sink.written;
    }
    if report.passed() {
        Ok(Outcome { written, stdout: text })
    } else {
        print!("{text}");
        Err(CliError::SuiteFailed)
    }
}

