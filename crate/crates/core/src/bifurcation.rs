//! Localization of stability changes along one parameter.
//!
//! Each family is re-solved on an even scan, points of consecutive scan
//! values are linked by nearest neighbour into branches, and every sign
//! change of the largest real part along a branch is bisected.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::{
    coexisting_with, dead_type1_with, dead_type2_with, tumor_free_with, Equilibrium, Family, Search, SearchOptions,
};
use crate::error::{ModelError, Result};
use crate::model::{ModelParams, SystemState};
use crate::numerics::{eigenvalues, RootSet};
use crate::model::jacobian;
use crate::scenario::BifurcationSpec;

/// Brackets are bisected until narrower than this fraction of the scanned range.
pub const BRACKET_REL_WIDTH: f64 = 1e-9;
/// Scaled distance beyond which two points of consecutive scan values are not linked.
pub const LINK_TOL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Eigenvalue with the largest real part at each end of the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingEigenvalue {
    pub lower: ComplexValue,
    pub upper: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationResult {
    pub parameter_name: String,
    pub critical_value: f64,
    pub bracket: [f64; 2],
    pub crossing_eigenvalue: CrossingEigenvalue,
    pub equilibrium_family: Family,
    /// Equilibrium at the lower end of the bracket.
    pub equilibrium: SystemState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationReport {
    pub parameter_name: String,
    pub range: [f64; 2],
    pub scan_points: usize,
    pub results: Vec<BifurcationResult>,
    /// Branch ends inside the range and brackets that could not be refined.
    pub diagnostics: Vec<String>,
}

fn search_family(f: Family, p: &ModelParams) -> Search {
    let opts = SearchOptions::default();
    match f {
        Family::TumorFree => tumor_free_with(p, &opts),
        Family::Dead1 => dead_type1_with(p, &opts),
        Family::Dead2 => dead_type2_with(p, &opts),
        Family::Coexisting => coexisting_with(p, &opts),
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    value: f64,
    point: SystemState,
    max_real: f64,
    leading: Complex64,
}

fn leading_eigenvalue(roots: &RootSet) -> Complex64 {
    // Ties between a conjugate pair go to the upper half plane.
    roots.roots.iter().copied().fold(Complex64::new(f64::NEG_INFINITY, 0.0), |best, z| {
        if z.re > best.re || (z.re == best.re && z.im > best.im) {
            z
        } else {
            best
        }
    })
}

fn sample(value: f64, eq: &Equilibrium, p: &ModelParams) -> Result<Sample> {
    let eig = eigenvalues(&jacobian(&eq.point, p)?)?;
    let leading = leading_eigenvalue(&eig);
    Ok(Sample { value, point: eq.point, max_real: leading.re, leading })
}

/// Evaluates every family at one parameter value.
fn scan_point(base: &ModelParams, name: &str, value: f64) -> Result<Vec<(Family, Sample)>> {
    let p = base.with(name, value)?;
    let mut out = Vec::new();
    for f in Family::ALL {
        for eq in search_family(f, &p).equilibria {
            out.push((f, sample(value, &eq, &p)?));
        }
    }
    Ok(out)
}

/// Nearest member of `f` at `value`, if within [`LINK_TOL`] of `near`.
fn follow(base: &ModelParams, name: &str, value: f64, f: Family, near: &SystemState) -> Result<Option<Sample>> {
    let p = base.with(name, value)?;
    let best = search_family(f, &p)
        .equilibria
        .into_iter()
        .map(|e| (e.point.scaled_distance(near), e))
        .filter(|(d, _)| *d < LINK_TOL)
        .min_by(|a, b| a.0.total_cmp(&b.0));
    best.map(|(_, e)| sample(value, &e, &p)).transpose()
}

struct Branch {
    family: Family,
    samples: Vec<Sample>,
    /// Scan index of the last sample.
    last: usize,
}

/// Links the samples of one family across scan indices.
fn link(family: Family, scan: &[Vec<(Family, Sample)>], diagnostics: &mut Vec<String>) -> Vec<Branch> {
    let mut done: Vec<Branch> = Vec::new();
    let mut open: Vec<Branch> = Vec::new();
    let n = scan.len();
    for (j, at) in scan.iter().enumerate() {
        let mut fresh: Vec<Sample> = at.iter().filter(|(f, _)| *f == family).map(|(_, s)| *s).collect();
        let mut still_open = Vec::new();
        // Closest pairs first so that branches do not swap.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (b, br) in open.iter().enumerate() {
            let tail = br.samples.last().expect("branch has samples").point;
            for (s, smp) in fresh.iter().enumerate() {
                let d = smp.point.scaled_distance(&tail);
                if d < LINK_TOL {
                    pairs.push((d, b, s));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut branch_used = vec![false; open.len()];
        let mut sample_used = vec![false; fresh.len()];
        let mut extension: Vec<Option<usize>> = vec![None; open.len()];
        for (_, b, s) in pairs {
            if !branch_used[b] && !sample_used[s] {
                branch_used[b] = true;
                sample_used[s] = true;
                extension[b] = Some(s);
            }
        }
        for (b, mut br) in open.into_iter().enumerate() {
            match extension[b] {
                Some(s) => {
                    br.samples.push(fresh[s]);
                    br.last = j;
                    still_open.push(br);
                }
                None => {
                    let v = br.samples.last().expect("branch has samples").value;
                    diagnostics.push(format!("{family} branch ends after {v:e}; no matching equilibrium at the next scan value"));
                    done.push(br);
                }
            }
        }
        for (s, smp) in fresh.drain(..).enumerate() {
            if !sample_used[s] {
                if j > 0 {
                    diagnostics.push(format!("{family} branch starts at {:e}", smp.value));
                }
                still_open.push(Branch { family, samples: vec![smp], last: j });
            }
        }
        open = still_open;
    }
    debug_assert!(open.iter().all(|b| b.last + 1 == n));
    done.extend(open);
    done
}

fn opposite(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Bisects `[lo, hi]` following the branch from `lo`.
fn bisect(
    base: &ModelParams,
    name: &str,
    family: Family,
    mut lo: Sample,
    mut hi: Sample,
    width: f64,
) -> std::result::Result<(Sample, Sample), String> {
    while hi.value - lo.value >= width {
        let mid = 0.5 * (lo.value + hi.value);
        if mid <= lo.value || mid >= hi.value {
            break;
        }
        let near = SystemState::from_array(std::array::from_fn(|k| {
            0.5 * (lo.point.to_array()[k] + hi.point.to_array()[k])
        }));
        let s = match follow(base, name, mid, family, &near) {
            Ok(Some(s)) => s,
            Ok(None) => return Err(format!("{family} branch lost at {mid:e} while bisecting [{:e}, {:e}]", lo.value, hi.value)),
            Err(e) => return Err(format!("{family} evaluation failed at {mid:e}: {e}")),
        };
        if s.max_real == 0.0 {
            return Ok((s, s));
        }
        if opposite(lo.max_real, s.max_real) {
            hi = s;
        } else {
            lo = s;
        }
    }
    Ok((lo, hi))
}

/// Scans `spec.points` even values and localizes every stability change.
pub fn run_bifurcation(base: &ModelParams, spec: &BifurcationSpec) -> Result<BifurcationReport> {
    spec.validate(base)?;
    let name = spec.parameter.as_str();
    let n = spec.points;
    let values: Vec<f64> = (0..n)
        .map(|j| if j + 1 == n { spec.max } else { spec.min + (spec.max - spec.min) * j as f64 / (n - 1) as f64 })
        .collect();
    let scan: Vec<Vec<(Family, Sample)>> =
        values.par_iter().map(|&v| scan_point(base, name, v)).collect::<Result<_>>()?;

    let width = BRACKET_REL_WIDTH * (spec.max - spec.min);
    let mut diagnostics = Vec::new();
    let mut brackets = Vec::new();
    for f in Family::ALL {
        for br in link(f, &scan, &mut diagnostics) {
            for w in br.samples.windows(2) {
                if opposite(w[0].max_real, w[1].max_real) {
                    brackets.push((br.family, w[0], w[1]));
                }
            }
        }
    }
    let refined: Vec<_> = brackets
        .par_iter()
        .map(|&(f, lo, hi)| (f, bisect(base, name, f, lo, hi, width)))
        .collect();

    let mut results = Vec::new();
    for (family, r) in refined {
        match r {
            Ok((lo, hi)) => results.push(BifurcationResult {
                parameter_name: name.to_string(),
                critical_value: 0.5 * (lo.value + hi.value),
                bracket: [lo.value, hi.value],
                crossing_eigenvalue: CrossingEigenvalue { lower: lo.leading.into(), upper: hi.leading.into() },
                equilibrium_family: family,
                equilibrium: lo.point,
            }),
            Err(msg) => diagnostics.push(msg),
        }
    }
    results.sort_by(|a, b| {
        a.equilibrium_family.cmp(&b.equilibrium_family).then(a.critical_value.total_cmp(&b.critical_value))
    });
    if results.is_empty() && scan.iter().all(|s| s.is_empty()) {
        return Err(ModelError::Precondition(format!("no equilibrium anywhere in {name} ∈ [{}, {}]", spec.min, spec.max)));
    }
    Ok(BifurcationReport { parameter_name: name.to_string(), range: [spec.min, spec.max], scan_points: n, results, diagnostics })
}
