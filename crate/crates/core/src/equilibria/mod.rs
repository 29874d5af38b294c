//! Equilibrium families: tumor-free, dead (type 1 and 2) and coexisting.
//!
//! Candidates come from closed forms, reduced scalar equations and seeded
//! grids; every candidate is then refined by Newton on the free coordinates
//! of the full system and kept only if the full residual is below
//! [`CONFIRM_TOL`].

mod families;
mod flags;
mod reduced;

use serde::{Deserialize, Serialize};

pub use families::{coexisting, dead_type1, dead_type2, tumor_free};
pub use families::{coexisting_with, dead_type1_with, dead_type2_with, tumor_free_with};
pub use flags::existence_flags;
pub use reduced::{
    coexist_quadratic_coeffs, compare_forms, dead1_quadratic_coeffs, dead1_quadratic_printed_coeffs,
    dead2_c, dead2_cubic_derived_coeffs, dead2_cubic_printed_coeffs, dead2_quartic_coeffs, discriminant,
    drug_denominator, drug_level, immune_loss, positive_root_count, Dead2Cubic, Mismatch, ReducedPolynomials,
};

use crate::conditions::Condition;
use crate::error::Result;
use crate::model::SystemState;
use crate::model::ModelParams;
use crate::numerics::NewtonOptions;

/// Largest `‖rhs‖∞` of a reported equilibrium.
pub const CONFIRM_TOL: f64 = 1e-10;
/// Components in `(−SNAP_TOL, 0)` are set to zero.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    TumorFree,
    Dead1,
    Dead2,
    Coexisting,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::TumorFree, Family::Dead1, Family::Dead2, Family::Coexisting];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::TumorFree => "tumor_free",
            Family::Dead1 => "dead1",
            Family::Dead2 => "dead2",
            Family::Coexisting => "coexisting",
        }
    }

    /// Whether `x` has the zero pattern of this family.
    pub fn matches(self, x: &SystemState) -> bool {
        match self {
            Family::TumorFree => x.t == 0.0 && x.n > 0.0,
            Family::Dead1 => x.n == 0.0 && x.t == 0.0,
            Family::Dead2 => x.n == 0.0 && x.t > 0.0,
            Family::Coexisting => x.n > 0.0 && x.t > 0.0,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    PolyRoot,
    NewtonRefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub point: SystemState,
    pub family: Family,
    /// `‖rhs(point)‖∞`.
    pub residual: f64,
    pub existence_flags: Vec<Condition>,
    pub provenance: Provenance,
}

impl Equilibrium {
    pub fn flag(&self, name: &str) -> Option<&Condition> {
        crate::conditions::find(&self.existence_flags, name)
    }
}

/// Seeding densities and tolerances of the multi-start search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Points of the log grid used to seed `T` for dead type 2, and per axis for the coexisting grid.
    pub log_grid_points: usize,
    /// Points of the scalar sign-change scans.
    pub scan_points: usize,
    /// Relative distance below which two points are the same equilibrium.
    pub dedup_tol: f64,
    pub newton: NewtonOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { log_grid_points: 16, scan_points: 400, dedup_tol: 1e-6, newton: NewtonOptions::default() }
    }
}

/// Equilibria of one family plus notes on rejected candidates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Search {
    pub equilibria: Vec<Equilibrium>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub equilibria: Vec<Equilibrium>,
    pub reduced: ReducedPolynomials,
    pub diagnostics: Vec<String>,
}

impl Catalog {
    pub fn of_family(&self, f: Family) -> impl Iterator<Item = &Equilibrium> {
        self.equilibria.iter().filter(move |e| e.family == f)
    }
}

fn order(a: &Equilibrium, b: &Equilibrium) -> std::cmp::Ordering {
    a.family.cmp(&b.family).then_with(|| {
        let (x, y) = (a.point.to_array(), b.point.to_array());
        let key = [1, 0, 2, 4, 3];
        key.iter().map(|&k| x[k].total_cmp(&y[k])).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Sorts by family then `T`, and drops points within `tol` of an earlier one.
pub fn sort_and_dedup(mut eqs: Vec<Equilibrium>, tol: f64) -> Vec<Equilibrium> {
    eqs.sort_by(order);
    let mut out: Vec<Equilibrium> = Vec::with_capacity(eqs.len());
    for e in eqs {
        if !out.iter().any(|k| e.point.scaled_distance(&k.point) < tol) {
            out.push(e);
        }
    }
    out
}

/// All four families, merged.
pub fn find_all(p: &ModelParams) -> Result<Catalog> {
    find_all_with(p, &SearchOptions::default())
}

pub fn find_all_with(p: &ModelParams, opts: &SearchOptions) -> Result<Catalog> {
    p.ensure_valid()?;
    let mut reduced = ReducedPolynomials::build(p);
    let mut all = Vec::new();
    let mut diagnostics = Vec::new();
    for search in [
        tumor_free_with(p, opts),
        dead_type1_with(p, opts),
        dead_type2_with(p, opts),
        coexisting_with(p, opts),
    ] {
        all.extend(search.equilibria);
        diagnostics.extend(search.diagnostics);
    }
    let equilibria = sort_and_dedup(all, opts.dedup_tol);
    for eq in &equilibria {
        let x = eq.point;
        match eq.family {
            Family::Dead2 => reduced.dead2_cubic.push(families::dead2_cubic_at(p, &x)),
            Family::Coexisting => {
                if let Ok(q) = crate::numerics::Polynomial::new(coexist_quadratic_coeffs(p, x.n, x.i, x.e).to_vec()) {
                    reduced.coexist_quadratic.push(q);
                }
            }
            _ => {}
        }
    }
    Ok(Catalog { equilibria, reduced, diagnostics })
}
