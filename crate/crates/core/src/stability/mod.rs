//! Local stability of equilibria: eigenvalues of the Jacobian, Routh–Hurwitz
//! on its characteristic polynomial, and the family-specific conditions.
//!
//! The eigenvalue verdict is authoritative. Family conditions are reported
//! twice: once as stated for the model (`theorem_checks`) and once rebuilt
//! from the Jacobian blocks (`derived_checks`), so disagreements are visible.

mod conditions;
mod empirical;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use conditions::{derived_conditions, theorem_conditions};
pub use empirical::{departure_check, empirical_check, EmpiricalCheck, PerturbationRun, ProbeOptions};

use crate::equilibria::{Equilibrium, Family};
use crate::error::{ModelError, Result};
use crate::model::{jacobian, reproduction_numbers, ModelParams, ReproductionNumbers};
use crate::numerics::{char_poly, eigenvalues, routh_hurwitz, verdict_from_max_real, HurwitzVerdict, Matrix5, Polynomial, RootSet, Verdict};
use crate::Condition;

/// Largest equilibrium residual accepted by [`classify`].
pub const CLASSIFY_RESIDUAL_LIMIT: f64 = 1e-8;
/// Tolerance when matching eigenvalues against block spectra and `−θ`.
pub const SPECTRUM_MATCH_TOL: f64 = 1e-8;

/// Concordance between the verdict paths. `None` where a comparison does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    /// Hurwitz verdict equals eigenvalue verdict; `None` when either is inconclusive.
    pub hurwitz: Option<bool>,
    /// Stated conditions predict the eigenvalue verdict.
    pub theorem: Option<bool>,
    /// Block-derived conditions predict the eigenvalue verdict.
    pub derived: Option<bool>,
    /// `−θ` is an eigenvalue.
    pub theta_eigenvalue: bool,
    /// At `T = 0`, the spectrum is the union of the two 2×2 block spectra and `{−θ}`.
    pub block_spectrum: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub equilibrium: Equilibrium,
    pub jacobian: Matrix5,
    pub char_coeffs: Polynomial,
    pub eigenvalues: RootSet,
    pub hurwitz: HurwitzVerdict,
    pub verdict: Verdict,
    pub max_real: f64,
    pub repro: Option<ReproductionNumbers>,
    pub theorem_checks: Vec<Condition>,
    pub derived_checks: Vec<Condition>,
    pub agreement: Agreement,
}

impl StabilityReport {
    pub fn theorem_check(&self, name: &str) -> Option<&Condition> {
        crate::conditions::find(&self.theorem_checks, name)
    }

    pub fn derived_check(&self, name: &str) -> Option<&Condition> {
        crate::conditions::find(&self.derived_checks, name)
    }
}

/// Eigenvalues of `[[a, b], [c, d]]`.
pub fn block_eigenvalues(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let half_tr = 0.5 * (a + d);
    let disc = Complex64::new(half_tr * half_tr - (a * d - b * c), 0.0).sqrt();
    [Complex64::new(half_tr, 0.0) + disc, Complex64::new(half_tr, 0.0) - disc]
}

/// Greedy one-to-one matching of two multisets within `tol·(1+|z|)`.
pub fn spectra_match(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for z in a {
        let best = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&x, &y| (b[x] - z).norm().total_cmp(&(b[y] - z).norm()));
        match best {
            Some(j) if (b[j] - z).norm() <= tol * (1.0 + z.norm()) => used[j] = true,
            _ => return false,
        }
    }
    true
}

fn block_spectrum(j: &Matrix5, p: &ModelParams) -> Vec<Complex64> {
    use crate::model::state::{I, M, N, T};
    let mut out = Vec::with_capacity(5);
    out.extend(block_eigenvalues(j[N][N], j[N][T], j[T][N], j[T][T]));
    out.extend(block_eigenvalues(j[I][I], j[I][M], j[M][I], j[M][M]));
    out.push(Complex64::new(-p.theta, 0.0));
    out
}

fn predicts(conds: &[Condition], overall: &str, verdict: Verdict) -> Option<bool> {
    let c = crate::conditions::find(conds, overall)?;
    match verdict {
        Verdict::Inconclusive => None,
        v => Some(c.holds == (v == Verdict::Stable)),
    }
}

/// Full stability classification of one equilibrium.
pub fn classify(eq: &Equilibrium, p: &ModelParams) -> Result<StabilityReport> {
    if !(eq.residual < CLASSIFY_RESIDUAL_LIMIT) {
        return Err(ModelError::Precondition(format!(
            "equilibrium residual {:e} exceeds {CLASSIFY_RESIDUAL_LIMIT:e}",
            eq.residual
        )));
    }
    let x = eq.point;
    let j = jacobian(&x, p)?;
    let cp = char_poly(&j)?;
    let eig = eigenvalues(&j)?;
    let hurwitz = routh_hurwitz(&cp)?;
    let max_real = eig.max_real();
    let verdict = verdict_from_max_real(max_real);

    let repro = if x.t == 0.0 { Some(reproduction_numbers(&x, p)?) } else { None };
    let theorem_checks = theorem_conditions(eq, p)?;
    let derived_checks = derived_conditions(eq, p)?;

    let theta = Complex64::new(-p.theta, 0.0);
    let theta_eigenvalue = eig.roots.iter().any(|z| (z - theta).norm() <= SPECTRUM_MATCH_TOL * (1.0 + p.theta));
    let block = (x.t == 0.0).then(|| spectra_match(&eig.roots, &block_spectrum(&j, p), SPECTRUM_MATCH_TOL));
    let hurwitz_agrees = match (verdict, hurwitz.verdict) {
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => None,
        (a, b) => Some(a == b),
    };
    let overall = overall_condition_name(eq.family);
    let agreement = Agreement {
        hurwitz: hurwitz_agrees,
        theorem: predicts(&theorem_checks, overall, verdict),
        derived: predicts(&derived_checks, "derived", verdict),
        theta_eigenvalue,
        block_spectrum: block,
    };
    Ok(StabilityReport {
        equilibrium: eq.clone(),
        jacobian: j,
        char_coeffs: cp,
        eigenvalues: eig,
        hurwitz,
        verdict,
        max_real,
        repro,
        theorem_checks,
        derived_checks,
        agreement,
    })
}

/// Name of the combined stated condition for each family.
pub fn overall_condition_name(f: Family) -> &'static str {
    match f {
        Family::TumorFree => "theorem3",
        Family::Dead1 => "theorem4",
        Family::Dead2 => "theorem5",
        Family::Coexisting => "theorem6",
    }
}
