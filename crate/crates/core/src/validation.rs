//! Seeded cross-checks between independent computations of the same
//! quantity. Each suite owns a sub-seed, so suites can run in any order
//! and the report depends only on the seed.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::equilibria::find_all;
use crate::error::Result;
use crate::integrator::{estrogen_closed_form, integrate, IntegrationConfig};
use crate::model::{jacobian, rhs, ModelParams, SystemState};
use crate::numerics::{poly_roots, routh_hurwitz, verdict_from_max_real, Matrix5, Polynomial, Verdict, MARGINAL_BAND};
use crate::sampling::{random_params, random_state, rng, Regime};
use crate::stability::classify;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest error measure seen, in the suite's own units.
    pub worst: f64,
    pub limit: f64,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str, limit: f64) -> Self {
        Self { name, cases: 0, failures: 0, worst: 0.0, limit, notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    /// Records one case whose error measure is `err` (NaN counts as a failure).
    fn record(&mut self, err: f64) {
        self.cases += 1;
        if err.is_nan() || err > self.limit {
            self.failures += 1;
        }
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
    }

    fn fail(&mut self, note: String) {
        self.cases += 1;
        self.failures += 1;
        if self.notes.len() < 5 {
            self.notes.push(note);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("validation seed={}\n", self.seed);
        for s in &self.suites {
            out.push_str(&format!(
                "{:<17} {}  cases={} failures={} worst={:.3e} limit={:.0e}\n",
                s.name,
                if s.passed() { "PASS" } else { "FAIL" },
                s.cases,
                s.failures,
                s.worst,
                s.limit
            ));
            for n in &s.notes {
                out.push_str(&format!("    {n}\n"));
            }
        }
        out.push_str(if self.passed() { "overall PASS\n" } else { "overall FAIL\n" });
        out
    }
}

pub type JacobianFn = fn(&SystemState, &ModelParams) -> Result<Matrix5>;

const JACOBIAN_DRAWS: usize = 1000;
const POLY_DRAWS: usize = 1000;
const EQUILIBRIUM_DRAWS: usize = 200;
const SIMULATION_DRAWS: usize = 1000;
const ESTROGEN_DRAWS: usize = 100;

fn sub_seed(seed: u64, suite: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(suite)
}

/// Central differences against `jac`, error `|J − J_fd| / max(1, |J|)` per entry.
pub fn jacobian_fd_suite(seed: u64, jac: JacobianFn) -> SuiteResult {
    let mut s = SuiteResult::new("jacobian_fd", 1e-6);
    let mut r = rng(sub_seed(seed, 1));
    for _ in 0..JACOBIAN_DRAWS {
        let p = random_params(&mut r, Regime::Generic);
        let x = random_state(&mut r, 2.0, 0.1);
        let (Ok(j), Ok(fd)) = (jac(&x, &p), finite_difference_jacobian(&x, &p)) else {
            s.fail(format!("evaluation failed at {x:?}"));
            continue;
        };
        let mut worst: f64 = 0.0;
        for a in 0..5 {
            for b in 0..5 {
                worst = worst.max((j[a][b] - fd[a][b]).abs() / j[a][b].abs().max(1.0));
            }
        }
        s.record(worst);
    }
    s
}

pub fn finite_difference_jacobian(x: &SystemState, p: &ModelParams) -> Result<Matrix5> {
    let base = x.to_array();
    let mut out = [[0.0; 5]; 5];
    for b in 0..5 {
        let h = 1e-5 * base[b].abs().max(1.0);
        let (mut up, mut dn) = (base, base);
        up[b] += h;
        dn[b] -= h;
        let fu = rhs(&SystemState::from_array(up), p)?;
        let fd = rhs(&SystemState::from_array(dn), p)?;
        for a in 0..5 {
            out[a][b] = (fu[a] - fd[a]) / (2.0 * h);
        }
    }
    Ok(out)
}

/// Real roots and conjugate pairs with real parts in `[-3, 3]`.
pub fn random_roots<R: Rng>(r: &mut R, degree: usize) -> Vec<Complex64> {
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let re = r.gen_range(-3.0..3.0);
        if roots.len() + 2 <= degree && r.gen_bool(0.5) {
            let im = r.gen_range(0.05..3.0);
            roots.push(Complex64::new(re, im));
            roots.push(Complex64::new(re, -im));
        } else {
            roots.push(Complex64::new(re, 0.0));
        }
    }
    roots
}

/// Rebuilds the polynomial from its computed roots; error is the coefficient mismatch over the norm.
pub fn vieta_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("vieta", 1e-9);
    let mut r = rng(sub_seed(seed, 2));
    for _ in 0..POLY_DRAWS {
        let degree = r.gen_range(1..=5);
        let scale = r.gen_range(0.5..4.0);
        let poly = Polynomial::from_roots(&random_roots(&mut r, degree));
        let coeffs: Vec<f64> = poly.coeffs().iter().map(|c| c * scale).collect();
        let poly = Polynomial::new(coeffs).expect("nonzero leading coefficient");
        match poly_roots(&poly) {
            Ok(found) => {
                let rebuilt = Polynomial::from_roots(&found.roots);
                let lead = poly.leading();
                let err = poly
                    .coeffs()
                    .iter()
                    .zip(rebuilt.coeffs())
                    .map(|(a, b)| (a - lead * b).abs())
                    .fold(0.0, f64::max)
                    / poly.norm();
                s.record(err);
            }
            Err(e) => s.fail(format!("roots failed: {e}")),
        }
    }
    s
}

/// Hurwitz verdict against the sign of the largest planted real part; the error
/// measure is the number of disagreements outside the marginal band.
pub fn hurwitz_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("hurwitz_vs_roots", 0.0);
    let mut r = rng(sub_seed(seed, 3));
    for _ in 0..POLY_DRAWS {
        let degree = r.gen_range(1..=5);
        let roots = random_roots(&mut r, degree);
        let max_re = roots.iter().fold(f64::NEG_INFINITY, |a, z| a.max(z.re));
        let expected = verdict_from_max_real(max_re);
        if expected == Verdict::Inconclusive {
            continue;
        }
        match routh_hurwitz(&Polynomial::from_roots(&roots)) {
            Ok(h) if h.verdict == expected => s.record(0.0),
            Ok(h) => {
                s.record(1.0);
                if s.notes.len() < 5 {
                    s.notes.push(format!("max Re {max_re:e}: hurwitz says {}", h.verdict));
                }
            }
            Err(e) => s.fail(format!("hurwitz failed: {e}")),
        }
    }
    s
}

fn equilibrium_params(r: &mut crate::sampling::SeededRng, j: usize) -> ModelParams {
    let regime = if j % 4 == 0 { Regime::TumorFreeAdmissible } else { Regime::Generic };
    random_params(r, regime)
}

/// Every confirmed equilibrium: `‖rhs‖∞`, exact `E*`, and at most seven per draw.
pub fn residual_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("residuals", 1e-10);
    let mut r = rng(sub_seed(seed, 4));
    let draws: Vec<ModelParams> = (0..EQUILIBRIUM_DRAWS).map(|j| equilibrium_params(&mut r, j)).collect();
    let catalogs: Vec<_> = draws.par_iter().map(find_all).collect();
    for (p, cat) in draws.iter().zip(catalogs) {
        let cat = match cat {
            Ok(c) => c,
            Err(e) => {
                s.fail(format!("find_all failed: {e}"));
                continue;
            }
        };
        if cat.equilibria.len() > 7 {
            s.fail(format!("{} equilibria for {p:?}", cat.equilibria.len()));
        }
        for eq in &cat.equilibria {
            if eq.point.e != p.estrogen_star() {
                s.fail(format!("E = {:e}, expected {:e}", eq.point.e, p.estrogen_star()));
            }
            let res = rhs(&eq.point, p).map(|f| f.iter().fold(0.0, |a: f64, v| a.max(v.abs())));
            s.record(res.unwrap_or(f64::NAN));
        }
    }
    s
}

/// Simulations over `[0, 100]` from nonnegative starts: the most negative component
/// (as its magnitude), and the logistic bound on `N` after burn-in.
pub fn positivity_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("positivity", 1e-9);
    let mut r = rng(sub_seed(seed, 5));
    let cases: Vec<(ModelParams, SystemState)> = (0..SIMULATION_DRAWS)
        .map(|_| {
            let p = random_params(&mut r, Regime::Generic);
            (p, random_state(&mut r, 3.0, 0.2))
        })
        .collect();
    let outcomes: Vec<_> = cases.par_iter().map(|(p, x0)| positivity_case(p, x0)).collect();
    for o in outcomes {
        match o {
            Ok((neg, excess)) => {
                s.record(neg);
                if excess > 1e-6 {
                    s.fail(format!("N exceeds a1/b1 by a relative {excess:e} after burn-in"));
                }
            }
            Err(e) => s.fail(format!("integration failed: {e}")),
        }
    }
    s
}

/// Returns the most negative value seen (as a magnitude) and the largest relative
/// excess of `N` over `a1/b1` after `20/a1`.
pub fn positivity_case(p: &ModelParams, x0: &SystemState) -> Result<(f64, f64)> {
    let cfg = IntegrationConfig::new(0.0, 100.0).with_samples(1001).with_tolerances(1e-10, 1e-12);
    let traj = integrate(x0, p, &cfg)?;
    let floor = traj
        .states
        .iter()
        .flat_map(|x| x.to_array())
        .chain(traj.positivity_violations)
        .fold(0.0, f64::min);
    let cap = p.a1 / p.b1;
    let burn_in = 20.0 / p.a1;
    let excess = traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(t, _)| **t >= burn_in)
        .map(|(_, x)| (x.n - cap) / cap)
        .fold(0.0, f64::max);
    Ok((-floor, excess))
}

/// Spectrum structure at every equilibrium: `−θ` present, block union at `T = 0`,
/// and Hurwitz agreeing with the eigenvalues away from the marginal band.
pub fn block_spectrum_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("block_spectrum", 0.0);
    let mut r = rng(sub_seed(seed, 6));
    let draws: Vec<ModelParams> = (0..EQUILIBRIUM_DRAWS).map(|j| equilibrium_params(&mut r, j)).collect();
    let per_draw: Vec<Vec<std::result::Result<(), String>>> = draws
        .par_iter()
        .map(|p| {
            let cat = match find_all(p) {
                Ok(c) => c,
                Err(e) => return vec![Err(format!("find_all failed: {e}"))],
            };
            cat.equilibria
                .iter()
                .map(|eq| {
                    let rep = classify(eq, p).map_err(|e| format!("classify failed: {e}"))?;
                    let a = rep.agreement;
                    if !a.theta_eigenvalue {
                        return Err(format!("{}: -theta missing", eq.family));
                    }
                    if a.block_spectrum == Some(false) {
                        return Err(format!("{}: spectrum differs from block union", eq.family));
                    }
                    if rep.max_real.abs() > MARGINAL_BAND && a.hurwitz != Some(true) {
                        return Err(format!("{}: hurwitz {} vs eigenvalues {}", eq.family, rep.hurwitz.verdict, rep.verdict));
                    }
                    Ok(())
                })
                .collect()
        })
        .collect();
    for outcome in per_draw.into_iter().flatten() {
        match outcome {
            Ok(()) => s.record(0.0),
            Err(n) => s.fail(n),
        }
    }
    s
}

/// Integrated `E(t)` against its closed form at 50 sample times.
pub fn estrogen_suite(seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("e_closed_form", 1e-6);
    let mut r = rng(sub_seed(seed, 7));
    for _ in 0..ESTROGEN_DRAWS {
        let p = random_params(&mut r, Regime::Generic);
        let x0 = random_state(&mut r, 3.0, 0.1);
        let t_end = r.gen_range(5.0..50.0);
        let cfg = IntegrationConfig::new(0.0, t_end).with_samples(50).with_tolerances(1e-10, 1e-12);
        match integrate(&x0, &p, &cfg) {
            Ok(traj) => {
                let worst = traj
                    .times
                    .iter()
                    .zip(&traj.states)
                    .map(|(&t, x)| {
                        let exact = estrogen_closed_form(x0.e, &p, t, 0.0);
                        (x.e - exact).abs() / exact.abs().max(f64::MIN_POSITIVE)
                    })
                    .fold(0.0, f64::max);
                s.record(worst);
            }
            Err(e) => s.fail(format!("integration failed: {e}")),
        }
    }
    s
}

/// All suites, with the model Jacobian.
pub fn run_validation(seed: u64) -> ValidationReport {
    run_validation_with(seed, jacobian)
}

/// All suites, with `jac` standing in for the model Jacobian.
pub fn run_validation_with(seed: u64, jac: JacobianFn) -> ValidationReport {
    let suites = vec![
        jacobian_fd_suite(seed, jac),
        vieta_suite(seed),
        hurwitz_suite(seed),
        residual_suite(seed),
        positivity_suite(seed),
        block_spectrum_suite(seed),
        estrogen_suite(seed),
    ];
    ValidationReport { seed, suites }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flipped(x: &SystemState, p: &ModelParams) -> Result<Matrix5> {
        let mut j = jacobian(x, p)?;
        j[1][0] = -j[1][0];
        Ok(j)
    }

    #[test]
    fn fd_suite_catches_a_sign_flip() {
        assert!(jacobian_fd_suite(0, jacobian).passed());
        let bad = jacobian_fd_suite(0, flipped);
        assert!(!bad.passed());
    }

    #[test]
    fn polynomial_suites_pass() {
        let v = vieta_suite(0);
        assert!(v.passed(), "{v:?}");
        let h = hurwitz_suite(0);
        assert!(h.passed(), "{h:?}");
    }
}
