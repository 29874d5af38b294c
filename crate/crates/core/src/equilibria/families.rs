use num_complex::Complex64;

use super::flags::existence_flags;
use super::reduced::{
    dead1_quadratic_coeffs, dead2_c, dead2_cubic_derived_coeffs, dead2_cubic_printed_coeffs, dead2_quartic_coeffs,
    discriminant, drug_level, Dead2Cubic, TRIM_TOL,
};
use super::{sort_and_dedup, Equilibrium, Family, Provenance, Search, SearchOptions, CONFIRM_TOL, SNAP_TOL};
use crate::error::{ModelError, Result};
use crate::model::state::{I, M, N, T};
use crate::model::{jacobian, residual_norm, rhs, ModelParams, SystemState};
use crate::numerics::{newton_solve, poly_roots, Polynomial};

/// Smallest `N` or `T` accepted as a living population.
const MIN_POPULATION: f64 = 1e-8;
/// Imaginary-part tolerance for treating a polynomial root as real.
const REAL_ROOT_TOL: f64 = 1e-8;

/// Newton on the coordinates in `free`, everything else held fixed.
///
/// For indices in `divided`, the equation `rhs_i = 0` is replaced by
/// `rhs_i / x_i = 0`, which removes the trivial root `x_i = 0`.
fn refine(
    p: &ModelParams,
    seed: &SystemState,
    free: &[usize],
    divided: &[usize],
    opts: &SearchOptions,
) -> Result<(SystemState, usize)> {
    let base = seed.to_array();
    let embed = |y: &[f64]| {
        let mut x = base;
        for (k, &i) in free.iter().enumerate() {
            x[i] = y[k];
        }
        SystemState::from_array(x)
    };
    let f = |y: &[f64]| -> Result<Vec<f64>> {
        let x = embed(y);
        let r = rhs(&x, p)?;
        let xa = x.to_array();
        free.iter()
            .map(|&i| {
                if divided.contains(&i) {
                    if xa[i] == 0.0 {
                        return Err(ModelError::SingularDenominator { term: "divided coordinate", value: 0.0 });
                    }
                    Ok(r[i] / xa[i])
                } else {
                    Ok(r[i])
                }
            })
            .collect()
    };
    let jac = |y: &[f64]| -> Result<Vec<Vec<f64>>> {
        let x = embed(y);
        let j = jacobian(&x, p)?;
        let r = rhs(&x, p)?;
        let xa = x.to_array();
        Ok(free
            .iter()
            .map(|&row| {
                free.iter()
                    .map(|&col| {
                        if divided.contains(&row) {
                            let d = j[row][col] / xa[row];
                            if row == col {
                                d - r[row] / (xa[row] * xa[row])
                            } else {
                                d
                            }
                        } else {
                            j[row][col]
                        }
                    })
                    .collect()
            })
            .collect())
    };
    let y0: Vec<f64> = free.iter().map(|&i| base[i]).collect();
    match newton_solve(f, jac, &y0, &opts.newton) {
        Ok(out) => Ok((embed(&out.x), out.iterations)),
        // Close enough for the full-residual check to decide.
        Err(ModelError::NewtonNotConverged { x, residual, iterations }) if residual < CONFIRM_TOL => {
            Ok((embed(&x), iterations))
        }
        Err(e) => Err(e),
    }
}

fn snap(x: SystemState) -> SystemState {
    SystemState::from_array(x.to_array().map(|v| if v < 0.0 && v > -SNAP_TOL { 0.0 } else { v }))
}

/// Snaps, checks sign pattern and residual, and attaches flags.
fn confirm(
    p: &ModelParams,
    family: Family,
    x: SystemState,
    iterations: usize,
    seeded: Provenance,
) -> std::result::Result<Equilibrium, String> {
    let x = snap(x);
    if !x.is_finite() {
        return Err("non-finite point".into());
    }
    if let Some(k) = x.to_array().iter().position(|v| *v < 0.0) {
        return Err(format!("component {} negative ({:e})", crate::model::COMPONENT_NAMES[k], x.to_array()[k]));
    }
    if !family.matches(&x) {
        return Err(format!("left the {family} sign pattern"));
    }
    let residual = residual_norm(&x, p).map_err(|e| e.to_string())?;
    if !(residual < CONFIRM_TOL) {
        return Err(format!("residual {residual:e} above {CONFIRM_TOL:e}"));
    }
    let provenance = if iterations == 0 { seeded } else { Provenance::NewtonRefined };
    Ok(Equilibrium { point: x, family, residual, existence_flags: existence_flags(family, p, &x), provenance })
}

/// `lo·(hi/lo)^(j/(n−1))` for `j = 0..n`, with `lo = hi·10^(−decades)`.
fn log_grid(hi: f64, decades: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n).map(|j| hi * 10f64.powf(-decades * (n - 1 - j) as f64 / (n - 1) as f64)).collect()
}

fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let Ok(poly) = Polynomial::trimmed(coeffs, TRIM_TOL) else { return Vec::new() };
    if poly.degree() == 0 {
        return Vec::new();
    }
    let roots = match poly_roots(&poly) {
        Ok(r) => r.roots,
        Err(ModelError::RootsNotConverged { best, .. }) => best,
        Err(_) => return Vec::new(),
    };
    roots
        .iter()
        .filter(|z: &&Complex64| z.im.abs() <= REAL_ROOT_TOL * (1.0 + z.norm()))
        .map(|z| z.re)
        .filter(|&t| t > lo && t <= hi)
        .collect()
}

/// Sign changes of `h` on an increasing grid, bisected to machine resolution.
/// Points where `h` is undefined break the scan.
fn scan_roots(h: impl Fn(f64) -> Option<f64>, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &t in grid {
        let cur = h(t).filter(|v| v.is_finite()).map(|v| (t, v));
        if let (Some((a, fa)), Some((b, fb))) = (prev, cur) {
            if fa == 0.0 {
                out.push(a);
            } else if fa.signum() != fb.signum() {
                out.push(bisect(&h, a, b, fa));
            }
        }
        prev = cur;
    }
    out
}

fn bisect(h: &impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        match h(mid) {
            Some(fm) if fm == 0.0 => return mid,
            Some(fm) if fm.signum() == fa.signum() => {
                a = mid;
                fa = fm;
            }
            Some(_) => b = mid,
            None => break,
        }
    }
    0.5 * (a + b)
}

/// Admissible `(I, M)` pairs at `T = 0`, from the derived quadratic.
fn immune_drug_pairs(p: &ModelParams, e: f64, diagnostics: &mut Vec<String>) -> Vec<(f64, f64)> {
    let c = dead1_quadratic_coeffs(p, e);
    let Ok(poly) = Polynomial::trimmed(&c, TRIM_TOL) else {
        diagnostics.push("immune quadratic vanishes identically".into());
        return Vec::new();
    };
    if poly.degree() == 2 && discriminant(&c) < 0.0 {
        diagnostics.push(format!("immune quadratic has negative discriminant {:e}", discriminant(&c)));
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in real_roots_in(poly.coeffs(), 0.0, f64::INFINITY) {
        match drug_level(p, i) {
            Some(m) => out.push((i, m)),
            None => diagnostics.push(format!("immune root I = {i:e} lies beyond the drug pole")),
        }
    }
    if out.is_empty() {
        diagnostics.push("no admissible positive immune root".into());
    }
    out
}

pub fn tumor_free(p: &ModelParams) -> Search {
    tumor_free_with(p, &SearchOptions::default())
}

pub fn tumor_free_with(p: &ModelParams, opts: &SearchOptions) -> Search {
    let mut diag = Vec::new();
    let e0 = p.estrogen_star();
    let n0 = (p.a1 - p.l1 * e0 * p.unblocked()) / p.b1;
    if n0 <= 0.0 {
        diag.push(format!("tumor_free: N0 = {n0:e} is not positive"));
        return Search { equilibria: Vec::new(), diagnostics: diag };
    }
    let source = p.l1 * n0 * e0 * p.unblocked();
    if source != 0.0 {
        diag.push(format!("tumor_free: tumor source l1*N0*E0*(1-k) = {source:e} keeps T = 0 from being steady"));
        return Search { equilibria: Vec::new(), diagnostics: diag };
    }
    let seeded = if p.chi == 0.0 && p.p_m == 0.0 { Provenance::ClosedForm } else { Provenance::PolyRoot };
    let mut sub = Vec::new();
    let pairs = immune_drug_pairs(p, e0, &mut sub);
    diag.extend(sub.into_iter().map(|s| format!("tumor_free: {s}")));
    let mut found = Vec::new();
    for (i, m) in pairs {
        let seed = SystemState::new(n0, 0.0, i, e0, m);
        let outcome = refine(p, &seed, &[N, I, M], &[N], opts)
            .map_err(|e| e.to_string())
            .and_then(|(x, it)| confirm(p, Family::TumorFree, x, it, seeded));
        match outcome {
            Ok(eq) => found.push(eq),
            Err(why) => diag.push(format!("tumor_free: seed I = {i:e}: {why}")),
        }
    }
    Search { equilibria: sort_and_dedup(found, opts.dedup_tol), diagnostics: diag }
}

pub fn dead_type1(p: &ModelParams) -> Search {
    dead_type1_with(p, &SearchOptions::default())
}

pub fn dead_type1_with(p: &ModelParams, opts: &SearchOptions) -> Search {
    let mut diag = Vec::new();
    let e = p.estrogen_star();
    let seeded = if p.chi == 0.0 && p.p_m == 0.0 { Provenance::ClosedForm } else { Provenance::PolyRoot };
    let mut sub = Vec::new();
    let pairs = immune_drug_pairs(p, e, &mut sub);
    diag.extend(sub.into_iter().map(|s| format!("dead1: {s}")));
    let mut found = Vec::new();
    for (i, m) in pairs {
        let seed = SystemState::new(0.0, 0.0, i, e, m);
        let outcome = refine(p, &seed, &[I, M], &[], opts)
            .map_err(|e| e.to_string())
            .and_then(|(x, it)| confirm(p, Family::Dead1, x, it, seeded));
        match outcome {
            Ok(eq) => found.push(eq),
            Err(why) => diag.push(format!("dead1: seed I = {i:e}: {why}")),
        }
    }
    Search { equilibria: sort_and_dedup(found, opts.dedup_tol), diagnostics: diag }
}

pub fn dead_type2(p: &ModelParams) -> Search {
    dead_type2_with(p, &SearchOptions::default())
}

pub fn dead_type2_with(p: &ModelParams, opts: &SearchOptions) -> Search {
    let mut diag = Vec::new();
    let e = p.estrogen_star();
    let growth = p.a2 * p.d - p.m_d;
    if growth <= 0.0 {
        diag.push(format!("dead2: net tumor growth a2*d - m_d = {growth:e} is not positive"));
        return Search { equilibria: Vec::new(), diagnostics: diag };
    }
    let t_cap = growth / p.b2;
    let immune = |t: f64| (growth - p.b2 * t) / p.g1;
    let state_at = |t: f64| -> Option<SystemState> {
        let i = immune(t);
        let m = drug_level(p, i)?;
        (i >= 0.0).then(|| SystemState::new(0.0, t, i, e, m))
    };

    let mut seeds = real_roots_in(&dead2_quartic_coeffs(p, e), 0.0, t_cap);
    let fine = log_grid(t_cap, 8.0, opts.scan_points);
    seeds.extend(scan_roots(|t| state_at(t).and_then(|x| rhs(&x, p).ok()).map(|r| r[I]), &fine));
    let grid = log_grid(t_cap, 4.0, opts.log_grid_points);
    for &t in &grid {
        if let Some(x) = state_at(t) {
            let c = dead2_c(p, e, x.m);
            seeds.extend(real_roots_in(&dead2_cubic_printed_coeffs(p, c), 0.0, t_cap));
            seeds.extend(real_roots_in(&dead2_cubic_derived_coeffs(p, c), 0.0, t_cap));
        }
    }
    seeds.extend(grid);

    let mut found = Vec::new();
    let mut misses = Vec::new();
    for t in seeds {
        let Some(seed) = state_at(t) else {
            misses.push(format!("dead2: seed T = {t:e} has no admissible (I, M)"));
            continue;
        };
        let outcome = refine(p, &seed, &[T, I, M], &[T], opts)
            .map_err(|e| e.to_string())
            .and_then(|(x, it)| {
                if x.t < MIN_POPULATION {
                    Err(format!("converged to T = {:e}", x.t))
                } else {
                    confirm(p, Family::Dead2, x, it, Provenance::NewtonRefined)
                }
            });
        match outcome {
            Ok(eq) => found.push(eq),
            Err(why) => misses.push(format!("dead2: seed T = {t:e}: {why}")),
        }
    }
    let equilibria = sort_and_dedup(found, opts.dedup_tol);
    if equilibria.is_empty() {
        diag.extend(misses);
    }
    Search { equilibria, diagnostics: diag }
}

pub(super) fn dead2_cubic_at(p: &ModelParams, x: &SystemState) -> Dead2Cubic {
    let c = dead2_c(p, x.e, x.m);
    let fallback = || Polynomial::new(vec![1.0]).expect("constant polynomial");
    let printed = Polynomial::trimmed(&dead2_cubic_printed_coeffs(p, c), TRIM_TOL).unwrap_or_else(|_| fallback());
    let derived = Polynomial::trimmed(&dead2_cubic_derived_coeffs(p, c), TRIM_TOL).unwrap_or_else(|_| fallback());
    let printed_residual = printed.relative_residual(Complex64::new(x.t, 0.0));
    Dead2Cubic { t: x.t, c, printed, derived, printed_residual }
}

pub fn coexisting(p: &ModelParams) -> Search {
    coexisting_with(p, &SearchOptions::default())
}

pub fn coexisting_with(p: &ModelParams, opts: &SearchOptions) -> Search {
    let mut diag = Vec::new();
    let e = p.estrogen_star();
    let load = p.l1 * e * p.unblocked();
    let growth = p.a2 * p.d - p.m_d;
    let normal = |t: f64| (p.a1 - p.d1 * t / (1.0 + p.epsilon * t) - load) / p.b1;
    let n_max = (p.a1 - load) / p.b1;
    // Any coexisting T solves b2·T² − growth·T − load·N = 0 with N ≤ n_max.
    let t_hi = if n_max > 0.0 {
        (growth + (growth * growth + 4.0 * p.b2 * load * n_max).sqrt()) / (2.0 * p.b2)
    } else {
        0.0
    };
    if !(t_hi > 0.0) {
        diag.push("coexisting: no positive tumor level is compatible with the tumor balance".into());
        return Search { equilibria: Vec::new(), diagnostics: diag };
    }
    let state_at_t = |t: f64| -> Option<SystemState> {
        let n = normal(t);
        if n <= 0.0 {
            return None;
        }
        let i = (growth - p.b2 * t + load * n / t) / p.g1;
        if i <= 0.0 {
            return None;
        }
        let m = drug_level(p, i)?;
        Some(SystemState::new(n, t, i, e, m))
    };

    let mut seeds: Vec<SystemState> = scan_roots(
        |t| state_at_t(t).and_then(|x| rhs(&x, p).ok()).map(|r| r[I]),
        &log_grid(t_hi, 10.0, opts.scan_points),
    )
    .into_iter()
    .filter_map(state_at_t)
    .collect();

    let i_cap = p.a2 * p.d / p.g1;
    for t in log_grid(p.a2 * p.d / p.b2, 4.0, opts.log_grid_points) {
        let n = normal(t);
        if n <= 0.0 {
            continue;
        }
        for i in log_grid(i_cap, 4.0, opts.log_grid_points) {
            if let Some(m) = drug_level(p, i) {
                seeds.push(SystemState::new(n, t, i, e, m));
            }
        }
    }

    let mut found = Vec::new();
    for seed in seeds {
        let outcome = refine(p, &seed, &[N, T, I, M], &[N], opts).map_err(|e| e.to_string()).and_then(|(x, it)| {
            if x.n < MIN_POPULATION || x.t < MIN_POPULATION {
                Err("collapsed onto a boundary".into())
            } else {
                confirm(p, Family::Coexisting, x, it, Provenance::NewtonRefined)
            }
        });
        if let Ok(eq) = outcome {
            found.push(eq);
        }
    }
    let equilibria = sort_and_dedup(found, opts.dedup_tol);
    if equilibria.is_empty() {
        diag.push("coexisting: no seed converged to a positive steady state".into());
    }
    Search { equilibria, diagnostics: diag }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tumor_free_needs_a_vanishing_source() {
        let p = ModelParams::default();
        let s = tumor_free(&p);
        assert!(s.equilibria.is_empty());
        assert!(s.diagnostics[0].contains("tumor source"));

        let p = ModelParams { l1: 0.0, ..Default::default() };
        let s = tumor_free(&p);
        assert_eq!(s.equilibria.len(), 1, "{:?}", s.diagnostics);
        let x = s.equilibria[0].point;
        assert_eq!(x.n, p.a1 / p.b1);
    }

    #[test]
    fn decoupled_immune_drug_is_closed_form() {
        let p = ModelParams { chi: 0.0, p_m: 0.0, l1: 0.0, ..Default::default() };
        let e = p.estrogen_star();
        let i = p.s / (p.m + p.l3 * e * p.unblocked() / (p.g + e));
        let m = p.v_m / p.n_m;
        for s in [tumor_free(&p), dead_type1(&p)] {
            assert_eq!(s.equilibria.len(), 1);
            let x = s.equilibria[0].point;
            assert!((x.i - i).abs() < 1e-14 && (x.m - m).abs() < 1e-14);
        }
    }

    #[test]
    fn full_blockade_tumor_free() {
        let p = ModelParams { k: 1.0, ..Default::default() };
        let s = tumor_free(&p);
        assert_eq!(s.equilibria.len(), 1);
        let x = s.equilibria[0].point;
        assert_eq!(x.e, 0.0);
        assert_eq!(x.n, p.a1 / p.b1);
    }

    #[test]
    fn dead2_satisfies_tumor_balance() {
        let p = ModelParams { d: 1.5, s: 0.1, ..Default::default() };
        let s = dead_type2(&p);
        assert!(!s.equilibria.is_empty(), "{:?}", s.diagnostics);
        for eq in &s.equilibria {
            let x = eq.point;
            assert!((x.i - (p.a2 * p.d - p.b2 * x.t - p.m_d) / p.g1).abs() < 1e-10);
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(2.0, 4.0, 16);
        assert_eq!(g.len(), 16);
        assert!((g[0] - 2e-4).abs() < 1e-18);
        assert_eq!(g[15], 2.0);
    }
}
