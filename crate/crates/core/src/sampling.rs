//! Seeded draws of parameter sets and states for property suites and benches.
//!
//! Magnitudes are O(1). Drug production stays below drug turnover
//! (`chi < n_M`) and immunotherapy activation below immune death
//! (`p_M < m`), which keeps trajectories bounded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ModelParams, SystemState};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every mechanism active, `k ∈ [0, 1)`.
    Generic,
    /// The tumor source `l1·N·E·(1−k)` vanishes (either `l1 = 0` or `k = 1`),
    /// so a tumor-free equilibrium can exist.
    TumorFreeAdmissible,
}

pub fn random_params<R: Rng>(rng: &mut R, regime: Regime) -> ModelParams {
    let mut u = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    let m = u(0.1, 0.5);
    let n_m = u(0.2, 1.0);
    let mut p = ModelParams {
        a1: u(0.2, 1.0),
        b1: u(0.2, 1.0),
        d1: u(0.05, 0.5),
        epsilon: u(0.0, 1.0),
        l1: u(0.01, 0.2),
        k: u(0.0, 0.95),
        a2: u(0.2, 1.0),
        d: u(0.3, 1.5),
        b2: u(0.2, 1.0),
        g1: u(0.2, 1.5),
        m_d: u(0.01, 0.3),
        s: u(0.05, 0.5),
        r: u(0.01, 0.3),
        o: u(0.1, 1.0),
        g2: u(0.05, 0.5),
        m,
        l3: u(0.01, 0.3),
        g: u(0.1, 1.0),
        p_m: u(0.01, 0.9) * m,
        j_m: u(0.1, 1.0),
        p: u(0.1, 1.0),
        theta: u(0.2, 1.5),
        v_m: u(0.01, 0.3),
        n_m,
        chi: u(0.0, 0.9) * n_m,
        xi: u(0.1, 1.0),
    };
    if regime == Regime::TumorFreeAdmissible {
        if rng.gen_bool(0.5) {
            p.l1 = 0.0;
        } else {
            p.k = 1.0;
        }
    }
    p
}

/// Componentwise uniform on `[0, scale)`, with each component zeroed with probability `p_zero`.
pub fn random_state<R: Rng>(rng: &mut R, scale: f64, p_zero: f64) -> SystemState {
    let x: [f64; 5] = std::array::from_fn(|_| {
        if p_zero > 0.0 && rng.gen_bool(p_zero) {
            0.0
        } else {
            rng.gen_range(0.0..scale)
        }
    });
    SystemState::from_array(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_valid_and_reproducible() {
        let mut a = rng(11);
        let mut b = rng(11);
        for _ in 0..200 {
            let pa = random_params(&mut a, Regime::Generic);
            let pb = random_params(&mut b, Regime::Generic);
            assert_eq!(pa, pb);
            assert!(pa.validate().is_empty(), "{:?}", pa.validate());
            assert!(pa.chi < pa.n_m && pa.p_m < pa.m);
        }
    }

    #[test]
    fn tumor_free_regime_kills_the_source() {
        let mut r = rng(3);
        for _ in 0..50 {
            let p = random_params(&mut r, Regime::TumorFreeAdmissible);
            assert!(p.l1 == 0.0 || p.k == 1.0);
            assert!(p.validate().is_empty());
        }
    }
}
