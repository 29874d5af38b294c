//! Small dense numerics: polynomial roots, characteristic polynomials,
//! eigenvalues, Routh–Hurwitz, and damped Newton.

mod hurwitz;
mod matrix;
mod newton;
mod poly;
mod roots;

pub use hurwitz::{hurwitz_matrix, routh_hurwitz, HurwitzVerdict, Verdict, MINOR_TOL};
pub use matrix::{char_poly, det, eigenvalues, solve, trace, Matrix5};
pub use newton::{newton_solve, NewtonOptions, NewtonOutcome};
pub use poly::{Polynomial, MAX_DEGREE};
pub use roots::{poly_roots, RootSet, MAX_ROOT_ITERATIONS, ROOT_TOL};

/// Real parts within this distance of zero are treated as marginal.
pub const MARGINAL_BAND: f64 = 1e-9;

/// Sign classification of a spectrum by its largest real part.
pub fn verdict_from_max_real(max_re: f64) -> Verdict {
    if max_re < -MARGINAL_BAND {
        Verdict::Stable
    } else if max_re > MARGINAL_BAND {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive
    }
}
