//! The intrinsic cylinder test.
//!
//! For a trial radius ρ, every record yields a degree-8 polynomial whose
//! admissible real roots are the candidate values of ψ = sin²α. Roots are
//! tracked along arc length, differentiated along their tracks and checked
//! against the first-order radius identity and the second-order axis
//! equation. A curve on a cylinder of radius ρ makes both vanish on one
//! track; the report records the best root per record.

mod polynomial;
mod residual;
mod roots;
mod search;
mod spherical;
mod track;

pub use polynomial::{coefficients, direct_eval, ds_eval, PsiPolynomial, DEGREE};
pub use residual::{
    axis_cleared, axis_residual, combined_residual, psi_prime_branches, psi_second_derivative,
    q_cleared, q_residual, Local, VANISHING_REL,
};
pub use roots::{
    all_roots, all_roots_with, isolate_psi_roots, PsiRoot, PsiRootSet, TANGENTIAL_REL,
};
pub use search::{search_radius, RadiusSearch};
pub use spherical::{spherical_check, SphericalCheck, SPHERE_TOL, TAU_FLOOR_REL};
pub use track::{track_psi, CylindricityReport, RecordResult, TestConfig, TrackBreak, Verdict};

use crate::scalar::Real;

/// Convenience constructor matching the record-level signature.
pub fn psi_polynomial<T: Real>(rho: T, kappa: T, kappa1: T, tau: T) -> PsiPolynomial<T> {
    PsiPolynomial::new(rho, kappa, kappa1, tau)
}
