//! Closed-form families and laws: circular helices, Lancret curves,
//! constant-curvature curves, ellipses and the Viviani curve.

mod constant;
mod ellipse;
mod generate;
mod helix;
mod viviani;

pub use constant::{
    const_curvature_torsion_exact, const_curvature_torsion_exact_jet,
    const_curvature_torsion_integral, const_curvature_torsion_ode_residual,
    const_curvature_torsion_ode_residual_any, constant_from_initial, exact_x,
    ConstantCurvatureSpec,
};
pub use ellipse::{ellipse_curvature_extremes, ellipse_cylinder_law, ellipse_psi, EllipseLaw};
pub use generate::{constcurv_samples, ellipse_samples, helix_samples, viviani_samples};
pub use helix::{helix_radius, lancret_polynomial, lancret_ratio, lancret_residuals, HelixSpec};
pub use viviani::{
    viviani_closed_forms, viviani_profile, viviani_simplified_ode_residual, VivianiForms,
    VivianiSpec,
};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// One of the two signs a `±` in a formula can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of<T: Real>(x: T) -> Self {
        if x < T::zero() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(format!("expected + or -, got {other:?}")),
        }
    }
}
