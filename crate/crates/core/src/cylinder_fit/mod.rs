//! Geometric oracle: fits a circular cylinder directly to 3D points by
//! orthogonal-distance least squares, independent of the Frenet machinery.

mod fit;
mod model;

pub use fit::{fit_cylinder, FitConfig, FitResult};
pub use model::{membership_residual, CylinderModel};
