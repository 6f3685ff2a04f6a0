//! Intrinsic cylindricity testing for space curves.
//!
//! A curve that lies on a circular cylinder of radius ρ has a tangent-axis
//! angle α whose squared sine ψ is a root of a degree-8 polynomial in the
//! curvature κ, torsion τ and κ′, and that root must also satisfy a
//! first-order compatibility ODE. This crate estimates (κ, τ) profiles from
//! analytic or sampled curves, runs that test with root tracking and radius
//! search, provides the closed-form special cases (helices, Lancret curves,
//! constant curvature, ellipses, the Viviani curve) and an independent
//! geometric cylinder fit used as an oracle.
//!
//! Everything numerical is generic over [`scalar::Real`]; the aliases below
//! fix the scalar to `f64`.

// `!(x > y)` deliberately treats NaN as failing the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cylinder_fit;
pub mod cylinder_test;
pub mod error;
pub mod frenet;
pub mod io;
pub mod jet;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod special_curves;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::{Real, Ring};

pub type Vector = vec3::Vec3<f64>;
pub type Samples = frenet::CurveSamples<f64>;
pub type Curve = frenet::AnalyticCurve<f64>;
pub type Frame = frenet::FrenetFrame<f64>;
pub type Profile = frenet::InvariantProfile<f64>;
pub type Record = frenet::InvariantRecord<f64>;
pub type Report = cylinder_test::CylindricityReport<f64>;
pub type Polynomial = cylinder_test::PsiPolynomial<f64>;
pub type Cylinder = cylinder_fit::CylinderModel<f64>;
pub type Fit = cylinder_fit::FitResult<f64>;
