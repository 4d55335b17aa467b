//! Computational backbone for short-time heat-kernel asymptotics on
//! equiregular sub-Riemannian manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`free_lie`]: truncated tensor algebra, Lyndon/Hall basis of the free
//!   nilpotent Lie algebra, exp/log, BCH product, dilations and projections.
//! * [`signature`]: Chen signatures and log-signatures of piecewise-linear
//!   paths, Lévy areas.
//! * [`vf_analyzer`]: polynomial vector fields, brackets, the Hörmander
//!   filtration, the `B_H`/`Γ` matrices and the deterministic Taylor maps.
//! * [`steptwo`]: step-two nilpotent groups and their closed-form heat kernels.
//! * [`leading`]: leading heat-kernel constants and the decay quadrature.
//! * [`mc_engine`]: Monte Carlo cross-validation (Brownian lifts, KDE).
//!
//! The algebraic layers are generic over [`Scalar`], so the same code runs in
//! `f32`, `f64` or exact [`BigRational`] arithmetic. The numerical layers
//! (rank decisions, spectral calculus, quadrature, simulation) work in `f64`.
//! Concrete `f64` aliases are exported at the crate root.

pub mod error;
pub mod free_lie;
pub mod leading;
pub(crate) mod linalg;
pub mod mc_engine;
pub mod scalar;
pub mod signature;
pub mod steptwo;
pub mod vf_analyzer;

pub use error::{Error, Result};
pub use num_rational::BigRational;
pub use scalar::Scalar;

pub use free_lie::{BracketExpansion, HallBasis, HallElement, Word};

/// Truncated tensor polynomial with `f64` coefficients.
pub type Tensor = free_lie::TruncatedTensor<f64>;
/// Grouplike tensor (scalar part one) with `f64` coefficients.
pub type Grouplike = free_lie::GrouplikeTensor<f64>;
/// Element of the free nilpotent Lie algebra in Hall coordinates, `f64`.
pub type Lie = free_lie::LieElement<f64>;
/// Exact-arithmetic Lie element.
pub type LieExact = free_lie::LieElement<BigRational>;
/// Exact-arithmetic tensor.
pub type TensorExact = free_lie::TruncatedTensor<BigRational>;
/// Piecewise-linear path in `f64`.
pub type Path = signature::PiecewiseLinearPath<f64>;
/// Polynomial with `f64` coefficients.
pub type Poly = vf_analyzer::Polynomial<f64>;
/// Polynomial vector field with `f64` coefficients.
pub type VectorField = vf_analyzer::PolyVectorField<f64>;
/// Frame of polynomial vector fields with `f64` coefficients.
pub type Frame = vf_analyzer::Frame<f64>;
