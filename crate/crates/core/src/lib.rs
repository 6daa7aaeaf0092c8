//! Curvature operators of stationary Lorentzian metrics and of their
//! Riemannian counterparts, with the Betti-number conclusions that follow
//! from positivity of the symmetric operator.

pub mod curv_op;
pub mod error;
pub mod expr;
pub mod frames;
pub mod harness;
pub mod linalg;
pub mod metric;
pub mod stationary;
pub mod tolerance;
pub mod topology;

pub use error::{Error, ExprError, Result};
