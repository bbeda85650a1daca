//! Finite-difference oracle on the deformed contour.
//!
//! Nothing here reads the analytic spectrum except [`matching`].

pub mod dense;
pub mod tridiag;
pub mod operator;
pub mod eigen;
pub mod continuation;
pub mod matching;
