//! Exact solution and numerical cross-checks of a PT-symmetric Natanzon-class
//! model obtained from the complexified Eckart potential by the change of
//! variables `sinh r = -i exp(i xi)`.
//!
//! The crate is `no_std` (it needs `alloc`). Modules:
//!
//! - [`contour`]: the shifted line `r(t) = t - i eps(t)` and its arch-shaped
//!   image `xi(t) = Omega(t) - i Z(t)`.
//! - [`potentials`]: Eckart and Natanzon potentials and the Liouville identity
//!   linking them.
//! - [`spectrum`]: Eckart levels, the cubic constraint for `delta`, doublets.
//! - [`wavefn`]: closed-form wavefunctions, residuals, decay, node counts.
//! - [`numeric`]: finite-difference operators and eigensolvers that never see
//!   the analytic spectrum.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod cmath;
mod error;

pub mod contour;
pub mod numeric;
pub mod potentials;
pub mod spectrum;
pub mod wavefn;

pub use cmath::C64;
pub use error::{Error, Result};
