//! Closed-form bound states.
//!
//! Eckart, in `r`:
//! `psi = sinh(r)^(-delta) exp(i beta r/delta) P_N^(2u, 2v)(coth r)`.
//!
//! Natanzon, in `xi`:
//! `psi = exp(-i delta xi) [1 - exp(-2 i xi)]^(1/4) B^(i beta/delta) P_N^(2u, 2v)(y)`
//! with `B = sqrt(exp(2 i xi) - 1) - exp(i xi)` and `y = sqrt(1 - exp(-2 i xi))`.
//! The square roots take the sheet continuous with `t = 0`, where
//! `sqrt(exp(2 i xi) - 1) = -i sqrt(1 - exp(2 i xi))` and `y = coth r`.

use core::f64::consts::FRAC_PI_2;

use crate::cmath::{c, log_cosh_strip, log_sinh_lower, nearest_sheet, nearest_sign, I, SINGULAR_TOL};
use crate::contour::{bracket, r_derivatives, r_of_complex_t, ContourGrid, EpsilonProfile};
use crate::potentials::{EckartParams, Model, NatanzonParams};
use crate::spectrum::{doublet, eckart_energy, Branch};
use crate::{Error, Result, C64};

use super::jacobi::{jacobi_derivative, jacobi_poly, JacobiConvention};
use super::uv::derive_uv;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Eckart { params: EckartParams, n: u32, convention: JacobiConvention },
    Natanzon { params: NatanzonParams, n: u32, branch: Branch, delta: f64, convention: JacobiConvention },
}

impl StateSpec {
    pub fn eckart(params: EckartParams, n: u32) -> Result<Self> {
        let delta = params.a - f64::from(n) - 1.0;
        if !(delta > 0.0) {
            return Err(Error::InadmissibleN { n, delta });
        }
        Ok(StateSpec::Eckart { params, n, convention: JacobiConvention::Standard })
    }

    /// The member `branch` of the level `N`; `delta` comes from the cubic.
    pub fn natanzon(params: NatanzonParams, n: u32, branch: Branch) -> Result<Self> {
        let delta = doublet(n, params.beta, params.c).delta(branch).ok_or(Error::NoSuchState(n))?;
        Ok(StateSpec::Natanzon { params, n, branch, delta, convention: JacobiConvention::Standard })
    }

    pub fn with_convention(self, conv: JacobiConvention) -> Self {
        match self {
            StateSpec::Eckart { params, n, .. } => StateSpec::Eckart { params, n, convention: conv },
            StateSpec::Natanzon { params, n, branch, delta, .. } => {
                StateSpec::Natanzon { params, n, branch, delta, convention: conv }
            }
        }
    }

    /// The Eckart partner `A = delta + N + 1` of a Natanzon state (identity for Eckart states).
    pub fn eckart_partner(&self) -> Result<Self> {
        match *self {
            StateSpec::Eckart { .. } => Ok(*self),
            StateSpec::Natanzon { params, n, delta, convention, .. } => {
                let p = EckartParams::new(delta + f64::from(n) + 1.0, params.beta)?;
                Ok(StateSpec::Eckart { params: p, n, convention })
            }
        }
    }

    pub fn n(&self) -> u32 {
        match self {
            StateSpec::Eckart { n, .. } | StateSpec::Natanzon { n, .. } => *n,
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            StateSpec::Eckart { params, n, .. } => params.a - f64::from(*n) - 1.0,
            StateSpec::Natanzon { delta, .. } => *delta,
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            StateSpec::Eckart { params, .. } => params.beta,
            StateSpec::Natanzon { params, .. } => params.beta,
        }
    }

    pub fn branch(&self) -> Option<Branch> {
        match self {
            StateSpec::Eckart { .. } => None,
            StateSpec::Natanzon { branch, .. } => Some(*branch),
        }
    }

    /// `E^(E) = -delta^2 + beta^2/delta^2`, or `E^(D) = -E^(E)`.
    pub fn energy(&self) -> f64 {
        let e = eckart_energy(self.delta(), self.beta());
        match self {
            StateSpec::Eckart { .. } => e,
            StateSpec::Natanzon { .. } => -e,
        }
    }

    pub fn model(&self) -> Model {
        match self {
            StateSpec::Eckart { params, .. } => Model::Eckart(*params),
            StateSpec::Natanzon { params, .. } => Model::Natanzon(*params),
        }
    }

    fn convention(&self) -> JacobiConvention {
        match self {
            StateSpec::Eckart { convention, .. } | StateSpec::Natanzon { convention, .. } => *convention,
        }
    }

    pub fn jacobi_parameters(&self) -> (C64, C64) {
        let uv = derive_uv(self.n(), self.delta(), self.beta()).expect("delta is positive by construction");
        self.convention().parameters(uv.u, uv.v)
    }

    fn log_jacobi(&self, y: C64) -> Result<(C64, C64)> {
        let (al, be) = self.jacobi_parameters();
        let p = jacobi_poly(self.n(), al, be, y);
        if p.norm() == 0.0 {
            return Err(Error::SingularPoint(y));
        }
        Ok((p.ln(), jacobi_derivative(self.n(), al, be, y) / p))
    }

    /// `(log psi, d log psi / dr)` of the analytic continuation to `r`.
    ///
    /// Natanzon states are written as functions of `r` through `xi(r)`.
    pub fn log_psi_r(&self, r: C64) -> Result<(C64, C64)> {
        let sh = r.sinh();
        let ch = r.cosh();
        if sh.norm() < SINGULAR_TOL || ch.norm() < SINGULAR_TOL {
            return Err(Error::SingularPoint(r));
        }
        let delta = self.delta();
        let k = self.beta() / delta;
        let y = ch / sh;
        let (log_p, dlog_p) = self.log_jacobi(y)?;
        let ls = log_sinh_lower(r);
        let dp = -dlog_p / (sh * sh);
        match self {
            StateSpec::Eckart { .. } => {
                let log = -delta * ls + I * k * r + log_p;
                Ok((log, -delta * y + I * k + dp))
            }
            StateSpec::Natanzon { .. } => {
                let xi = FRAC_PI_2 - I * ls;
                let log_y = log_cosh_strip(r) - ls;
                let log = -I * delta * xi + 0.5 * log_y + I * k * (r - I * FRAC_PI_2) + log_p;
                Ok((log, -delta * y - 0.5 / (sh * ch) + I * k + dp))
            }
        }
    }

    /// `(log psi, d log psi / dt)` at complex `t`.
    pub fn log_psi_t(&self, t: C64, profile: &EpsilonProfile) -> Result<(C64, C64)> {
        let r = r_of_complex_t(t, profile);
        let (log, dlog) = self.log_psi_r(r)?;
        Ok((log, dlog * r_derivatives(t, profile).0))
    }

    /// Natanzon state evaluated from `xi` alone, branches taken from the nearest grid point.
    pub fn log_psi_xi(&self, xi: C64, grid: &ContourGrid) -> Result<C64> {
        let StateSpec::Natanzon { params, delta, .. } = *self else {
            return Err(Error::InvalidParameters("xi-form exists only for Natanzon states"));
        };
        let anchor = grid.anchor_for(xi)?;
        let e = (I * xi).exp();
        let w = 1.0 - e * e;
        if w.norm() < SINGULAR_TOL {
            return Err(Error::SingularPoint(xi));
        }
        let s1 = nearest_sign(w.sqrt(), anchor.branches.sqrt_one_minus_q);
        let y = I * s1 / e;
        let log_y = nearest_sheet(y.ln(), anchor.branches.log_coth);
        let log_b = nearest_sheet(bracket(-I * s1, e).ln(), anchor.branches.log_bracket);
        let (log_p, _) = self.log_jacobi(y)?;
        let k = params.beta / delta;
        Ok(-I * delta * xi + 0.5 * log_y + I * k * log_b + log_p)
    }
}

/// Unnormalized Eckart state at `r`.
pub fn psi_eckart(r: C64, p: &EckartParams, n: u32) -> Result<C64> {
    Ok(StateSpec::eckart(*p, n)?.log_psi_r(r)?.0.exp())
}

/// Unnormalized Natanzon state at `xi`, on or next to `grid`.
pub fn psi_natanzon(xi: C64, n: u32, branch: Branch, p: &NatanzonParams, grid: &ContourGrid) -> Result<C64> {
    Ok(StateSpec::natanzon(*p, n, branch)?.log_psi_xi(xi, grid)?.exp())
}

/// `log sqrt(xi'(r))` on the sheet that is positive at `r = -i eps`.
pub fn log_sqrt_dxi_dr(r: C64) -> C64 {
    0.5 * (c(0.0, -FRAC_PI_2) + log_cosh_strip(r) - log_sinh_lower(r))
}
