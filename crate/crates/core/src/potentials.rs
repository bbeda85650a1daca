//! Eckart and Natanzon potentials and the Liouville identity between them.
//!
//! With `E^(E) = -delta^2 + beta^2/delta^2` and `E^(D) = delta^2 - beta^2/delta^2`
//! the two problems are linked by
//!
//! ```text
//! V^(E) - E^(E) = xi'^2 [V^(D)(xi) - E^(D)] + (3/4)(xi''/xi')^2 - (1/2) xi'''/xi'
//! ```
//!
//! where `xi' = -i coth r`.

use crate::cmath::{c, I, SINGULAR_TOL};
use crate::contour::{r_derivatives, xi_derivatives, xi_of_r, xi_t_derivatives, ContourGrid, EpsilonProfile};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EckartParams {
    pub a: f64,
    pub beta: f64,
}

impl EckartParams {
    /// `beta = 0` is accepted as the Hermitian limit.
    pub fn new(a: f64, beta: f64) -> Result<Self> {
        if !a.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameters("A and beta must be finite"));
        }
        if beta < 0.0 {
            return Err(Error::InvalidParameters("beta must be non-negative"));
        }
        if a <= 1.0 {
            return Err(Error::NoBoundStates(a));
        }
        Ok(Self { a, beta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NatanzonParams {
    pub beta: f64,
    pub c: f64,
}

impl NatanzonParams {
    /// `beta = 0` is accepted as the Hermitian limit.
    pub fn new(beta: f64, c: f64) -> Result<Self> {
        if !beta.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParameters("beta and C must be finite"));
        }
        if beta < 0.0 {
            return Err(Error::InvalidParameters("beta must be non-negative"));
        }
        Ok(Self { beta, c })
    }
}

/// `A(A-1)/sinh^2 r - 2 i beta coth r`.
pub fn v_eckart(r: C64, p: &EckartParams) -> Result<C64> {
    let s = r.sinh();
    if s.norm() < SINGULAR_TOL {
        return Err(Error::SingularPoint(r));
    }
    Ok(p.a * (p.a - 1.0) / (s * s) - 2.0 * I * p.beta * r.cosh() / s)
}

/// Which `beta` term to use when writing `V^(D)` in terms of `q = exp(2 i xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HulthForm {
    /// `2 beta exp(i xi) / sqrt(1 - q)`, the image of `2 i beta tanh r`.
    #[default]
    Consistent,
    /// `2 i beta q / sqrt(1 - q)`. Fails the cross-representation check.
    SquaredPhase,
}

/// `V^(D)(xi) = (3/4)/(1-q)^2 - C/(1-q) + beta term`, `q = exp(2 i xi)`.
///
/// The sign of `sqrt(1 - q)` is taken from the nearest point of `grid`.
pub fn v_natanzon(xi: C64, p: &NatanzonParams, grid: &ContourGrid) -> Result<C64> {
    v_natanzon_form(xi, p, grid, HulthForm::Consistent)
}

pub fn v_natanzon_form(xi: C64, p: &NatanzonParams, grid: &ContourGrid, form: HulthForm) -> Result<C64> {
    let e = (I * xi).exp();
    let q = e * e;
    let w = 1.0 - q;
    if w.norm() < SINGULAR_TOL {
        return Err(Error::SingularPoint(xi));
    }
    let anchor = grid.anchor_for(xi)?;
    let root = w.sqrt();
    let root = if (root - anchor.branches.sqrt_one_minus_q).norm_sqr()
        <= (root + anchor.branches.sqrt_one_minus_q).norm_sqr()
    {
        root
    } else {
        -root
    };
    let beta_term = match form {
        HulthForm::Consistent => 2.0 * p.beta * e / root,
        HulthForm::SquaredPhase => 2.0 * I * p.beta * q / root,
    };
    Ok(0.75 / (w * w) - p.c / w + beta_term)
}

/// `V^(D)` written in `r`: `3/(4 cosh^4 r) - C/cosh^2 r + 2 i beta tanh r`.
pub fn v_natanzon_in_r(r: C64, p: &NatanzonParams) -> Result<C64> {
    let ch = r.cosh();
    if ch.norm() < SINGULAR_TOL {
        return Err(Error::SingularPoint(r));
    }
    let s2 = 1.0 / (ch * ch);
    Ok(0.75 * s2 * s2 - p.c * s2 + 2.0 * I * p.beta * r.sinh() / ch)
}

/// `V^(D) - E^(D)` in `r` for a state with quantum number `N` and root `delta`.
pub fn v_d_in_r(r: C64, n: u32, delta: f64, beta: f64) -> Result<C64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidDelta(delta));
    }
    let ch = r.cosh();
    if ch.norm() < SINGULAR_TOL {
        return Err(Error::SingularPoint(r));
    }
    let nf = f64::from(n);
    let b2 = beta * beta / (delta * delta);
    let s2 = 1.0 / (ch * ch);
    let bracket = nf * (nf + 1.0) + (2.0 * nf + 1.0) * delta + 1.0 + b2;
    Ok(0.75 * s2 * s2 - bracket * s2 + c(b2 - delta * delta, 0.0) + 2.0 * I * beta * r.sinh() / ch)
}

/// Left side minus right side of the Liouville identity at `r`.
pub fn liouville_residual(
    r: C64,
    e_e: C64,
    e_d: C64,
    p_e: &EckartParams,
    p_n: &NatanzonParams,
    grid: &ContourGrid,
) -> Result<C64> {
    let lhs = v_eckart(r, p_e)? - e_e;
    let xi = xi_of_r(r)?;
    let vd = v_natanzon(xi, p_n, grid)?;
    let (d1, d2, d3) = xi_derivatives(r)?;
    let ratio = d2 / d1;
    let rhs = d1 * d1 * (vd - e_d) + 0.75 * ratio * ratio - 0.5 * d3 / d1;
    Ok(lhs - rhs)
}

/// `|liouville_residual| / max(|V^(E) - E^(E)|, 1)`.
pub fn liouville_relative_residual(
    r: C64,
    e_e: C64,
    e_d: C64,
    p_e: &EckartParams,
    p_n: &NatanzonParams,
    grid: &ContourGrid,
) -> Result<f64> {
    let res = liouville_residual(r, e_e, e_d, p_e, p_n, grid)?;
    let scale = (v_eckart(r, p_e)? - e_e).norm().max(1.0);
    Ok(res.norm() / scale)
}

/// Largest relative Liouville residual over all points of `grid`.
pub fn max_liouville_residual(
    e_e: C64,
    e_d: C64,
    p_e: &EckartParams,
    p_n: &NatanzonParams,
    grid: &ContourGrid,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in grid.points() {
        worst = worst.max(liouville_relative_residual(p.r, e_e, e_d, p_e, p_n, grid)?);
    }
    Ok(worst)
}

/// A potential together with the coordinate its Schrodinger equation is written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Equation in `r`.
    Eckart(EckartParams),
    /// Equation in `xi`.
    Natanzon(NatanzonParams),
}

impl Model {
    /// Potential at a grid point; the Natanzon side is evaluated in `xi`.
    pub fn value_on_grid(&self, grid: &ContourGrid, k: usize) -> Result<C64> {
        let p = &grid.points()[k];
        match self {
            Model::Eckart(e) => v_eckart(p.r, e),
            Model::Natanzon(n) => v_natanzon(p.xi, n, grid),
        }
    }

    /// Potential at an arbitrary `r`, the Natanzon side written in `r`.
    pub fn value_at_r(&self, r: C64) -> Result<C64> {
        match self {
            Model::Eckart(e) => v_eckart(r, e),
            Model::Natanzon(n) => v_natanzon_in_r(r, n),
        }
    }

    /// First and second `t`-derivatives of the model's coordinate along the contour.
    pub fn metric(&self, t: C64, profile: &EpsilonProfile) -> Result<(C64, C64)> {
        match self {
            Model::Eckart(_) => Ok(r_derivatives(t, profile)),
            Model::Natanzon(_) => xi_t_derivatives(t, profile),
        }
    }
}
