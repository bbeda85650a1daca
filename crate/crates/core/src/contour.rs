//! Complex integration paths.
//!
//! The `r`-contour is the real line pushed down by `eps(t)`:
//! `r(t) = t - i eps(t)`. Under `sinh r = -i exp(i xi)` it maps onto an
//! arch `xi(t) = Omega(t) - i Z(t)` whose top sits at `Z(0) = ln sin eps(0)`
//! and whose legs run down to `Omega = +-(pi/2 - eps(+-inf))`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, LN_2, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::{
    c, coth, distance_to_pi_lattice, log_cosh_strip, log_sinh_lower, unwrap_logs,
    unwrap_roots, I, SINGULAR_TOL,
};
use crate::{Error, Result, C64};

/// Default minimum distance between the contour and the singular set.
pub const DEFAULT_SAFETY_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `eps(t) = eps0`.
    Constant,
    /// `eps(t) = eps0 / cosh t`, which vanishes at both ends.
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonProfile {
    kind: ProfileKind,
    eps0: f64,
}

impl EpsilonProfile {
    pub fn new(kind: ProfileKind, eps0: f64) -> Result<Self> {
        if !eps0.is_finite() || eps0 <= 0.0 {
            return Err(Error::InvalidProfile("eps0 must be positive"));
        }
        if eps0 >= FRAC_PI_2 {
            return Err(Error::InvalidProfile("eps0 must stay below pi/2"));
        }
        Ok(Self { kind, eps0 })
    }

    pub fn constant(eps0: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant, eps0)
    }

    pub fn decaying(eps0: f64) -> Result<Self> {
        Self::new(ProfileKind::Decaying, eps0)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn eps(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Constant => self.eps0,
            ProfileKind::Decaying => self.eps0 / t.cosh(),
        }
    }

    /// Analytic continuation of `eps` to complex `t`.
    pub fn eps_complex(&self, t: C64) -> C64 {
        match self.kind {
            ProfileKind::Constant => c(self.eps0, 0.0),
            ProfileKind::Decaying => self.eps0 / t.cosh(),
        }
    }

    fn eps_derivatives(&self, t: C64) -> (C64, C64) {
        match self.kind {
            ProfileKind::Constant => (C64::default(), C64::default()),
            ProfileKind::Decaying => {
                let sech = 1.0 / t.cosh();
                let tanh = t.tanh();
                let d1 = -self.eps0 * sech * tanh;
                let d2 = self.eps0 * sech * (tanh * tanh - sech * sech);
                (d1, d2)
            }
        }
    }

    /// Half-width `|Im t|` of the horizontal strip on which `eps` is analytic.
    pub fn analytic_half_width(&self) -> f64 {
        match self.kind {
            ProfileKind::Constant => f64::INFINITY,
            ProfileKind::Decaying => FRAC_PI_2,
        }
    }
}

pub fn r_of_t(t: f64, profile: &EpsilonProfile) -> C64 {
    c(t, -profile.eps(t))
}

/// `r(t)` continued to complex `t`.
pub fn r_of_complex_t(t: C64, profile: &EpsilonProfile) -> C64 {
    t - I * profile.eps_complex(t)
}

/// `(dr/dt, d2r/dt2)` at complex `t`.
pub fn r_derivatives(t: C64, profile: &EpsilonProfile) -> (C64, C64) {
    let (d1, d2) = profile.eps_derivatives(t);
    (1.0 - I * d1, -I * d2)
}

/// `Z(t) = (1/2) ln(sinh^2 t + sin^2 eps)`, arranged to avoid overflow at large `|t|`.
fn z_of_t(t: f64, eps: f64) -> f64 {
    let a = t.abs();
    let one_minus = -(-2.0 * a).exp_m1();
    let s = eps.sin();
    a - LN_2 + 0.5 * (one_minus * one_minus + 4.0 * s * s * (-2.0 * a).exp()).ln()
}

/// `xi(t) = Omega(t) - i Z(t)` from the explicit solution of the implicit pair.
pub fn xi_of_t(t: f64, profile: &EpsilonProfile) -> C64 {
    let eps = profile.eps(t);
    let omega = (t.sinh() * eps.cos()).atan2(t.cosh() * eps.sin());
    c(omega, -z_of_t(t, eps))
}

/// Solves `exp(i xi) = i sinh r` on the branch continuous with the `t = 0`
/// anchor along contours lying in `-pi < Im r <= 0`.
pub fn xi_of_r(r: C64) -> Result<C64> {
    if r.sinh().norm() < SINGULAR_TOL {
        return Err(Error::SingularPoint(r));
    }
    if !(r.im <= 0.0 && r.im > -PI) {
        return Err(Error::BranchUndefined {
            distance: if r.im > 0.0 { r.im } else { -PI - r.im },
        });
    }
    Ok(FRAC_PI_2 - I * log_sinh_lower(r))
}

/// `xi'(r) = -i coth r`.
pub fn dxi_dr(r: C64) -> Result<C64> {
    let s = r.sinh();
    if s.norm() < SINGULAR_TOL {
        return Err(Error::SingularPoint(r));
    }
    Ok(-I * r.cosh() / s)
}

/// `(xi', xi'', xi''')` as functions of `r`, in closed form.
pub fn xi_derivatives(r: C64) -> Result<(C64, C64, C64)> {
    let s = r.sinh();
    if s.norm() < SINGULAR_TOL {
        return Err(Error::SingularPoint(r));
    }
    let ch = r.cosh();
    let s2 = s * s;
    Ok((-I * ch / s, I / s2, -2.0 * I * ch / (s2 * s)))
}

/// `(d xi/dt, d2 xi/dt2)` along the contour continued to complex `t`.
pub fn xi_t_derivatives(t: C64, profile: &EpsilonProfile) -> Result<(C64, C64)> {
    let r = r_of_complex_t(t, profile);
    let (x1, x2, _) = xi_derivatives(r)?;
    let (r1, r2) = r_derivatives(t, profile);
    Ok((x1 * r1, x2 * r1 * r1 + x1 * r2))
}

/// Branch data of the multivalued `xi`-side quantities at a grid point,
/// continued along the grid from the anchor closest to `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiBranches {
    /// `sqrt(1 - exp(2 i xi))`; equals `cosh r`.
    pub sqrt_one_minus_q: C64,
    /// `log sqrt(1 - exp(-2 i xi))`, the log of `coth r`.
    pub log_coth: C64,
    /// `log[sqrt(exp(2 i xi) - 1) - exp(i xi)]` with `sqrt(exp(2 i xi) - 1)`
    /// taken as `-i sqrt(1 - exp(2 i xi))`; equals `r - i pi/2`.
    pub log_bracket: C64,
}

impl XiBranches {
    /// Continuation of the anchor values to any `r` with `-pi/2 < Im r <= 0`.
    pub(crate) fn closed_form(r: C64) -> Self {
        Self {
            sqrt_one_minus_q: r.cosh(),
            log_coth: log_cosh_strip(r) - log_sinh_lower(r),
            log_bracket: r - I * FRAC_PI_2,
        }
    }

    /// Principal values computed from `xi` alone.
    fn principal(xi: C64) -> Self {
        let e = (I * xi).exp();
        let s1 = (1.0 - e * e).sqrt();
        Self {
            sqrt_one_minus_q: s1,
            log_coth: (I * s1 / e).ln(),
            log_bracket: bracket(-I * s1, e).ln(),
        }
    }
}

/// `s - e` for `s^2 = e^2 - 1`, using `s - e = -1/(s + e)` when the direct
/// difference cancels.
pub(crate) fn bracket(s: C64, e: C64) -> C64 {
    let diff = s - e;
    let sum = s + e;
    if diff.norm_sqr() >= sum.norm_sqr() {
        diff
    } else {
        -1.0 / sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPoint {
    pub t: f64,
    pub r: C64,
    pub xi: C64,
    pub omega: f64,
    /// `Z = -Im xi`.
    pub z: f64,
    pub dxi_dr: C64,
    pub branches: XiBranches,
}

/// Uniform grid in `t` of validated contour points. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourGrid {
    profile: EpsilonProfile,
    t_min: f64,
    t_max: f64,
    margin: f64,
    min_singular_distance: f64,
    points: Vec<ContourPoint>,
}

impl ContourGrid {
    pub fn profile(&self) -> &EpsilonProfile {
        &self.profile
    }
    pub fn t_min(&self) -> f64 {
        self.t_min
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[ContourPoint] {
        &self.points
    }
    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.points.len() - 1) as f64
    }
    pub fn safety_margin(&self) -> f64 {
        self.margin
    }
    pub fn min_singular_distance(&self) -> f64 {
        self.min_singular_distance
    }
    pub fn ts(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    /// Symmetric about `t = 0` (both profile kinds are even in `t`).
    pub fn is_symmetric(&self) -> bool {
        (self.t_min + self.t_max).abs() <= 1e-12 * self.t_max.abs().max(1.0)
    }

    /// Index of the grid point closest to `xi` together with that distance.
    pub fn nearest_in_xi(&self, xi: C64) -> (usize, f64) {
        // Omega increases monotonically with t, so bisect on it first.
        let idx = self.points.partition_point(|p| p.omega < xi.re);
        let lo = idx.saturating_sub(3);
        let hi = (idx + 3).min(self.points.len());
        let mut best = (lo, f64::INFINITY);
        for k in lo..hi {
            let d = (self.points[k].xi - xi).norm();
            if d < best.1 {
                best = (k, d);
            }
        }
        // Near the arch top the legs are steep in Omega; fall back to a scan
        // when the local window did not land close.
        if best.1 > self.local_xi_spacing(best.0) {
            for (k, p) in self.points.iter().enumerate() {
                let d = (p.xi - xi).norm();
                if d < best.1 {
                    best = (k, d);
                }
            }
        }
        best
    }

    /// Largest `|xi_k - xi_{k+-1}|` around index `k`.
    pub fn local_xi_spacing(&self, k: usize) -> f64 {
        let p = &self.points;
        let mut s: f64 = 0.0;
        if k > 0 {
            s = s.max((p[k].xi - p[k - 1].xi).norm());
        }
        if k + 1 < p.len() {
            s = s.max((p[k + 1].xi - p[k].xi).norm());
        }
        s
    }

    /// Grid anchor used for `xi`-side branch selection: the point nearest to
    /// `xi`, provided it lies within the snapping radius.
    pub fn anchor_for(&self, xi: C64) -> Result<&ContourPoint> {
        let (k, d) = self.nearest_in_xi(xi);
        let radius = self.margin.max(self.local_xi_spacing(k));
        if d > radius {
            return Err(Error::BranchUndefined { distance: d });
        }
        Ok(&self.points[k])
    }
}

pub fn build_grid(profile: EpsilonProfile, t_min: f64, t_max: f64, n: usize) -> Result<ContourGrid> {
    build_grid_with_margin(profile, t_min, t_max, n, DEFAULT_SAFETY_MARGIN)
}

pub fn build_grid_with_margin(
    profile: EpsilonProfile,
    t_min: f64,
    t_max: f64,
    n: usize,
    margin: f64,
) -> Result<ContourGrid> {
    if !(t_min.is_finite() && t_max.is_finite()) || t_min >= t_max {
        return Err(Error::InvalidGrid("need finite t_min < t_max"));
    }
    if n < 3 {
        return Err(Error::InvalidGrid("need at least 3 points"));
    }
    if !(margin >= 0.0) {
        return Err(Error::InvalidGrid("safety margin must be non-negative"));
    }
    let h = (t_max - t_min) / (n - 1) as f64;
    let mut points = Vec::with_capacity(n);
    let mut min_dist = f64::INFINITY;
    for k in 0..n {
        let t = if k == n - 1 { t_max } else { t_min + h * k as f64 };
        let r = r_of_t(t, &profile);
        let xi = xi_of_t(t, &profile);
        let dist = distance_to_pi_lattice(xi).min(distance_to_pi_lattice(r * -I));
        min_dist = min_dist.min(dist);
        points.push(ContourPoint {
            t,
            r,
            xi,
            omega: xi.re,
            z: -xi.im,
            dxi_dr: -I * coth(r),
            branches: XiBranches::principal(xi),
        });
    }
    if min_dist < margin {
        return Err(Error::ContourTooCloseToSingularity { distance: min_dist, margin });
    }

    let anchor = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.t.abs().total_cmp(&b.1.t.abs()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    points[anchor].branches = XiBranches::closed_form(points[anchor].r);
    let mut roots: Vec<C64> = points.iter().map(|p| p.branches.sqrt_one_minus_q).collect();
    let mut log_coth: Vec<C64> = points.iter().map(|p| p.branches.log_coth).collect();
    let mut log_bracket: Vec<C64> = points.iter().map(|p| p.branches.log_bracket).collect();
    unwrap_roots(&mut roots, anchor);
    // The bracket and coth depend on the sign of the root; recompute their
    // principal logs from the unwrapped root before unwrapping the sheets.
    for (k, p) in points.iter().enumerate() {
        let e = (I * p.xi).exp();
        log_coth[k] = (I * roots[k] / e).ln();
        log_bracket[k] = bracket(-I * roots[k], e).ln();
    }
    log_coth[anchor] = points[anchor].branches.log_coth;
    log_bracket[anchor] = points[anchor].branches.log_bracket;
    unwrap_logs(&mut log_coth, anchor);
    unwrap_logs(&mut log_bracket, anchor);
    for (k, p) in points.iter_mut().enumerate() {
        p.branches = XiBranches {
            sqrt_one_minus_q: roots[k],
            log_coth: log_coth[k],
            log_bracket: log_bracket[k],
        };
    }

    Ok(ContourGrid { profile, t_min, t_max, margin, min_singular_distance: min_dist, points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourValidation {
    /// `max |sinh t cos eps - e^Z sin Omega|`.
    pub implicit_sin: f64,
    /// `max |cosh t sin eps - e^Z cos Omega|`.
    pub implicit_cos: f64,
    /// Both implicit equations divided by `max(1, e^Z)`.
    pub implicit_scaled: f64,
    /// `max |sinh r + i exp(i xi)|`.
    pub composition: f64,
    /// Composition residual divided by `max(1, |sinh r|)`.
    pub composition_scaled: f64,
    /// `max |xi_of_r(r) - xi|` over the grid.
    pub xi_of_r_mismatch: f64,
    pub min_singular_distance: f64,
}

pub fn validate_contour(grid: &ContourGrid) -> ContourValidation {
    let mut v = ContourValidation {
        implicit_sin: 0.0,
        implicit_cos: 0.0,
        implicit_scaled: 0.0,
        composition: 0.0,
        composition_scaled: 0.0,
        xi_of_r_mismatch: 0.0,
        min_singular_distance: f64::INFINITY,
    };
    for p in grid.points() {
        let eps = grid.profile().eps(p.t);
        let ez = p.z.exp();
        let a = (p.t.sinh() * eps.cos() - ez * p.omega.sin()).abs();
        let b = (p.t.cosh() * eps.sin() - ez * p.omega.cos()).abs();
        let scale = ez.max(1.0);
        v.implicit_sin = v.implicit_sin.max(a);
        v.implicit_cos = v.implicit_cos.max(b);
        v.implicit_scaled = v.implicit_scaled.max(a.max(b) / scale);
        let sh = p.r.sinh();
        let comp = (sh + I * (I * p.xi).exp()).norm();
        v.composition = v.composition.max(comp);
        v.composition_scaled = v.composition_scaled.max(comp / sh.norm().max(1.0));
        let mismatch = match xi_of_r(p.r) {
            Ok(x) => (x - p.xi).norm(),
            Err(_) => f64::INFINITY,
        };
        v.xi_of_r_mismatch = v.xi_of_r_mismatch.max(mismatch);
        v.min_singular_distance = v
            .min_singular_distance
            .min(distance_to_pi_lattice(p.xi).min(distance_to_pi_lattice(p.r * -I)));
    }
    v
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn implicit_pair_and_symmetry(t in -12.0f64..12.0, eps0 in 0.05f64..1.4, decaying in any::<bool>()) {
            let p = EpsilonProfile::new(if decaying { ProfileKind::Decaying } else { ProfileKind::Constant }, eps0).unwrap();
            let x = xi_of_t(t, &p);
            let eps = p.eps(t);
            let (om, z) = (x.re, -x.im);
            let scale = z.exp().max(1.0);
            prop_assert!((t.sinh() * eps.cos() - z.exp() * om.sin()).abs() / scale < 1e-14);
            prop_assert!((t.cosh() * eps.sin() - z.exp() * om.cos()).abs() / scale < 1e-14);
            let xm = xi_of_t(-t, &p);
            prop_assert_eq!(xm.re, -x.re);
            prop_assert_eq!(xm.im, x.im);
            let r = r_of_t(t, &p);
            prop_assert!((xi_of_r(r).unwrap() - x).norm() < 1e-12);
        }
    }
}
