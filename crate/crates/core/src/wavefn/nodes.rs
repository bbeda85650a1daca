//! Zeros of the continued wavefunction near the contour.
//!
//! The window is a rectangle in complex `t`, slit along the imaginary axis
//! below the first singular point of the continued state. The winding number of `psi`
//! around its boundary is accumulated from exact log increments between
//! neighbouring samples; the trapezoid rule on `psi'/psi` is the step-size
//! control that decides where a segment must be split.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::{c, I};
use crate::contour::{r_derivatives, r_of_complex_t, ContourGrid, EpsilonProfile, ProfileKind};
use crate::numeric::dense::{eigenvalues, DenseMatrix};
use crate::potentials::Model;
use crate::{Error, Result, C64};

use super::jacobi::jacobi_coefficients;
use super::states::StateSpec;
use super::WaveSamples;

/// Distance kept from the grid ends.
const SIDE_MARGIN: f64 = 0.5;
/// Preferred height above the contour.
const ABOVE: f64 = 0.2;
/// Fraction of the distance to the nearest singular point used above the contour.
const ABOVE_FRACTION: f64 = 0.9;
/// Depth below the contour for the decaying profile, as a fraction of the
/// distance to the pole of `sech t`.
const DECAYING_DEPTH: f64 = 0.8;
/// Half-width of the slit cut around the imaginary axis, and the gap kept
/// above the shallowest singular point.
const SLIT: f64 = 0.02;
/// Smallest distance between the window bottom and a singular point.
const BOTTOM_CLEARANCE: f64 = 0.05;

/// The region `[t_lo, t_hi] x [-below, above]` in complex `t`, minus the slit
/// `|Re t| < slit_half_width, Im t < -slit_top` when `slit_top < below`.
///
/// The continued state is singular only on the imaginary axis, and the
/// branch cuts of its closed form run straight down from there; the slit
/// removes both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeWindow {
    pub t_lo: f64,
    pub t_hi: f64,
    pub below: f64,
    pub above: f64,
    pub slit_half_width: f64,
    pub slit_top: f64,
}

impl NodeWindow {
    /// A plain rectangle.
    pub fn rectangle(t_lo: f64, t_hi: f64, below: f64, above: f64) -> Self {
        Self { t_lo, t_hi, below, above, slit_half_width: 0.0, slit_top: f64::INFINITY }
    }

    pub fn has_slit(&self) -> bool {
        self.slit_top < self.below && self.slit_half_width > 0.0
    }

    pub fn contains(&self, t: C64) -> bool {
        let in_rect = t.re > self.t_lo && t.re < self.t_hi && t.im > -self.below && t.im < self.above;
        let in_slit = self.has_slit() && t.re.abs() <= self.slit_half_width && t.im <= -self.slit_top;
        in_rect && !in_slit
    }

    /// Boundary corners, counter-clockwise.
    pub fn corners(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(8);
        v.push(c(self.t_lo, -self.below));
        if self.has_slit() {
            let w = self.slit_half_width;
            v.push(c(-w, -self.below));
            v.push(c(-w, -self.slit_top));
            v.push(c(w, -self.slit_top));
            v.push(c(w, -self.below));
        }
        v.push(c(self.t_hi, -self.below));
        v.push(c(self.t_hi, self.above));
        v.push(c(self.t_lo, self.above));
        v
    }
}

/// `Im r` along the imaginary `t` axis: `y - eps(i y)`.
fn im_r_on_axis(y: f64, profile: &EpsilonProfile) -> f64 {
    match profile.kind() {
        ProfileKind::Constant => y - profile.eps0(),
        ProfileKind::Decaying => y - profile.eps0() / y.cos(),
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Spacing in `Im r` of the points where the continued state is singular:
/// zeros of `cosh r` and `sinh r` for Natanzon states, of `sinh r` for Eckart states.
fn singular_spacing(model: &Model) -> f64 {
    match model {
        Model::Natanzon(_) => FRAC_PI_2,
        Model::Eckart(_) => PI,
    }
}

/// Depths below the contour, on the imaginary `t` axis, of the singular
/// points of solutions of `model`, shallowest first, down to `max_depth`.
pub fn singular_depths(model: &Model, profile: &EpsilonProfile, max_depth: f64) -> Vec<f64> {
    let step = singular_spacing(model);
    let pole = profile.analytic_half_width();
    let mut out = Vec::new();
    for k in 1..64 {
        let target = -step * k as f64;
        let d = match profile.kind() {
            ProfileKind::Constant => -(target + profile.eps0()),
            // y - eps0 / cos y increases monotonically from -inf on (-pi/2, 0].
            ProfileKind::Decaying => {
                if im_r_on_axis(0.0, profile) <= target {
                    continue;
                }
                -bisect(|y| im_r_on_axis(y, profile) - target, -pole + 1e-12, 0.0)
            }
        };
        if d <= 0.0 {
            continue;
        }
        if d > max_depth {
            break;
        }
        out.push(d);
    }
    out
}

/// Distances along the imaginary `t` axis, below and above the contour, to the
/// nearest point where the continued state stops being analytic.
pub fn singular_distances(state: &StateSpec, profile: &EpsilonProfile) -> (f64, f64) {
    let pole = profile.analytic_half_width();
    let below = singular_depths(&state.model(), profile, f64::INFINITY).first().copied().unwrap_or(pole);
    (below, above_distance(profile))
}

/// Height above the contour, on the imaginary axis, where `r = 0`.
fn above_distance(profile: &EpsilonProfile) -> f64 {
    let pole = profile.analytic_half_width();
    let g = |y: f64| im_r_on_axis(y, profile);
    match profile.kind() {
        ProfileKind::Constant => profile.eps0(),
        ProfileKind::Decaying => {
            // g is concave on (0, pi/2): find its maximum, then the first zero before it.
            let mut lo = 0.0;
            let mut hi = pole - 1e-12;
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if g(m1) < g(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            let top = 0.5 * (lo + hi);
            if g(top) < 0.0 {
                pole
            } else {
                bisect(g, 0.0, top)
            }
        }
    }
}

pub fn default_window(grid: &ContourGrid, state: &StateSpec) -> NodeWindow {
    model_window(grid, &state.model())
}

/// The counting window for any solution of `model` on `grid`.
pub fn model_window(grid: &ContourGrid, model: &Model) -> NodeWindow {
    let profile = grid.profile();
    let up = above_distance(profile);
    let mut below = match profile.kind() {
        // Stay clear of the essential singularity of r(t) at t = -i pi/2.
        ProfileKind::Decaying => DECAYING_DEPTH * FRAC_PI_2,
        ProfileKind::Constant => FRAC_PI_2,
    };
    let depths = singular_depths(model, profile, below + BOTTOM_CLEARANCE);
    for &d in depths.iter().rev() {
        if (d - below).abs() < BOTTOM_CLEARANCE {
            below = d - BOTTOM_CLEARANCE;
        }
    }
    let slit_top = depths.first().map_or(f64::INFINITY, |d| d - SLIT);
    NodeWindow {
        t_lo: grid.t_min() + SIDE_MARGIN,
        t_hi: grid.t_max() - SIDE_MARGIN,
        below,
        above: ABOVE.min(ABOVE_FRACTION * up),
        slit_half_width: SLIT,
        slit_top,
    }
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

struct Node {
    z: C64,
    log: C64,
    dlog: C64,
}

fn segment<F>(f: &F, a: &Node, b: &Node, depth: u32) -> Result<f64>
where
    F: Fn(C64) -> Result<(C64, C64)>,
{
    let exact = wrap((b.log - a.log).im);
    let trap = ((a.dlog + b.dlog) * 0.5 * (b.z - a.z)).im;
    if exact.abs() > 0.5 || (exact - trap).abs() > 0.05 {
        let zm = 0.5 * (a.z + b.z);
        if depth >= 40 {
            // A jump that survives refinement: a cut or a zero on the boundary.
            return Err(Error::SingularPoint(zm));
        }
        let (log, dlog) = f(zm)?;
        let m = Node { z: zm, log, dlog };
        return Ok(segment(f, a, &m, depth + 1)? + segment(f, &m, b, depth + 1)?);
    }
    Ok(exact)
}

/// Change of `arg f` along the polyline through `corners` (closed), where
/// `f(z)` returns `(log psi, d log psi / dz)`.
fn phase_change<F>(f: &F, corners: &[C64], step: f64) -> Result<f64>
where
    F: Fn(C64) -> Result<(C64, C64)>,
{
    let mut total = 0.0;
    for k in 0..corners.len() {
        let a = corners[k];
        let b = corners[(k + 1) % corners.len()];
        let pieces = ((b - a).norm() / step).ceil().max(1.0) as usize;
        let mut prev = {
            let (log, dlog) = f(a)?;
            Node { z: a, log, dlog }
        };
        for j in 1..=pieces {
            let z = a + (b - a) * (j as f64 / pieces as f64);
            let (log, dlog) = f(z)?;
            let cur = Node { z, log, dlog };
            total += segment(f, &prev, &cur, 0)?;
            prev = cur;
        }
    }
    Ok(total)
}

/// Rounds a winding number to a zero count; more than 0.1 away from an
/// integer is an error.
pub fn round_winding(winding: f64) -> Result<u32> {
    let k = winding.round();
    if (winding - k).abs() > 0.1 || k < 0.0 {
        return Err(Error::WindingNotInteger(winding));
    }
    Ok(k as u32)
}

/// Zeros of the closed form of `state` inside `window`.
pub fn count_nodes_in(state: &StateSpec, grid: &ContourGrid, window: &NodeWindow) -> Result<u32> {
    let profile = *grid.profile();
    let f = |t: C64| state.log_psi_t(t, &profile);
    let total = phase_change(&f, &window.corners(), grid.step())?;
    round_winding(total / TAU)
}

/// Zeros near the contour of the state the samples came from.
pub fn count_nodes(samples: &WaveSamples, grid: &ContourGrid) -> Result<u32> {
    let state = samples
        .state
        .ok_or(Error::InvalidParameters("node counting needs the closed form behind the samples"))?;
    count_nodes_in(&state, grid, &default_window(grid, &state))
}

/// Node counts for a range of depths below the contour.
pub fn node_count_sweep(samples: &WaveSamples, grid: &ContourGrid, belows: &[f64]) -> Result<Vec<(f64, Result<u32>)>> {
    let state = samples
        .state
        .ok_or(Error::InvalidParameters("node counting needs the closed form behind the samples"))?;
    let base = default_window(grid, &state);
    Ok(belows
        .iter()
        .map(|&b| (b, count_nodes_in(&state, grid, &NodeWindow { below: b, ..base })))
        .collect())
}

/// Winding number of a closed sequence of samples, from wrapped phase increments.
pub fn winding_of_samples(values: &[C64]) -> Result<f64> {
    let n = values.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = values[k];
        let b = values[(k + 1) % n];
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(Error::SingularPoint(a));
        }
        let d = (b / a).arg();
        if d.abs() > 0.75 * PI {
            return Err(Error::WindingNotInteger(total / TAU));
        }
        total += d;
    }
    Ok(total / TAU)
}

fn solve_for_t(r: C64, profile: &EpsilonProfile) -> Option<C64> {
    let starts = [
        r + I * profile.eps(r.re),
        c(r.re, r.im + profile.eps0()),
        r,
        c(r.re, r.im + 0.5 * profile.eps0()),
    ];
    for t0 in starts {
        let mut t = t0;
        for _ in 0..100 {
            let g = r_of_complex_t(t, profile) - r;
            let dg = r_derivatives(t, profile).0;
            let mut step = g / dg;
            if step.norm() > 0.5 {
                step *= 0.5 / step.norm();
            }
            t -= step;
            if !(t.re.is_finite() && t.im.is_finite()) {
                break;
            }
            if (r_of_complex_t(t, profile) - r).norm() < 1e-13 * r.norm().max(1.0) {
                return Some(t);
            }
        }
    }
    None
}

/// Independent count: roots of the Jacobi factor mapped back through
/// `y = coth r` and `r = r(t)`, kept if they land inside `window`.
pub fn jacobi_root_count(state: &StateSpec, grid: &ContourGrid, window: &NodeWindow) -> Result<u32> {
    let n = state.n();
    if n == 0 {
        return Ok(0);
    }
    let (al, be) = state.jacobi_parameters();
    let coeffs = jacobi_coefficients(n, al, be);
    let lead = coeffs[n as usize];
    let monic: Vec<C64> = coeffs[..n as usize].iter().map(|x| x / lead).collect();
    let roots = eigenvalues(DenseMatrix::companion(&monic), 200)?;
    let profile = grid.profile();
    let mut found: Vec<C64> = Vec::new();
    for y in roots {
        let r0 = 0.5 * ((y + 1.0) / (y - 1.0)).ln();
        for k in -3..=3 {
            let r = r0 + I * (PI * f64::from(k));
            if let Some(t) = solve_for_t(r, profile) {
                if window.contains(t) && found.iter().all(|u| (u - t).norm() > 1e-8) {
                    found.push(t);
                }
            }
        }
    }
    Ok(found.len() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::build_grid;
    use crate::potentials::{EckartParams, NatanzonParams};
    use crate::spectrum::Branch;
    use crate::wavefn::sample_state;

    fn grid(eps0: f64) -> ContourGrid {
        build_grid(EpsilonProfile::decaying(eps0).unwrap(), -12.0, 12.0, 2001).unwrap()
    }

    #[test]
    fn singular_distances_reference() {
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        let s = StateSpec::natanzon(p, 0, Branch::Plus).unwrap();
        let (down, up) = singular_distances(&s, &EpsilonProfile::decaying(0.25).unwrap());
        assert!((down - 1.058).abs() < 2e-3, "{down}");
        assert!(up > 0.2 && up < 0.4, "{up}");
        let (down, up) = singular_distances(&s, &EpsilonProfile::decaying(1.0).unwrap());
        assert!((down - 0.457).abs() < 2e-3, "{down}");
        assert_eq!(up, FRAC_PI_2);
    }

    #[test]
    fn winding_of_circle_samples() {
        let pts: Vec<C64> = (0..64).map(|k| (I * (TAU * k as f64 / 64.0)).exp()).collect();
        let z2: Vec<C64> = pts.iter().map(|z| z * z).collect();
        assert!((winding_of_samples(&pts).unwrap() - 1.0).abs() < 1e-12);
        assert!((winding_of_samples(&z2).unwrap() - 2.0).abs() < 1e-12);
        let shifted: Vec<C64> = pts.iter().map(|z| z + 3.0).collect();
        assert!(winding_of_samples(&shifted).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ground_states_have_no_nodes() {
        let g = grid(0.25);
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        for b in [Branch::Minus, Branch::Plus] {
            let s = sample_state(&StateSpec::natanzon(p, 0, b).unwrap(), &g).unwrap();
            assert_eq!(count_nodes(&s, &g).unwrap(), 0);
        }
        let e = EckartParams::new(3.0, 1.0).unwrap();
        let s = sample_state(&StateSpec::eckart(e, 0).unwrap(), &g).unwrap();
        assert_eq!(count_nodes(&s, &g).unwrap(), 0);
    }

    #[test]
    fn first_excited_doublet_has_one_node_each() {
        let g = grid(0.25);
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        for b in [Branch::Minus, Branch::Plus] {
            let st = StateSpec::natanzon(p, 1, b).unwrap();
            let s = sample_state(&st, &g).unwrap();
            assert_eq!(count_nodes(&s, &g).unwrap(), 1, "{b:?}");
            let w = default_window(&g, &st);
            assert_eq!(jacobi_root_count(&st, &g, &w).unwrap(), 1, "{b:?}");
        }
    }

    #[test]
    fn thin_strip_misses_the_deep_zero() {
        let g = grid(0.25);
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        let st = StateSpec::natanzon(p, 1, Branch::Plus).unwrap();
        let s = sample_state(&st, &g).unwrap();
        let sweep = node_count_sweep(&s, &g, &[0.2, 0.5, 1.0]).unwrap();
        assert_eq!(sweep[0].1, Ok(0));
        assert_eq!(sweep[2].1, Ok(1));
    }

    #[test]
    fn eckart_excited_state() {
        let g = grid(0.25);
        let e = EckartParams::new(3.0, 1.0).unwrap();
        let st = StateSpec::eckart(e, 1).unwrap();
        let s = sample_state(&st, &g).unwrap();
        assert_eq!(count_nodes(&s, &g).unwrap(), 1);
        assert_eq!(jacobi_root_count(&st, &g, &default_window(&g, &st)).unwrap(), 1);
    }

    #[test]
    fn hermitian_limit_node_sits_on_the_branch_point() {
        let g = grid(0.25);
        let p = NatanzonParams::new(0.0, 10.0).unwrap();
        let st = StateSpec::natanzon(p, 1, Branch::Plus).unwrap();
        let s = sample_state(&st, &g).unwrap();
        let w = default_window(&g, &st);
        assert!(w.has_slit());
        // The Jacobi root y = 0 is cosh r = 0, the branch point itself.
        let d = singular_depths(&st.model(), g.profile(), 2.0)[0];
        let (al, be) = st.jacobi_parameters();
        let coeffs = jacobi_coefficients(1, al, be);
        assert!((coeffs[0] / coeffs[1]).norm() < 1e-12);
        let tb = solve_for_t(c(0.0, -FRAC_PI_2), g.profile()).unwrap();
        assert!((tb - c(0.0, -d)).norm() < 1e-9);
        assert_eq!(count_nodes(&s, &g).unwrap(), 0);
        assert_eq!(jacobi_root_count(&st, &g, &w).unwrap(), 0);
        // A loop around it must cross the cut of the closed form.
        let around = NodeWindow::rectangle(-0.05, 0.05, d + 0.05, -(d - 0.05));
        assert!(matches!(count_nodes_in(&st, &g, &around), Err(Error::SingularPoint(_))));
        // The Eckart partner is analytic there and has the simple zero.
        let e = st.eckart_partner().unwrap();
        let we = default_window(&g, &e);
        assert!(!we.has_slit());
        assert_eq!(count_nodes_in(&e, &g, &we).unwrap(), 1);
        assert_eq!(jacobi_root_count(&e, &g, &we).unwrap(), 1);
    }

    #[test]
    fn second_excited_doublet() {
        let g = grid(0.25);
        let p = NatanzonParams::new(1.0, 20.0).unwrap();
        for b in [Branch::Minus, Branch::Plus] {
            let st = StateSpec::natanzon(p, 2, b).unwrap();
            let s = sample_state(&st, &g).unwrap();
            let w = default_window(&g, &st);
            assert_eq!(count_nodes(&s, &g).unwrap(), 2, "{b:?}");
            assert_eq!(jacobi_root_count(&st, &g, &w).unwrap(), 2, "{b:?}");
        }
    }

    #[test]
    fn slit_window_shape() {
        let w = NodeWindow { t_lo: -1.0, t_hi: 1.0, below: 1.0, above: 0.2, slit_half_width: 0.1, slit_top: 0.5 };
        assert_eq!(w.corners().len(), 8);
        assert!(w.contains(c(0.5, -0.9)));
        assert!(!w.contains(c(0.0, -0.9)));
        assert!(w.contains(c(0.0, -0.4)));
        let plain = NodeWindow { slit_top: 2.0, ..w };
        assert_eq!(plain.corners().len(), 4);
        assert!(plain.contains(c(0.0, -0.9)));
    }

    #[test]
    fn constant_profile_depths() {
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        let st = StateSpec::natanzon(p, 0, Branch::Plus).unwrap();
        let d = singular_depths(&st.model(), &EpsilonProfile::constant(0.3).unwrap(), 3.0);
        assert!((d[0] - (FRAC_PI_2 - 0.3)).abs() < 1e-12);
        assert!((d[1] - (PI - 0.3)).abs() < 1e-12);
    }
}
