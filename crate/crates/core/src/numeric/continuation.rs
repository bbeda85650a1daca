//! Zeros of a numerical eigenvector off the contour.
//!
//! Cauchy data on the real `t` axis come from shooting the ODE
//! `psi_t = x_t phi`, `phi_t = x_t (V - E) psi` inward from both tails of the
//! eigenvector; the mismatch where the two shots meet measures their error.
//! From there the data are carried straight up or down in complex `t`, where
//! the two solutions oscillate rather than separate exponentially. Two error
//! solutions ride along; the count is accepted only where their size stays
//! below half of `|psi|` on the whole boundary, so by Rouche's theorem the
//! exact solution has the same number of zeros inside.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::c;
use crate::contour::r_of_complex_t;
use crate::wavefn::{model_window, round_winding, singular_depths, winding_of_samples, NodeWindow};
use crate::{Error, Result, C64};

use super::eigen::EigenPair;
use super::operator::DiscreteOperator;

/// Eigenvector values below this fraction of the peak are not used.
pub const TRIM_FRACTION: f64 = 1e-6;
/// Admixture of the growing solution, forced in by the Dirichlet walls, that
/// the window tolerates.
pub const WALL_ADMIXTURE: f64 = 1e-3;
/// Largest accepted ratio of the error bound to `|psi|` on the boundary.
pub const ROUCHE_RATIO: f64 = 0.5;

/// RK4 sub-steps per grid spacing.
const SUBSTEPS: usize = 2;
/// RK4 step as a fraction of the distance to the nearest singular point.
const NEAR_SINGULAR_STEP: f64 = 0.05;
/// Largest phase change between neighbouring boundary samples.
const MAX_PHASE_STEP: f64 = 0.3;
/// Bisection depth for boundary sampling.
const MAX_REFINE: u32 = 24;
/// Depth below the contour searched for singular points.
const SINGULAR_SEARCH_DEPTH: f64 = 4.0;
/// Factor applied to an untrusted window height before retrying.
const SHRINK: f64 = 0.8;
/// Smallest window height tried.
const MIN_HEIGHT: f64 = 0.02;
/// Floor on the relative error assumed for the Cauchy data.
const MIN_DATA_ERROR: f64 = 1e-12;

/// `psi`, `d psi / dx`, and the two error solutions, in that order.
type State = [(C64, C64); 3];

struct Ode<'a> {
    op: &'a DiscreteOperator,
    energy: C64,
    /// Singular points of the equation near the window, all on the imaginary axis.
    singular: Vec<C64>,
}

impl Ode<'_> {
    /// `(x_t, x_t (V - E))`: the coefficients of the first-order system.
    fn coefficients(&self, t: C64) -> Result<(C64, C64)> {
        let profile = self.op.grid().profile();
        let model = self.op.model();
        let x_t = model.metric(t, profile)?.0;
        let v = model.value_at_r(r_of_complex_t(t, profile))?;
        Ok((x_t, x_t * (v - self.energy)))
    }

    fn clearance(&self, t: C64) -> f64 {
        self.singular.iter().map(|s| (t - s).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Straight-line RK4 from `a` to `b`, with steps no longer than `max_step`
    /// or a small fraction of the distance to the nearest singular point.
    fn carry(&self, a: C64, mut y: State, b: C64, max_step: f64) -> Result<State> {
        let len = (b - a).norm();
        if len == 0.0 {
            return Ok(y);
        }
        let dir = (b - a) / len;
        let mut done = 0.0;
        while done < len {
            let t = a + dir * done;
            let step = max_step.min(NEAR_SINGULAR_STEP * self.clearance(t)).min(len - done).max(len * 1e-9);
            let dt = dir * step;
            let c0 = self.coefficients(t)?;
            let c1 = self.coefficients(t + dt * 0.5)?;
            let c2 = self.coefficients(t + dt)?;
            for s in y.iter_mut() {
                let f = |k: (C64, C64), (p, q): (C64, C64)| (k.0 * q, k.1 * p);
                let k1 = f(c0, *s);
                let k2 = f(c1, (s.0 + k1.0 * dt * 0.5, s.1 + k1.1 * dt * 0.5));
                let k3 = f(c1, (s.0 + k2.0 * dt * 0.5, s.1 + k2.1 * dt * 0.5));
                let k4 = f(c2, (s.0 + k3.0 * dt, s.1 + k3.1 * dt));
                s.0 += (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) * dt / 6.0;
                s.1 += (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) * dt / 6.0;
            }
            done += step;
        }
        Ok(y)
    }
}

/// A boundary sample: `psi` and the bound on its error.
#[derive(Debug, Clone, Copy)]
struct Sample {
    z: C64,
    psi: C64,
    err: f64,
}

/// Continues one eigenvector off the contour.
pub struct Continuation<'a> {
    ode: Ode<'a>,
    ts: Vec<f64>,
    h: f64,
    /// Shot Cauchy data `(psi, phi)` on grid points `first..first + data.len()`.
    first: usize,
    data: Vec<(C64, C64)>,
    data_error: f64,
}

impl<'a> Continuation<'a> {
    /// Uses the eigenvalue stored in `pair`.
    pub fn new(op: &'a DiscreteOperator, pair: &EigenPair) -> Result<Self> {
        Self::with_energy(op, pair, pair.value)
    }

    /// Shoots with `energy` instead, e.g. an extrapolated eigenvalue.
    pub fn with_energy(op: &'a DiscreteOperator, pair: &EigenPair, energy: C64) -> Result<Self> {
        if pair.vector.len() != op.grid().len() {
            return Err(Error::DimensionMismatch("eigenvector and grid differ in length"));
        }
        let singular = singular_depths(op.model(), op.grid().profile(), SINGULAR_SEARCH_DEPTH)
            .into_iter()
            .map(|d| c(0.0, -d))
            .collect();
        let ode = Ode { op, energy, singular };
        let ts: Vec<f64> = op.grid().ts().collect();
        let h = op.grid().step();
        let v = &pair.vector;
        let (a, b) = trusted_range(v);
        let peak = (a..=b).max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm())).unwrap_or(a);
        let step = h / SUBSTEPS as f64;
        let fd = |k: usize| -> Result<(C64, C64)> {
            let x_t = op.model().metric(c(ts[k], 0.0), op.grid().profile())?.0;
            Ok((v[k], (v[k + 1] - v[k - 1]) / (2.0 * h * x_t)))
        };
        let zero = (C64::default(), C64::default());
        let shoot = |from: usize, to: usize| -> Result<Vec<(C64, C64)>> {
            let mut out = Vec::new();
            let mut s: State = [fd(from)?, zero, zero];
            let mut k = from;
            out.push(s[0]);
            while k != to {
                let next = if to > k { k + 1 } else { k - 1 };
                s = ode.carry(c(ts[k], 0.0), s, c(ts[next], 0.0), step)?;
                out.push(s[0]);
                k = next;
            }
            Ok(out)
        };
        let left = shoot(a, peak)?;
        let mut right = shoot(b, peak)?;
        right.reverse();
        let (pl, ql) = left[left.len() - 1];
        let (pr, qr) = right[0];
        let scale = pl / pr;
        let data_error = ((ql / pl - qr / pr).norm() / (ql / pl).norm().max(1.0)).max(MIN_DATA_ERROR);
        let mut data = left;
        data.extend(right.iter().skip(1).map(|(p, q)| (p * scale, q * scale)));
        Ok(Self { ode, ts, h, first: a, data, data_error })
    }

    /// Relative mismatch of the two shots where they meet.
    pub fn data_error(&self) -> f64 {
        self.data_error
    }

    fn start_state(&self, x: f64) -> Result<(f64, State)> {
        let last = self.first + self.data.len() - 1;
        let k = (((x - self.ts[0]) / self.h).round() as usize).clamp(self.first, last);
        let (p, q) = self.data[k - self.first];
        let e = self.data_error;
        let state = [(p, q), (c(e * p.norm(), 0.0), C64::default()), (C64::default(), c(e * q.norm(), 0.0))];
        let step = self.h / SUBSTEPS as f64;
        let s = self.ode.carry(c(self.ts[k], 0.0), state, c(x, 0.0), step)?;
        Ok((self.ts[k], s))
    }

    fn sample(&self, z: C64) -> Result<Sample> {
        let (_, s) = self.start_state(z.re)?;
        let s = self.ode.carry(c(z.re, 0.0), s, z, self.h / SUBSTEPS as f64)?;
        Ok(Sample { z, psi: s[0].0, err: s[1].0.norm() + s[2].0.norm() })
    }

    /// `psi` at `z`, reached straight up or down from the real axis.
    pub fn value(&self, z: C64) -> Result<C64> {
        Ok(self.sample(z)?.psi)
    }

    /// Samples around the boundary of `window`, counter-clockwise, bisected
    /// until neighbouring phases differ by at most `MAX_PHASE_STEP`.
    fn boundary(&self, window: &NodeWindow) -> Result<Vec<Sample>> {
        let corners = window.corners();
        let mut out = Vec::new();
        for k in 0..corners.len() {
            let a = corners[k];
            let b = corners[(k + 1) % corners.len()];
            let pieces = ((b - a).norm() / self.h).ceil().max(1.0) as usize;
            let mut prev = self.sample(a)?;
            out.push(prev);
            for j in 1..=pieces {
                let cur = self.sample(a + (b - a) * (j as f64 / pieces as f64))?;
                self.refine(prev, cur, 0, &mut out)?;
                if j < pieces {
                    out.push(cur);
                }
                prev = cur;
            }
        }
        Ok(out)
    }

    fn refine(&self, a: Sample, b: Sample, depth: u32, out: &mut Vec<Sample>) -> Result<()> {
        if depth >= MAX_REFINE || (b.psi / a.psi).arg().abs() <= MAX_PHASE_STEP {
            return Ok(());
        }
        let m = self.sample(0.5 * (a.z + b.z))?;
        self.refine(a, m, depth + 1, out)?;
        out.push(m);
        self.refine(m, b, depth + 1, out)
    }

    pub fn boundary_samples(&self, window: &NodeWindow) -> Result<Vec<C64>> {
        Ok(self.boundary(window)?.iter().map(|s| s.psi).collect())
    }
}

/// First and last indices where the eigenvector is above [`TRIM_FRACTION`] of its peak.
fn trusted_range(v: &[C64]) -> (usize, usize) {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let n = v.len();
    let a = (1..n - 1).find(|&k| v[k].norm() >= TRIM_FRACTION * peak).unwrap_or(1);
    let b = (1..n - 1).rev().find(|&k| v[k].norm() >= TRIM_FRACTION * peak).unwrap_or(n - 2);
    (a.max(1), b.min(n - 2))
}

/// Least-squares decay rate of `ln |psi|` against distance from the centre,
/// over the middle half of one tail.
fn tail_decay_rate(ts: &[f64], v: &[C64], left: bool) -> Option<f64> {
    let half = ts[ts.len() - 1].abs().min(ts[0].abs());
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, z) in ts.iter().zip(v) {
        let d = if left { -t } else { *t };
        if d < 0.25 * half || d > 0.5 * half || z.norm() == 0.0 {
            continue;
        }
        let y = z.norm().ln();
        n += 1.0;
        sx += d;
        sy += y;
        sxx += d * d;
        sxy += d * y;
    }
    if n < 3.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope < 0.0).then_some(-slope)
}

/// The largest counting window for an eigenvector: the model's window, kept
/// where the eigenvector is above [`TRIM_FRACTION`] of its peak and where the
/// wall admixture, `exp(-2 kappa d)` at distance `d` from a wall for the
/// measured tail decay rate `kappa`, is below [`WALL_ADMIXTURE`].
pub fn eigenvector_window(op: &DiscreteOperator, pair: &EigenPair) -> NodeWindow {
    let mut w = model_window(op.grid(), op.model());
    let v = &pair.vector;
    let ts: Vec<f64> = op.grid().ts().collect();
    let h = op.grid().step();
    let (a, b) = trusted_range(v);
    w.t_lo = w.t_lo.max(ts[a] + h);
    w.t_hi = w.t_hi.min(ts[b] - h);
    let reach = |kappa: Option<f64>| kappa.map_or(0.0, |k| (1.0 / WALL_ADMIXTURE).ln() / (2.0 * k));
    w.t_lo = w.t_lo.max(ts[0] + reach(tail_decay_rate(&ts, v, true)));
    w.t_hi = w.t_hi.min(ts[ts.len() - 1] - reach(tail_decay_rate(&ts, v, false)));
    w
}

/// A node count together with the window it holds in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvectorNodes {
    pub count: u32,
    pub window: NodeWindow,
    /// Largest error bound over `|psi|` on the boundary.
    pub rouche_ratio: f64,
    /// Relative error of the shot Cauchy data.
    pub data_error: f64,
}

/// Zeros of the continued eigenvector, in the largest window (shrinking from
/// [`eigenvector_window`]) on whose boundary the Rouche bound holds.
pub fn eigenvector_nodes(op: &DiscreteOperator, pair: &EigenPair, energy: Option<C64>) -> Result<EigenvectorNodes> {
    let cont = Continuation::with_energy(op, pair, energy.unwrap_or(pair.value))?;
    let mut window = eigenvector_window(op, pair);
    loop {
        let samples = cont.boundary(&window)?;
        let mut worst_below: f64 = 0.0;
        let mut worst_above: f64 = 0.0;
        for s in &samples {
            let ratio = s.err / s.psi.norm().max(f64::MIN_POSITIVE);
            if s.z.im < 0.0 {
                worst_below = worst_below.max(ratio);
            } else {
                worst_above = worst_above.max(ratio);
            }
        }
        let ok_below = worst_below <= ROUCHE_RATIO;
        let ok_above = worst_above <= ROUCHE_RATIO;
        if ok_below && ok_above {
            let values: Vec<C64> = samples.iter().map(|s| s.psi).collect();
            let count = round_winding(winding_of_samples(&values)?)?;
            return Ok(EigenvectorNodes { count, window, rouche_ratio: worst_below.max(worst_above), data_error: cont.data_error() });
        }
        if !ok_below {
            window.below *= SHRINK;
        }
        if !ok_above {
            window.above *= SHRINK;
        }
        if window.below < MIN_HEIGHT || window.above < MIN_HEIGHT {
            return Err(Error::UntrustedContinuation { depth: window.below.min(window.above) });
        }
    }
}

pub fn eigenvector_node_count(op: &DiscreteOperator, pair: &EigenPair) -> Result<u32> {
    Ok(eigenvector_nodes(op, pair, None)?.count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_grid, EpsilonProfile};
    use crate::numeric::eigen::eigen_near;
    use crate::numeric::operator::discretize;
    use crate::potentials::{EckartParams, Model, NatanzonParams};
    use crate::spectrum::Branch;
    use crate::wavefn::{count_nodes_in, StateSpec};

    fn natanzon_op(eps0: f64, n: usize) -> DiscreteOperator {
        let g = build_grid(EpsilonProfile::decaying(eps0).unwrap(), -12.0, 12.0, n).unwrap();
        discretize(&g, &Model::Natanzon(NatanzonParams::new(1.0, 10.0).unwrap())).unwrap()
    }

    #[test]
    fn continuation_reproduces_the_closed_form_off_the_contour() {
        let op = natanzon_op(1.0, 2001);
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        let st = StateSpec::natanzon(p, 1, Branch::Minus).unwrap();
        let pair = eigen_near(&op, c(st.energy(), 0.0)).unwrap();
        let cont = Continuation::new(&op, &pair).unwrap();
        let profile = *op.grid().profile();
        // Compare ratios so the unknown normalisation drops out.
        let a = c(0.3, -0.3);
        let b = c(-0.7, 0.15);
        let num = cont.value(a).unwrap() / cont.value(b).unwrap();
        let exact = (st.log_psi_t(a, &profile).unwrap().0 - st.log_psi_t(b, &profile).unwrap().0).exp();
        assert!((num / exact - 1.0).norm() < 1e-3, "{num} vs {exact}");
        assert!(cont.data_error() < 1e-2);
    }

    #[test]
    fn doublet_ground_states_have_no_nodes() {
        let op = natanzon_op(1.0, 2001);
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        for b in [Branch::Minus, Branch::Plus] {
            let st = StateSpec::natanzon(p, 0, b).unwrap();
            let pair = eigen_near(&op, c(st.energy(), 0.0)).unwrap();
            let nodes = eigenvector_nodes(&op, &pair, None).unwrap();
            assert_eq!(nodes.count, 0, "{b:?}: {nodes:?}");
            // The closed form agrees on the same window.
            assert_eq!(count_nodes_in(&st, op.grid(), &nodes.window).unwrap(), 0);
        }
    }

    #[test]
    fn first_excited_doublet_agrees_with_the_closed_form_window_by_window() {
        let op = natanzon_op(1.0, 2001);
        let p = NatanzonParams::new(1.0, 10.0).unwrap();
        for b in [Branch::Minus, Branch::Plus] {
            let st = StateSpec::natanzon(p, 1, b).unwrap();
            let pair = eigen_near(&op, c(st.energy(), 0.0)).unwrap();
            let nodes = eigenvector_nodes(&op, &pair, None).unwrap();
            let exact = count_nodes_in(&st, op.grid(), &nodes.window).unwrap();
            assert_eq!(nodes.count, exact, "{b:?}: {nodes:?}");
        }
    }

    #[test]
    fn eckart_eigenvectors_on_the_straight_contour() {
        let g = build_grid(EpsilonProfile::constant(0.25).unwrap(), -12.0, 12.0, 2001).unwrap();
        let p = EckartParams::new(3.0, 1.0).unwrap();
        let op = discretize(&g, &Model::Eckart(p)).unwrap();
        for n in 0..2 {
            let st = StateSpec::eckart(p, n).unwrap();
            let pair = eigen_near(&op, c(st.energy() + 0.01, 0.0)).unwrap();
            let nodes = eigenvector_nodes(&op, &pair, None).unwrap();
            let exact = count_nodes_in(&st, &g, &nodes.window).unwrap();
            assert_eq!(nodes.count, exact, "N={n}: {nodes:?}");
        }
    }

    #[test]
    fn trimmed_window_stays_inside_the_model_window() {
        let op = natanzon_op(1.0, 1001);
        let pair = eigen_near(&op, c(80.0, 0.0)).unwrap();
        let w = eigenvector_window(&op, &pair);
        let full = model_window(op.grid(), op.model());
        assert!(w.t_lo > full.t_lo && w.t_hi < full.t_hi);
        assert_eq!(w.below, full.below);
    }
}
