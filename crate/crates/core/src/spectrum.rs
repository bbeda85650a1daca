//! Eckart levels, the cubic constraint on `delta`, and Natanzon doublets.
//!
//! A Natanzon state with quantum number `N` needs a positive root of
//!
//! ```text
//! (2N+1) delta^3 + (N^2+N+1-C) delta^2 + beta^2 = 0
//! ```
//!
//! and has energy `(delta + N + 1/2)^2 + 3/4 - C`. For `beta > 0` there are
//! either two positive roots (a doublet) or none.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cmath::c;
use crate::numeric::dense::{eigenvalues, DenseMatrix};
use crate::potentials::{EckartParams, NatanzonParams};
use crate::{Error, Result, C64};

/// Relative size of the discriminant below which the cubic counts as having a double root.
pub const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EckartLevel {
    pub n: u32,
    pub delta: f64,
    pub energy: f64,
}

/// `-delta^2 + beta^2/delta^2`.
pub fn eckart_energy(delta: f64, beta: f64) -> f64 {
    -delta * delta + beta * beta / (delta * delta)
}

pub fn eckart_levels(p: &EckartParams) -> Result<Vec<EckartLevel>> {
    if !(p.a > 1.0) {
        return Err(Error::NoBoundStates(p.a));
    }
    let mut out = Vec::new();
    let mut n = 0u32;
    loop {
        let delta = p.a - f64::from(n) - 1.0;
        if delta <= 0.0 {
            break;
        }
        out.push(EckartLevel { n, delta, energy: eckart_energy(delta, p.beta) });
        n += 1;
    }
    Ok(out)
}

/// `(c3, c2, c1, c0)` of the cubic. `delta = 0` is a spurious root introduced
/// by clearing the `beta^2/delta^2` denominator and is never admissible.
pub fn delta_cubic_coeffs(n: u32, beta: f64, c_val: f64) -> (f64, f64, f64, f64) {
    let nf = f64::from(n);
    (2.0 * nf + 1.0, nf * nf + nf + 1.0 - c_val, 0.0, beta * beta)
}

/// Discriminant `-4 c2^3 c0 - 27 c3^2 c0^2` and its natural scale.
pub fn discriminant(n: u32, beta: f64, c_val: f64) -> (f64, f64) {
    let (a, b, _, d) = delta_cubic_coeffs(n, beta, c_val);
    let t1 = -4.0 * b * b * b * d;
    let t2 = 27.0 * a * a * d * d;
    (t1 - t2, t1.abs() + t2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    PositiveReal,
    NegativeReal,
    ComplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRoots {
    pub n: u32,
    pub beta: f64,
    pub c: f64,
    /// Real roots first, in decreasing order; a complex pair last.
    pub roots: [C64; 3],
    pub kinds: [RootKind; 3],
    /// The two largest roots coincide (`C = C_min`).
    pub double_root: bool,
}

impl DeltaRoots {
    pub fn positive(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots
            .iter()
            .zip(self.kinds.iter())
            .filter(|(_, k)| **k == RootKind::PositiveReal)
            .map(|(r, _)| r.re)
    }
}

fn cubic(a: f64, b: f64, d: f64, x: C64) -> (C64, C64) {
    ((a * x + b) * x * x + d, (3.0 * a * x + 2.0 * b) * x)
}

fn newton_polish(a: f64, b: f64, d: f64, mut x: C64) -> C64 {
    for _ in 0..50 {
        let (f, df) = cubic(a, b, d, x);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        x -= step;
        if step.norm() <= 1e-17 * x.norm() {
            break;
        }
    }
    x
}

pub fn solve_delta(n: u32, beta: f64, c_val: f64) -> Result<DeltaRoots> {
    if !beta.is_finite() || !c_val.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameters("beta must be finite and non-negative, C finite"));
    }
    if beta == 0.0 {
        return Err(Error::DegenerateCubic);
    }
    let (a, b, _, d) = delta_cubic_coeffs(n, beta, c_val);
    let companion = DenseMatrix::companion(&[c(d / a, 0.0), C64::default(), c(b / a, 0.0)]);
    let raw = eigenvalues(companion, 100)?;
    let mut roots = [raw[0], raw[1], raw[2]];
    for r in roots.iter_mut() {
        *r = newton_polish(a, b, d, *r);
    }
    let (disc, scale) = discriminant(n, beta, c_val);
    let double_root = disc.abs() <= DEGENERATE_TOL * scale;
    let kinds;
    if double_root {
        let star = -2.0 * b / (3.0 * a);
        let neg = roots.iter().map(|r| r.re).fold(f64::INFINITY, f64::min);
        let neg = newton_polish(a, b, d, c(neg, 0.0)).re;
        roots = [c(star, 0.0), c(star, 0.0), c(neg, 0.0)];
        kinds = [RootKind::PositiveReal, RootKind::PositiveReal, RootKind::NegativeReal];
    } else if disc > 0.0 {
        let mut re: [f64; 3] = [roots[0].re, roots[1].re, roots[2].re];
        for x in re.iter_mut() {
            *x = newton_polish(a, b, d, c(*x, 0.0)).re;
        }
        re.sort_by(|x, y| y.total_cmp(x));
        roots = [c(re[0], 0.0), c(re[1], 0.0), c(re[2], 0.0)];
        let k = |x: f64| if x > 0.0 { RootKind::PositiveReal } else { RootKind::NegativeReal };
        kinds = [k(re[0]), k(re[1]), k(re[2])];
    } else {
        // One real root (negative, since the product of roots is -beta^2/(2N+1) < 0
        // and the complex pair contributes |z|^2 > 0) and a conjugate pair.
        roots.sort_by(|x, y| x.im.abs().total_cmp(&y.im.abs()));
        let real = newton_polish(a, b, d, c(roots[0].re, 0.0)).re;
        let z = if roots[1].im >= 0.0 { roots[1] } else { roots[2] };
        let z = newton_polish(a, b, d, z);
        roots = [c(real, 0.0), z, z.conj()];
        let k = if real > 0.0 { RootKind::PositiveReal } else { RootKind::NegativeReal };
        kinds = [k, RootKind::ComplexPair, RootKind::ComplexPair];
    }
    Ok(DeltaRoots { n, beta, c: c_val, roots, kinds, double_root })
}

/// `(delta + N + 1/2)^2 + 3/4 - C`.
pub fn natanzon_energy(n: u32, delta: f64, c_val: f64) -> f64 {
    let x = delta + f64::from(n) + 0.5;
    x * x + 0.75 - c_val
}

/// `|N^2 + N + 1 + (2N+1) delta + beta^2/delta^2 - C| / max(|C|, 1)`.
pub fn constraint_residual(n: u32, delta: f64, beta: f64, c_val: f64) -> f64 {
    let nf = f64::from(n);
    let lhs = nf * nf + nf + 1.0 + (2.0 * nf + 1.0) * delta + beta * beta / (delta * delta);
    (lhs - c_val).abs() / c_val.abs().max(1.0)
}

/// Quasi-parity tag of a doublet member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn q(self) -> i8 {
        match self {
            Branch::Minus => -1,
            Branch::Plus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Doublet {
    pub n: u32,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

impl Doublet {
    pub fn delta(&self, b: Branch) -> f64 {
        match b {
            Branch::Plus => self.delta_plus,
            Branch::Minus => self.delta_minus,
        }
    }
    pub fn energy(&self, b: Branch) -> f64 {
        match b {
            Branch::Plus => self.e_plus,
            Branch::Minus => self.e_minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelOutcome {
    Doublet(Doublet),
    /// One admissible root: `beta = 0`, or the double root at `C = C_min`
    /// (`degenerate`). Tagged `q = +1`.
    SingleLevel { n: u32, delta: f64, energy: f64, degenerate: bool },
    NoDoublet { n: u32 },
}

impl LevelOutcome {
    pub fn n(&self) -> u32 {
        match self {
            LevelOutcome::Doublet(d) => d.n,
            LevelOutcome::SingleLevel { n, .. } | LevelOutcome::NoDoublet { n } => *n,
        }
    }

    /// `(q, delta, energy)` for each admissible member, ordered by `q`.
    pub fn members(&self) -> Vec<(Branch, f64, f64)> {
        match self {
            LevelOutcome::Doublet(d) => {
                alloc::vec![(Branch::Minus, d.delta_minus, d.e_minus), (Branch::Plus, d.delta_plus, d.e_plus)]
            }
            LevelOutcome::SingleLevel { delta, energy, .. } => alloc::vec![(Branch::Plus, *delta, *energy)],
            LevelOutcome::NoDoublet { .. } => Vec::new(),
        }
    }

    /// `delta` of the member with tag `b`, if there is one.
    pub fn delta(&self, b: Branch) -> Option<f64> {
        self.members().into_iter().find(|m| m.0 == b).map(|m| m.1)
    }
}

pub fn doublet(n: u32, beta: f64, c_val: f64) -> LevelOutcome {
    if beta == 0.0 {
        let nf = f64::from(n);
        let delta = (c_val - nf * nf - nf - 1.0) / (2.0 * nf + 1.0);
        return if delta > 0.0 {
            LevelOutcome::SingleLevel { n, delta, energy: natanzon_energy(n, delta, c_val), degenerate: false }
        } else {
            LevelOutcome::NoDoublet { n }
        };
    }
    let roots = match solve_delta(n, beta, c_val) {
        Ok(r) => r,
        Err(_) => return LevelOutcome::NoDoublet { n },
    };
    if roots.double_root {
        let delta = roots.roots[0].re;
        return LevelOutcome::SingleLevel { n, delta, energy: natanzon_energy(n, delta, c_val), degenerate: true };
    }
    let pos: Vec<f64> = roots.positive().collect();
    match pos.len() {
        2 => {
            let (dp, dm) = (pos[0].max(pos[1]), pos[0].min(pos[1]));
            LevelOutcome::Doublet(Doublet {
                n,
                delta_plus: dp,
                delta_minus: dm,
                e_plus: natanzon_energy(n, dp, c_val),
                e_minus: natanzon_energy(n, dm, c_val),
            })
        }
        1 => {
            let delta = pos[0];
            LevelOutcome::SingleLevel { n, delta, energy: natanzon_energy(n, delta, c_val), degenerate: false }
        }
        _ => LevelOutcome::NoDoublet { n },
    }
}

/// Smallest `C` with two positive roots, by bisection on the sign of the discriminant.
pub fn c_min(n: u32, beta: f64) -> f64 {
    let nf = f64::from(n);
    let lo0 = nf * nf + nf + 1.0;
    if beta == 0.0 {
        return lo0;
    }
    let a = 2.0 * nf + 1.0;
    let mut lo = lo0;
    let mut hi = lo0 + 2.0 * (27.0 * a * a * beta * beta / 4.0).cbrt() + 1.0;
    while discriminant(n, beta, hi).0 <= 0.0 {
        hi = lo0 + 2.0 * (hi - lo0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if discriminant(n, beta, mid).0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One outcome per `N = 0..=n_max`.
pub fn spectrum_report(p: &NatanzonParams, n_max: u32) -> Vec<LevelOutcome> {
    (0..=n_max).map(|n| doublet(n, p.beta, p.c)).collect()
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn vieta_and_residuals(n in 0u32..6, beta in 1e-3f64..5.0, c_val in 0.01f64..50.0) {
            let r = solve_delta(n, beta, c_val).unwrap();
            let (a, b, _, d) = delta_cubic_coeffs(n, beta, c_val);
            let prod = r.roots[0] * r.roots[1] * r.roots[2];
            prop_assert!((prod.re + d / a).abs() <= 1e-12 * (d / a));
            prop_assert!(prod.im.abs() <= 1e-12 * (d / a));
            let sum = r.roots[0] + r.roots[1] + r.roots[2];
            prop_assert!((sum.re + b / a).abs() <= 1e-12 * (b / a).abs().max(r.roots[0].norm()));
            for x in r.positive() {
                prop_assert!(constraint_residual(n, x, beta, c_val) < 1e-10);
            }
            prop_assert!(r.kinds.iter().filter(|k| **k == RootKind::NegativeReal).count() <= 1);
        }

        #[test]
        fn energy_increases_with_delta(n in 0u32..6, beta in 1e-3f64..5.0, c_val in 0.01f64..50.0) {
            if let LevelOutcome::Doublet(d) = doublet(n, beta, c_val) {
                prop_assert!(d.delta_plus >= d.delta_minus);
                prop_assert!(d.e_plus > d.e_minus);
                prop_assert!(d.delta_minus > 0.0);
            }
        }

        #[test]
        fn beta_zero_single(n in 0u32..6, c_val in 0.01f64..50.0) {
            let nf = f64::from(n);
            let o = doublet(n, 0.0, c_val);
            if c_val - nf * nf - nf - 1.0 > 0.0 {
                prop_assert_eq!(o.members().len(), 1);
            } else {
                prop_assert!(o.members().is_empty());
            }
        }
    }
}
